#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "botamp/types.hpp"

namespace botamp::features {

// Sorted distinct category values, always including "unknown". A category's
// encoded value is its rank scaled into [0, 1].
class Vocabulary {
  public:
    static Vocabulary build(const std::vector<std::string>& raw_values);

    std::size_t size() const { return values_.size(); }
    const std::vector<std::string>& values() const { return values_; }
    std::size_t code(const std::string& value) const;
    double encode(const std::string& value) const;
    std::uint64_t fingerprint() const;

    nlohmann::json to_json() const;
    static Vocabulary from_json(const nlohmann::json& j);

  private:
    std::vector<std::string> values_;
    std::map<std::string, std::size_t> codes_;
};

struct MinMax {
    double lo = 0.0;
    double hi = 1.0;
};

MinMax fit_minmax(const std::vector<double>& values);
double normalize_minmax(double value, const MinMax& range);

inline constexpr std::size_t kFeatureCount = 6;
inline constexpr std::array<const char*, kFeatureCount> kFeatureNames = {
    "discipline", "journal", "research_type", "publisher", "altmetric_score", "author_location"};
inline constexpr std::size_t kAltmetricColumn = 4;

struct FeatureMatrix {
    std::size_t n_rows = 0;
    std::vector<double> data;  // row-major, kFeatureCount columns
    std::vector<std::uint8_t> labels;

    double at(std::size_t row, std::size_t col) const { return data[row * kFeatureCount + col]; }
    const double* row(std::size_t r) const { return data.data() + r * kFeatureCount; }
};

class FeatureEncoder {
  public:
    void fit(const std::vector<LabeledArticle>& articles);
    FeatureMatrix transform(const std::vector<LabeledArticle>& articles) const;
    bool fitted() const { return fitted_; }

    const Vocabulary& vocabulary(std::size_t column) const;
    const MinMax& altmetric_range() const { return altmetric_; }

    nlohmann::json to_json() const;
    static FeatureEncoder from_json(const nlohmann::json& j);

  private:
    std::array<Vocabulary, 5> vocabs_;  // categorical columns, matrix order
    MinMax altmetric_{};
    bool fitted_ = false;
};

FeatureMatrix assemble_features(const std::vector<LabeledArticle>& articles);

// Pearson correlations of the six features plus the label, label last.
// A constant column correlates 0 with everything, 1 with itself.
std::vector<std::vector<double>> feature_correlation(const FeatureMatrix& m);
void write_correlation_csv(const std::string& path,
                           const std::vector<std::vector<double>>& corr);

}  // namespace botamp::features
