#include "botamp/features.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>

#include "botamp/csv.hpp"
#include "botamp/errors.hpp"

namespace botamp::features {

Vocabulary Vocabulary::build(const std::vector<std::string>& raw_values) {
    std::set<std::string> distinct(raw_values.begin(), raw_values.end());
    distinct.insert(kUnknownCategory);
    Vocabulary v;
    v.values_.assign(distinct.begin(), distinct.end());
    for (std::size_t i = 0; i < v.values_.size(); ++i) v.codes_[v.values_[i]] = i;
    return v;
}

std::size_t Vocabulary::code(const std::string& value) const {
    auto it = codes_.find(value);
    if (it != codes_.end()) return it->second;
    return codes_.at(kUnknownCategory);
}

double Vocabulary::encode(const std::string& value) const {
    if (values_.size() <= 1) return 0.0;
    return static_cast<double>(code(value)) / static_cast<double>(values_.size() - 1);
}

std::uint64_t Vocabulary::fingerprint() const {
    std::uint64_t h = 1469598103934665603ULL;
    auto mix = [&](unsigned char c) {
        h ^= c;
        h *= 1099511628211ULL;
    };
    for (const auto& v : values_) {
        for (char c : v) mix(static_cast<unsigned char>(c));
        mix(0x1f);
    }
    return h;
}

nlohmann::json Vocabulary::to_json() const {
    return nlohmann::json{{"values", values_}};
}

Vocabulary Vocabulary::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("values") || !j["values"].is_array()) {
        throw ValidationError("vocabulary json must be {\"values\": [...]}");
    }
    std::vector<std::string> vals;
    for (const auto& e : j["values"]) {
        if (!e.is_string()) throw ValidationError("vocabulary values must be strings");
        vals.push_back(e.get<std::string>());
    }
    Vocabulary v = build(vals);
    if (v.values_.size() != vals.size()) {
        throw ValidationError("vocabulary json has duplicates or lacks \"unknown\"");
    }
    return v;
}

MinMax fit_minmax(const std::vector<double>& values) {
    if (values.empty()) throw ValidationError("min-max fit on empty values");
    MinMax mm{values[0], values[0]};
    for (double v : values) {
        if (!std::isfinite(v)) throw NumericError("non-finite value in min-max fit");
        mm.lo = std::min(mm.lo, v);
        mm.hi = std::max(mm.hi, v);
    }
    return mm;
}

double normalize_minmax(double value, const MinMax& range) {
    if (!std::isfinite(value)) throw NumericError("non-finite value in min-max transform");
    if (range.hi == range.lo) return 0.0;
    const double x = (value - range.lo) / (range.hi - range.lo);
    return std::clamp(x, 0.0, 1.0);
}

namespace {

constexpr std::array<std::size_t, 5> kCategoricalColumns = {0, 1, 2, 3, 5};

const std::string& categorical_value(const LabeledArticle& a, std::size_t vocab_index) {
    switch (vocab_index) {
        case 0: return a.discipline;
        case 1: return a.journal;
        case 2: return a.research_type;
        case 3: return a.publisher;
        default: return a.author_location;
    }
}

}  // namespace

void FeatureEncoder::fit(const std::vector<LabeledArticle>& articles) {
    if (articles.empty()) throw ValidationError("encoder fit on empty article set");
    for (std::size_t vi = 0; vi < vocabs_.size(); ++vi) {
        std::vector<std::string> vals;
        vals.reserve(articles.size());
        for (const auto& a : articles) vals.push_back(categorical_value(a, vi));
        vocabs_[vi] = Vocabulary::build(vals);
    }
    std::vector<double> alt;
    alt.reserve(articles.size());
    for (const auto& a : articles) alt.push_back(a.altmetric_score);
    altmetric_ = fit_minmax(alt);
    fitted_ = true;
}

FeatureMatrix FeatureEncoder::transform(const std::vector<LabeledArticle>& articles) const {
    if (!fitted_) throw ConfigError("encoder used before fit");
    FeatureMatrix m;
    m.n_rows = articles.size();
    m.data.resize(m.n_rows * kFeatureCount);
    m.labels.resize(m.n_rows);
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        const auto& a = articles[r];
        double* row = m.data.data() + r * kFeatureCount;
        for (std::size_t vi = 0; vi < kCategoricalColumns.size(); ++vi) {
            row[kCategoricalColumns[vi]] = vocabs_[vi].encode(categorical_value(a, vi));
        }
        row[kAltmetricColumn] = normalize_minmax(a.altmetric_score, altmetric_);
        m.labels[r] = a.is_spammed ? 1 : 0;
    }
    return m;
}

const Vocabulary& FeatureEncoder::vocabulary(std::size_t column) const {
    if (!fitted_) throw ConfigError("encoder used before fit");
    for (std::size_t vi = 0; vi < kCategoricalColumns.size(); ++vi) {
        if (kCategoricalColumns[vi] == column) return vocabs_[vi];
    }
    throw ConfigError("column has no vocabulary");
}

nlohmann::json FeatureEncoder::to_json() const {
    if (!fitted_) throw ConfigError("encoder serialized before fit");
    nlohmann::json j;
    for (std::size_t vi = 0; vi < kCategoricalColumns.size(); ++vi) {
        j["vocabularies"][kFeatureNames[kCategoricalColumns[vi]]] = vocabs_[vi].to_json();
    }
    j["altmetric"] = {{"lo", altmetric_.lo}, {"hi", altmetric_.hi}};
    return j;
}

FeatureEncoder FeatureEncoder::from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("vocabularies") || !j.contains("altmetric")) {
        throw ValidationError("encoder json needs \"vocabularies\" and \"altmetric\"");
    }
    FeatureEncoder e;
    for (std::size_t vi = 0; vi < kCategoricalColumns.size(); ++vi) {
        const char* name = kFeatureNames[kCategoricalColumns[vi]];
        if (!j["vocabularies"].contains(name)) {
            throw ValidationError(std::string("encoder json missing vocabulary: ") + name);
        }
        e.vocabs_[vi] = Vocabulary::from_json(j["vocabularies"][name]);
    }
    const auto& alt = j["altmetric"];
    if (!alt.is_object() || !alt.contains("lo") || !alt.contains("hi")) {
        throw ValidationError("encoder json altmetric needs lo and hi");
    }
    e.altmetric_.lo = alt["lo"].get<double>();
    e.altmetric_.hi = alt["hi"].get<double>();
    if (!std::isfinite(e.altmetric_.lo) || !std::isfinite(e.altmetric_.hi) ||
        e.altmetric_.lo > e.altmetric_.hi) {
        throw ValidationError("encoder json altmetric range is invalid");
    }
    e.fitted_ = true;
    return e;
}

FeatureMatrix assemble_features(const std::vector<LabeledArticle>& articles) {
    FeatureEncoder e;
    e.fit(articles);
    return e.transform(articles);
}

std::vector<std::vector<double>> feature_correlation(const FeatureMatrix& m) {
    if (m.n_rows < 2) throw ValidationError("correlation needs at least two rows");
    const std::size_t cols = kFeatureCount + 1;
    const double n = static_cast<double>(m.n_rows);

    std::vector<std::vector<double>> col(cols, std::vector<double>(m.n_rows));
    for (std::size_t r = 0; r < m.n_rows; ++r) {
        for (std::size_t c = 0; c < kFeatureCount; ++c) col[c][r] = m.at(r, c);
        col[kFeatureCount][r] = m.labels[r] ? 1.0 : 0.0;
    }

    std::vector<double> mean(cols, 0.0), sd(cols, 0.0);
    for (std::size_t c = 0; c < cols; ++c) {
        for (double v : col[c]) mean[c] += v;
        mean[c] /= n;
        for (double v : col[c]) sd[c] += (v - mean[c]) * (v - mean[c]);
        sd[c] = std::sqrt(sd[c]);
    }

    std::vector<std::vector<double>> corr(cols, std::vector<double>(cols, 0.0));
    for (std::size_t a = 0; a < cols; ++a) {
        corr[a][a] = 1.0;
        for (std::size_t b = a + 1; b < cols; ++b) {
            double r = 0.0;
            if (sd[a] > 0.0 && sd[b] > 0.0) {
                double cov = 0.0;
                for (std::size_t i = 0; i < m.n_rows; ++i) {
                    cov += (col[a][i] - mean[a]) * (col[b][i] - mean[b]);
                }
                r = cov / (sd[a] * sd[b]);
                r = std::clamp(r, -1.0, 1.0);
            }
            corr[a][b] = r;
            corr[b][a] = r;
        }
    }
    return corr;
}

void write_correlation_csv(const std::string& path,
                           const std::vector<std::vector<double>>& corr) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    std::vector<std::string> header = {""};
    for (const char* name : kFeatureNames) header.push_back(name);
    header.push_back("is_spammed");
    out << csv::encode_row(header);
    for (std::size_t r = 0; r < corr.size(); ++r) {
        std::vector<std::string> row = {header[r + 1]};
        for (double v : corr[r]) row.push_back(csv::format_double(v));
        out << csv::encode_row(row);
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace botamp::features
