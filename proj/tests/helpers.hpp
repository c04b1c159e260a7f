#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "botamp/features.hpp"

namespace testutil {

// Unique scratch directory, removed on scope exit.
class TempDir {
  public:
    TempDir() {
        static std::mt19937_64 gen(std::random_device{}());
        const auto base = std::filesystem::temp_directory_path();
        for (;;) {
            auto candidate = base / ("botamp_test_" + std::to_string(gen()));
            std::error_code ec;
            if (std::filesystem::create_directory(candidate, ec)) {
                path_ = candidate;
                return;
            }
        }
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

  private:
    std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
}

inline std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct MatrixRow {
    std::array<double, botamp::features::kFeatureCount> values{};
    int label = 0;
};

inline botamp::features::FeatureMatrix make_matrix(const std::vector<MatrixRow>& rows) {
    botamp::features::FeatureMatrix m;
    m.n_rows = rows.size();
    m.data.reserve(rows.size() * botamp::features::kFeatureCount);
    m.labels.reserve(rows.size());
    for (const auto& r : rows) {
        m.data.insert(m.data.end(), r.values.begin(), r.values.end());
        m.labels.push_back(static_cast<std::uint8_t>(r.label != 0));
    }
    return m;
}

// n rows with the given label; column `col` is `value`, the rest are zero.
inline void add_rows(std::vector<MatrixRow>& rows, std::size_t n, std::size_t col, double value,
                     int label) {
    for (std::size_t i = 0; i < n; ++i) {
        MatrixRow r;
        r.values[col] = value;
        r.label = label;
        rows.push_back(r);
    }
}

}  // namespace testutil
