#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace botamp {

// The eight per-account scores returned by the bot-scoring service, each on a
// 0-5 scale. Kept as an array so parsing, serialization, and summation can
// iterate the fields in one fixed order.
struct BotometerMetrics {
    static constexpr std::size_t kCount = 8;
    static constexpr std::array<const char*, kCount> kNames = {
        "content", "language", "friend", "network", "sentiment", "temporal", "universal", "user"};

    std::array<double, kCount> values{};

    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }

    bool operator==(const BotometerMetrics& other) const { return values == other.values; }
};

// One scholarly article plus the Twitter accounts that shared it.
// tweeter_locations is positional: entry i belongs to tweeter_user_ids[i].
struct ArticleRecord {
    std::string altmetric_id;
    std::string discipline;
    std::string journal;
    std::string research_type;
    std::string publisher;
    double altmetric_score = 0.0;
    std::vector<std::string> tweeter_user_ids;
    std::vector<std::string> tweeter_locations;

    bool operator==(const ArticleRecord& other) const = default;
};

// user id -> metrics. Ordered map so iteration (and every file we write from
// it) is canonical.
using ScoreStore = std::map<std::string, BotometerMetrics>;

// Aggregated per-article record, one row of the labeled dataset.
struct LabeledArticle {
    std::string altmetric_id;
    double overall_score = 0.0;
    std::string discipline;
    std::string journal;
    std::string research_type;
    std::string publisher;
    double altmetric_score = 0.0;
    std::string author_location;
    bool is_spammed = false;

    bool operator==(const LabeledArticle& other) const = default;
};

// Sentinel category for absent locations and unseen-at-test values.
inline constexpr const char* kUnknownCategory = "unknown";

}  // namespace botamp
