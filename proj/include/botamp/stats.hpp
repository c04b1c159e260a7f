#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "botamp/types.hpp"

namespace botamp::stats {

// True iff the discipline belongs to the 12 health & human science areas.
// Matching is case-insensitive and whitespace-trimmed.
bool is_health_discipline(std::string_view discipline);

enum class GroupKey { discipline, author_location, health_partition };

struct GroupSummary {
    std::string key;
    std::size_t n_articles = 0;
    std::size_t n_spammed = 0;
    double ratio = 0.0;
    double median_overall_score = 0.0;
};

// One summary per distinct key value, keys sorted. health_partition yields
// exactly three rows: all, health, other.
std::vector<GroupSummary> group_spam_ratio(const std::vector<LabeledArticle>& articles,
                                           GroupKey key);

// Same grouping, median of overall_score per group. health_partition is not a
// valid key here.
std::vector<GroupSummary> group_median_score(const std::vector<LabeledArticle>& articles,
                                             GroupKey key);

struct ZTestResult {
    double z = 0.0;
    double p_two_tailed = 1.0;
    bool underflow = false;  // p collapsed to exactly 0 in double
    double pooled = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

// Pooled two-proportion z-test. Requires 0 <= x_i <= n_i, n_i >= 1, and a
// pooled proportion strictly inside (0, 1).
ZTestResult two_proportion_ztest(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2);

struct TwoTailedP {
    double p = 1.0;
    bool underflow = false;
};

// 2 * (1 - Phi(|z|)). The CDF is materialized as a double, so for |z| above
// roughly 8.3 the tail is lost to rounding, the result is exactly 0, and the
// underflow flag is set.
TwoTailedP normal_two_tailed_p(double z);

// Standard normal CDF via our own erfc.
double normal_cdf(double z);

// Rational approximation of the complementary error function (Cody-style
// three-piece). Tested against std::erfc.
double erfc_approx(double x);

// groups file: key,n,n_spammed,ratio,median_score
void write_groups_csv(const std::string& path, const std::vector<GroupSummary>& groups);

}  // namespace botamp::stats
