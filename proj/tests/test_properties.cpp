#include <doctest.h>

#include <string>
#include <vector>

#include "properties.hpp"

namespace {

std::string join(const std::vector<std::string>& violations) {
    std::string out;
    for (const auto& v : violations) {
        out += v;
        out += "; ";
    }
    return out;
}

}  // namespace

TEST_SUITE("properties") {

TEST_CASE("user bot score is monotone in each metric and bounded") {
    const auto v = proptest::check_score_monotonicity(101);
    INFO(join(v));
    CHECK(v.empty());
}

TEST_CASE("median is permutation-invariant and bounded by the extremes") {
    const auto v = proptest::check_median_invariance(102);
    INFO(join(v));
    CHECK(v.empty());
}

TEST_CASE("spam counts never grow when the threshold rises") {
    const auto v = proptest::check_threshold_monotonicity(103);
    INFO(join(v));
    CHECK(v.empty());
}

TEST_CASE("upsampling conserves and balances the training rows") {
    const auto v = proptest::check_upsample_conservation(104);
    INFO(join(v));
    CHECK(v.empty());
}

TEST_CASE("two-proportion z-test is antisymmetric under a group swap") {
    const auto v = proptest::check_ztest_antisymmetry(105);
    INFO(join(v));
    CHECK(v.empty());
}

TEST_CASE("roc and auc ignore strictly increasing score transforms") {
    const auto v = proptest::check_auc_invariance(106);
    INFO(join(v));
    CHECK(v.empty());
}

TEST_CASE("knn predictions ignore a shared column translation") {
    const auto v = proptest::check_knn_translation_invariance(107);
    INFO(join(v));
    CHECK(v.empty());
}

}  // TEST_SUITE
