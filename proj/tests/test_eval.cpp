#include <doctest.h>

#include <vector>

#include "botamp/errors.hpp"
#include "botamp/eval.hpp"
#include "helpers.hpp"

using namespace botamp;

namespace {

const std::vector<std::uint8_t> kTruth10 = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
const std::vector<std::uint8_t> kPred10 = {1, 1, 1, 0, 0, 0, 0, 0, 1, 1};

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("confusion counts the four cells") {
    const auto perfect = eval::confusion({1, 0}, {1, 0});
    CHECK(perfect.tp == 1);
    CHECK(perfect.tn == 1);
    CHECK(perfect.fp == 0);
    CHECK(perfect.fn == 0);

    const auto m = eval::confusion(kTruth10, kPred10);
    CHECK(m.tp == 3);
    CHECK(m.fn == 1);
    CHECK(m.fp == 2);
    CHECK(m.tn == 4);

    const auto blind = eval::confusion({1, 1, 1, 1, 1}, {0, 0, 0, 0, 0});
    CHECK(blind.fn == 5);
    CHECK(blind.tp + blind.fp + blind.tn == 0);
}

TEST_CASE("confusion validates its inputs") {
    CHECK_THROWS_AS(eval::confusion({1, 0}, {1}), ValidationError);
    CHECK_THROWS_AS(eval::confusion({}, {}), ValidationError);
}

TEST_CASE("classification report on the ten-prediction fixture") {
    const auto r = eval::classification_report(kTruth10, kPred10);
    CHECK(r.positive.precision == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(r.positive.recall == doctest::Approx(0.75).epsilon(1e-12));
    CHECK(r.positive.f1 == doctest::Approx(0.666667).epsilon(1e-4));
    CHECK(r.positive.support == 4);
    CHECK(r.negative.precision == doctest::Approx(0.8).epsilon(1e-12));
    CHECK(r.negative.recall == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
    CHECK(r.negative.f1 == doctest::Approx(0.727273).epsilon(1e-4));
    CHECK(r.negative.support == 6);
    CHECK(r.accuracy == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.macro_precision == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(r.weighted_recall == doctest::Approx(r.accuracy).epsilon(1e-12));
}

TEST_CASE("perfect predictions score one everywhere") {
    const std::vector<std::uint8_t> y = {1, 0, 1, 1, 0};
    const auto r = eval::classification_report(y, y);
    CHECK(r.accuracy == 1.0);
    CHECK(r.positive.f1 == 1.0);
    CHECK(r.negative.f1 == 1.0);
    CHECK(r.macro_f1 == 1.0);
    CHECK(r.weighted_f1 == 1.0);
}

TEST_CASE("zero-denominator cells fall back to zero") {
    // No positive predictions at all: precision_true has denominator 0.
    const auto r = eval::classification_report({1, 0, 1}, {0, 0, 0});
    CHECK(r.positive.precision == 0.0);
    CHECK(r.positive.recall == 0.0);
    CHECK(r.positive.f1 == 0.0);
    CHECK(r.negative.recall == 1.0);
}

TEST_CASE("roc sweep over descending unique scores") {
    const auto pts = eval::roc_points({1, 1, 0, 0}, {0.9, 0.8, 0.3, 0.1});
    const std::vector<eval::RocPoint> expected = {
        {0.0, 0.0}, {0.0, 0.5}, {0.0, 1.0}, {0.5, 1.0}, {1.0, 1.0}};
    REQUIRE(pts.size() == expected.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
        CHECK(pts[i].fpr == doctest::Approx(expected[i].fpr).epsilon(1e-12));
        CHECK(pts[i].tpr == doctest::Approx(expected[i].tpr).epsilon(1e-12));
    }
    CHECK(eval::auc(pts) == 1.0);
}

TEST_CASE("tied scores collapse into one step") {
    const auto pts = eval::roc_points({1, 0, 1, 0}, {0.5, 0.5, 0.5, 0.5});
    REQUIRE(pts.size() == 2);
    CHECK(pts[0].fpr == 0.0);
    CHECK(pts[0].tpr == 0.0);
    CHECK(pts[1].fpr == 1.0);
    CHECK(pts[1].tpr == 1.0);
    CHECK(eval::auc(pts) == 0.5);
}

TEST_CASE("anti-perfect ranking has auc zero") {
    const auto pts = eval::roc_points({1, 1, 0, 0}, {0.1, 0.2, 0.8, 0.9});
    CHECK(eval::auc(pts) == 0.0);
}

TEST_CASE("roc input validation") {
    CHECK_THROWS_AS(eval::roc_points({1, 1}, {0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(eval::roc_points({0, 0}, {0.5, 0.6}), ValidationError);
    CHECK_THROWS_AS(eval::roc_points({1, 0}, {0.5}), ValidationError);
    CHECK_THROWS_AS(eval::roc_points({}, {}), ValidationError);
}

TEST_CASE("auc rejects points out of order") {
    CHECK_THROWS_AS(eval::auc({{0.5, 0.5}, {0.2, 0.7}}), ValidationError);
    CHECK_THROWS_AS(eval::auc({{0.0, 0.0}}), ValidationError);
}

TEST_CASE("report serializes with per-class blocks") {
    const auto j = eval::report_to_json(eval::classification_report(kTruth10, kPred10));
    CHECK(j["confusion"]["tp"] == 3);
    CHECK(j["confusion"]["tn"] == 4);
    CHECK(j["true"]["precision"] == doctest::Approx(0.6));
    CHECK(j["false"]["support"] == 6);
    CHECK(j["accuracy"] == doctest::Approx(0.7));
    CHECK(j.contains("macro"));
    CHECK(j.contains("weighted"));
}

TEST_CASE("roc csv output") {
    testutil::TempDir dir;
    const auto path = dir.file("roc.csv");
    eval::write_roc_csv(path, eval::roc_points({1, 1, 0, 0}, {0.9, 0.8, 0.3, 0.1}));
    const auto text = testutil::read_text(path);
    CHECK(text.rfind("fpr,tpr\n", 0) == 0);
    CHECK(text.find("0.5,1\n") != std::string::npos);
}

}  // TEST_SUITE
