#include <doctest.h>

#include <cmath>
#include <vector>

#include "botamp/errors.hpp"
#include "botamp/features.hpp"
#include "helpers.hpp"

using namespace botamp;

namespace {

LabeledArticle article(const std::string& id, const std::string& discipline,
                       const std::string& journal, double altmetric, bool spammed,
                       const std::string& location = "India") {
    LabeledArticle a;
    a.altmetric_id = id;
    a.discipline = discipline;
    a.journal = journal;
    a.research_type = "article";
    a.publisher = "P";
    a.altmetric_score = altmetric;
    a.overall_score = spammed ? 30.0 : 5.0;
    a.author_location = location;
    a.is_spammed = spammed;
    return a;
}

}  // namespace

TEST_SUITE("features") {

TEST_CASE("vocabulary sorts distinct values and injects unknown") {
    const auto v = features::Vocabulary::build({"b", "a", "b"});
    REQUIRE(v.size() == 3);
    CHECK(v.values() == std::vector<std::string>{"a", "b", "unknown"});
    CHECK(v.code("a") == 0);
    CHECK(v.code("b") == 1);
    CHECK(v.code("unknown") == 2);

    const auto single = features::Vocabulary::build({"x"});
    CHECK(single.values() == std::vector<std::string>{"unknown", "x"});

    const auto repeated = features::Vocabulary::build({"a", "a", "a"});
    CHECK(repeated.values() == std::vector<std::string>{"a", "unknown"});
}

TEST_CASE("encoding scales codes into the unit interval") {
    const auto v = features::Vocabulary::build({"a", "b"});
    CHECK(v.encode("a") == 0.0);
    CHECK(v.encode("b") == 0.5);
    CHECK(v.encode("unknown") == 1.0);
    CHECK(v.encode("zzz") == 1.0);  // unseen routes to unknown

    const auto degenerate = features::Vocabulary::build({"unknown"});
    REQUIRE(degenerate.size() == 1);
    CHECK(degenerate.encode("unknown") == 0.0);
    CHECK(degenerate.encode("anything") == 0.0);
}

TEST_CASE("vocabulary fingerprints detect content changes") {
    const auto a = features::Vocabulary::build({"a", "b"});
    const auto b = features::Vocabulary::build({"a", "b"});
    const auto c = features::Vocabulary::build({"a", "c"});
    CHECK(a.fingerprint() == b.fingerprint());
    CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("vocabulary round-trips through json") {
    const auto v = features::Vocabulary::build({"beta", "alpha"});
    const auto back = features::Vocabulary::from_json(v.to_json());
    CHECK(back.values() == v.values());
    CHECK(back.fingerprint() == v.fingerprint());
}

TEST_CASE("minmax hits its endpoints exactly") {
    const auto fit = features::fit_minmax({0.25, 8268.56});
    CHECK(features::normalize_minmax(0.25, fit) == 0.0);
    CHECK(features::normalize_minmax(8268.56, fit) == 1.0);
    CHECK(features::normalize_minmax(4134.405, fit) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("minmax clips and degenerates predictably") {
    const features::MinMax fit{0.0, 10.0};
    CHECK(features::normalize_minmax(-5.0, fit) == 0.0);
    CHECK(features::normalize_minmax(15.0, fit) == 1.0);

    const auto constant = features::fit_minmax({7.0, 7.0, 7.0});
    CHECK(features::normalize_minmax(7.0, constant) == 0.0);
    CHECK(features::normalize_minmax(9.0, constant) == 0.0);
}

TEST_CASE("minmax is monotone") {
    const features::MinMax fit{1.0, 5.0};
    double prev = -1.0;
    for (double x = 0.0; x <= 6.0; x += 0.25) {
        const double y = features::normalize_minmax(x, fit);
        CHECK(y >= prev);
        CHECK(y >= 0.0);
        CHECK(y <= 1.0);
        prev = y;
    }
}

TEST_CASE("encoder lays out the six columns in order") {
    const std::vector<LabeledArticle> articles = {
        article("a1", "Medicine", "J1", 0.25, false, "India"),
        article("a2", "Energy", "J2", 8268.56, true, "Chile"),
    };
    features::FeatureEncoder enc;
    enc.fit(articles);
    const auto m = enc.transform(articles);
    REQUIRE(m.n_rows == 2);
    REQUIRE(m.data.size() == 2 * features::kFeatureCount);

    // Vocab {Energy, Medicine, unknown}: Medicine -> 1/2.
    CHECK(m.at(0, 0) == 0.5);
    CHECK(m.at(1, 0) == 0.0);
    // Vocab {J1, J2, unknown}.
    CHECK(m.at(0, 1) == 0.0);
    CHECK(m.at(1, 1) == 0.5);
    // research_type and publisher are single-valued: {article, unknown} &c.
    CHECK(m.at(0, 2) == 0.0);
    CHECK(m.at(0, 3) == 0.0);
    // Altmetric endpoints map to 0 and 1 exactly.
    CHECK(m.at(0, features::kAltmetricColumn) == 0.0);
    CHECK(m.at(1, features::kAltmetricColumn) == 1.0);
    // Vocab {Chile, India, unknown}.
    CHECK(m.at(0, 5) == 0.5);
    CHECK(m.at(1, 5) == 0.0);

    CHECK(m.labels == std::vector<std::uint8_t>{0, 1});
}

TEST_CASE("unseen categories at transform time route to unknown") {
    const std::vector<LabeledArticle> train = {
        article("a1", "Medicine", "J1", 1.0, false),
        article("a2", "Energy", "J2", 2.0, true),
    };
    features::FeatureEncoder enc;
    enc.fit(train);
    const auto m = enc.transform({article("a3", "Dentistry", "J9", 1.5, false)});
    // unknown is the last of 3 codes in both vocabularies
    CHECK(m.at(0, 0) == 1.0);
    CHECK(m.at(0, 1) == 1.0);
}

TEST_CASE("identical articles produce identical rows") {
    const auto a = article("a1", "Medicine", "J1", 3.0, true);
    auto b = a;
    b.altmetric_id = "a2";
    const auto m = features::assemble_features({a, b, article("a3", "Energy", "J2", 9.0, false)});
    for (std::size_t c = 0; c < features::kFeatureCount; ++c) {
        CHECK(m.at(0, c) == m.at(1, c));
    }
    CHECK(m.labels[0] == m.labels[1]);
}

TEST_CASE("assemble_features rejects an empty dataset") {
    CHECK_THROWS_AS(features::assemble_features({}), ValidationError);
}

TEST_CASE("encoder json round trip preserves the transform") {
    const std::vector<LabeledArticle> articles = {
        article("a1", "Medicine", "J1", 0.25, false),
        article("a2", "Energy", "J2", 100.0, true),
        article("a3", "Dentistry", "J3", 8268.56, true),
    };
    features::FeatureEncoder enc;
    enc.fit(articles);
    const auto restored = features::FeatureEncoder::from_json(enc.to_json());
    const auto m1 = enc.transform(articles);
    const auto m2 = restored.transform(articles);
    CHECK(m1.data == m2.data);
    CHECK(m1.labels == m2.labels);
}

TEST_CASE("encoder json validation") {
    CHECK_THROWS_AS(features::FeatureEncoder::from_json(nlohmann::json::object()),
                    ValidationError);
    CHECK_THROWS_AS(features::FeatureEncoder::from_json(nlohmann::json::array()), ValidationError);
}

TEST_CASE("correlation matrix has unit diagonal and is symmetric") {
    features::FeatureMatrix m;
    m.n_rows = 3;
    m.data.assign(3 * features::kFeatureCount, 0.0);
    m.labels = {0, 0, 1};
    // col0 = x, col1 = y from the hand-computed pair, col2 = negation of x
    // about its mean, remaining columns constant.
    const double xs[3] = {0.0, 1.0, 2.0};
    const double ys[3] = {0.0, 1.0, 4.0};
    for (std::size_t r = 0; r < 3; ++r) {
        m.data[r * features::kFeatureCount + 0] = xs[r];
        m.data[r * features::kFeatureCount + 1] = ys[r];
        m.data[r * features::kFeatureCount + 2] = 2.0 - xs[r];
    }

    const auto corr = features::feature_correlation(m);
    REQUIRE(corr.size() == features::kFeatureCount + 1);
    for (std::size_t i = 0; i < corr.size(); ++i) {
        REQUIRE(corr[i].size() == corr.size());
        CHECK(corr[i][i] == 1.0);
        for (std::size_t j = 0; j < corr.size(); ++j) {
            CHECK(corr[i][j] == corr[j][i]);
            CHECK(std::fabs(corr[i][j]) <= 1.0 + 1e-12);
        }
    }
    CHECK(corr[0][1] == doctest::Approx(0.9608).epsilon(1e-4));
    CHECK(corr[0][2] == doctest::Approx(-1.0).epsilon(1e-12));
    // Constant columns correlate zero with everything else.
    CHECK(corr[3][0] == 0.0);
    CHECK(corr[3][6] == 0.0);

    CHECK_THROWS_AS(features::feature_correlation(features::FeatureMatrix{}), ValidationError);
}

TEST_CASE("correlation csv is labeled by column names") {
    features::FeatureMatrix m;
    m.n_rows = 2;
    m.data.assign(2 * features::kFeatureCount, 0.0);
    m.data[0] = 1.0;
    m.labels = {0, 1};
    testutil::TempDir dir;
    const auto path = dir.file("corr.csv");
    features::write_correlation_csv(path, features::feature_correlation(m));
    const auto text = testutil::read_text(path);
    CHECK(text.rfind(",discipline,journal,research_type,publisher,altmetric_score,"
                     "author_location,is_spammed\n",
                     0) == 0);
    CHECK(text.find("\nis_spammed,") != std::string::npos);
}

}  // TEST_SUITE
