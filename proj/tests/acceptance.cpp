// Acceptance gate: one self-checking run per shipping criterion, one PASS or
// FAIL line each, nonzero exit when anything fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "botamp/csv.hpp"
#include "botamp/eval.hpp"
#include "botamp/features.hpp"
#include "botamp/ingest.hpp"
#include "botamp/learn.hpp"
#include "botamp/pipeline.hpp"
#include "botamp/rng.hpp"
#include "botamp/scoring.hpp"
#include "botamp/stats.hpp"
#include "botamp/synth.hpp"
#include "helpers.hpp"
#include "properties.hpp"

using namespace botamp;

namespace {

using SteadyClock = std::chrono::steady_clock;

double seconds_since(SteadyClock::time_point start) {
    return std::chrono::duration<double>(SteadyClock::now() - start).count();
}

struct Outcome {
    bool ok = false;
    std::string detail;
};

int run(int number, const std::string& name, const std::function<Outcome()>& body) {
    Outcome outcome;
    try {
        outcome = body();
    } catch (const std::exception& e) {
        outcome = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (outcome.ok ? "PASS" : "FAIL") << " criterion " << number << ": " << name;
    if (!outcome.detail.empty()) std::cout << " (" << outcome.detail << ")";
    std::cout << "\n";
    return outcome.ok ? 0 : 1;
}

std::string fmt(double v) { return csv::format_double(v); }

// ---- criterion 1 -----------------------------------------------------------

Outcome ztest_reproduction() {
    const auto start = SteadyClock::now();
    const auto r = stats::two_proportion_ztest(174876, 1178085, 26803, 219922);
    const double elapsed = seconds_since(start);
    const bool ok = r.z >= 32.3 && r.z <= 32.7 && (r.underflow || r.p_two_tailed < 0.001) &&
                    elapsed < 1.0;
    return {ok, "z=" + fmt(r.z) + ", p" + (r.underflow ? " underflowed to 0" : "=" + fmt(r.p_two_tailed)) +
                    ", " + fmt(elapsed) + "s"};
}

// ---- criterion 2 -----------------------------------------------------------

Outcome ratio_reproduction() {
    const auto start = SteadyClock::now();

    std::vector<LabeledArticle> articles;
    articles.reserve(1398007);
    auto add_group = [&](const char* discipline, std::size_t spammed, std::size_t total) {
        LabeledArticle row;
        row.discipline = discipline;
        row.journal = "J";
        row.research_type = "t";
        row.publisher = "P";
        row.author_location = "US";
        for (std::size_t i = 0; i < total; ++i) {
            row.is_spammed = i < spammed;
            row.overall_score = row.is_spammed ? 30.0 : 5.0;
            articles.push_back(row);
        }
    };
    add_group("Medicine", 174876, 1178085);
    add_group("Energy", 26803, 219922);

    const auto groups = stats::group_spam_ratio(articles, stats::GroupKey::health_partition);
    double all = -1.0, health = -1.0, other = -1.0;
    for (const auto& g : groups) {
        if (g.key == "all") all = g.ratio;
        if (g.key == "health") health = g.ratio;
        if (g.key == "other") other = g.ratio;
    }
    const double elapsed = seconds_since(start);

    const double tol = 0.00005;  // ±0.005 percentage points
    const bool ok = std::fabs(all - 0.1443) <= tol && std::fabs(health - 0.1484) <= tol &&
                    std::fabs(other - 0.1219) <= tol && elapsed < 1.0;
    return {ok, "all=" + fmt(all * 100.0) + "%, health=" + fmt(health * 100.0) + "%, other=" +
                    fmt(other * 100.0) + "%, " + fmt(elapsed) + "s"};
}

// ---- criterion 3 -----------------------------------------------------------

Outcome normalization_endpoints() {
    const auto range = features::fit_minmax({0.25, 12.0, 740.2, 8268.56, 3.5});
    const double lo = features::normalize_minmax(0.25, range);
    const double hi = features::normalize_minmax(8268.56, range);
    return {lo == 0.0 && hi == 1.0, "0.25 -> " + fmt(lo) + ", 8268.56 -> " + fmt(hi)};
}

// ---- criterion 4 -----------------------------------------------------------

struct SignalRun {
    double baseline = 0.0;
    double lr = 0.0;
    double knn = 0.0;
    double svm = 0.0;
};

SignalRun run_signal(double signal_strength) {
    synth::SynthConfig config;
    config.n_articles = 20000;
    config.seed = 42;
    config.signal_strength = signal_strength;
    const auto dataset = synth::generate_dataset(config);
    const auto labeled = scoring::label_articles(dataset.articles, dataset.scores, 20.0);

    features::FeatureEncoder encoder;
    encoder.fit(labeled);
    const auto matrix = encoder.transform(labeled);
    const learn::SplitSpec spec{0.7, derive_seed(42, "split"), true};
    auto split = learn::split_train_test(matrix, spec);
    const auto train = learn::upsample_minority(split.train, derive_seed(42, "upsample"));

    SignalRun out;
    const std::vector<std::uint8_t> all_positive(split.test.n_rows, 1);
    out.baseline = eval::classification_report(split.test.labels, all_positive).positive.f1;

    auto f1_of = [&](const learn::Predictions& pred) {
        return eval::classification_report(split.test.labels, pred.labels).positive.f1;
    };
    out.lr = f1_of(learn::logistic_predict(learn::train_logistic(train), split.test));
    out.knn = f1_of(learn::knn_predict(learn::train_knn(train), split.test));
    out.svm = f1_of(learn::svm_predict(learn::train_svm(train), split.test));
    return out;
}

Outcome planted_signal_recovery() {
    const auto start = SteadyClock::now();
    const SignalRun strong = run_signal(1.0);
    const SignalRun flat = run_signal(0.0);
    const double elapsed = seconds_since(start);

    const bool strong_ok = strong.lr >= strong.baseline + 0.2 &&
                           strong.knn >= strong.baseline + 0.2 &&
                           strong.svm >= strong.baseline + 0.2;
    const bool flat_ok = std::fabs(flat.lr - flat.baseline) <= 0.05 &&
                         std::fabs(flat.knn - flat.baseline) <= 0.05 &&
                         std::fabs(flat.svm - flat.baseline) <= 0.05;
    const bool ok = strong_ok && flat_ok && elapsed < 60.0;
    return {ok, "signal 1: lr/knn/svm F1 " + fmt(strong.lr) + "/" + fmt(strong.knn) + "/" +
                    fmt(strong.svm) + " vs baseline " + fmt(strong.baseline) + "; signal 0: " +
                    fmt(flat.lr) + "/" + fmt(flat.knn) + "/" + fmt(flat.svm) + " vs " +
                    fmt(flat.baseline) + "; " + fmt(elapsed) + "s"};
}

// ---- criterion 5 -----------------------------------------------------------

Outcome gradient_check() {
    Rng rng(20250816);
    double max_rel = 0.0;
    const double h = 1e-5;
    for (int point = 0; point < 25; ++point) {
        features::FeatureMatrix data;
        data.n_rows = 40;
        for (std::size_t i = 0; i < data.n_rows; ++i) {
            for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
                data.data.push_back(rng.next_double());
            }
            data.labels.push_back(rng.next_double() < 0.4 ? 1 : 0);
        }

        learn::WeightVector w;
        for (auto& v : w) v = rng.uniform(-1.0, 1.0);
        const double b = rng.uniform(-1.0, 1.0);
        const double l2 = 0.01;

        learn::WeightVector grad;
        double grad_b = 0.0;
        learn::logistic_gradient(w, b, data, l2, grad, grad_b);

        auto update = [&](double analytic, double fd) {
            const double rel = std::fabs(analytic - fd) / std::max(std::fabs(fd), 1e-8);
            max_rel = std::max(max_rel, rel);
        };
        for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
            learn::WeightVector lo = w, hi = w;
            lo[j] -= h;
            hi[j] += h;
            update(grad[j], (learn::logistic_loss(hi, b, data, l2) -
                             learn::logistic_loss(lo, b, data, l2)) /
                                (2.0 * h));
        }
        update(grad_b, (learn::logistic_loss(w, b + h, data, l2) -
                        learn::logistic_loss(w, b - h, data, l2)) /
                           (2.0 * h));
    }
    return {max_rel < 1e-4, "25 points, max relative error " + fmt(max_rel)};
}

// ---- criterion 6 -----------------------------------------------------------

Outcome eval_fixture() {
    const std::vector<std::uint8_t> truth = {1, 1, 1, 1, 0, 0, 0, 0, 0, 0};
    const std::vector<std::uint8_t> pred = {1, 1, 1, 0, 0, 0, 0, 0, 1, 1};
    const auto report = eval::classification_report(truth, pred);
    const bool report_ok = report.matrix.tp == 3 && report.matrix.fn == 1 &&
                           report.matrix.fp == 2 && report.matrix.tn == 4 &&
                           std::fabs(report.positive.precision - 0.6) < 1e-12 &&
                           std::fabs(report.positive.recall - 0.75) < 1e-12 &&
                           std::fabs(report.positive.f1 - 0.6667) < 1e-4 &&
                           std::fabs(report.accuracy - 0.7) < 1e-12;

    const std::vector<std::uint8_t> labels = {0, 0, 1, 1};
    const double perfect = eval::auc(eval::roc_points(labels, {0.1, 0.2, 0.8, 0.9}));
    const double anti = eval::auc(eval::roc_points(labels, {0.9, 0.8, 0.2, 0.1}));
    const double tied = eval::auc(eval::roc_points(labels, {0.5, 0.5, 0.5, 0.5}));
    const bool auc_ok = perfect == 1.0 && anti == 0.0 && tied == 0.5;

    return {report_ok && auc_ok, "precision=" + fmt(report.positive.precision) + ", recall=" +
                                     fmt(report.positive.recall) + ", f1=" +
                                     fmt(report.positive.f1) + ", auc " + fmt(perfect) + "/" +
                                     fmt(anti) + "/" + fmt(tied)};
}

// ---- criterion 7 -----------------------------------------------------------

class CrashAfter : public ingest::ScoreProvider {
  public:
    CrashAfter(ingest::ScoreProvider& inner, std::size_t allowed)
        : inner_(inner), allowed_(allowed) {}
    ingest::FetchResult fetch(const std::string& user_id) override {
        if (served_ == allowed_) throw std::runtime_error("simulated kill");
        ++served_;
        return inner_.fetch(user_id);
    }

  private:
    ingest::ScoreProvider& inner_;
    std::size_t allowed_;
    std::size_t served_ = 0;
};

Outcome harvester_contract() {
    std::vector<std::string> users;
    users.reserve(1000);
    for (int i = 0; i < 1000; ++i) users.push_back("user" + std::to_string(i));

    testutil::TempDir dir;
    ScoreStore uninterrupted;
    double elapsed = 0.0;
    std::size_t worst_window = 0;
    {
        ingest::SimulatedClock clock;
        ingest::HashScoreProvider provider(42);
        ingest::HarvestCheckpoint checkpoint(dir.file("full.jsonl"));
        ingest::HarvestReport report;
        uninterrupted =
            ingest::harvest_scores(users, provider, 10.0, checkpoint, clock, {}, &report);
        elapsed = clock.now();
        for (std::size_t i = 0; i < report.issue_times.size(); ++i) {
            std::size_t in_window = 0;
            for (std::size_t j = i; j < report.issue_times.size(); ++j) {
                if (report.issue_times[j] < report.issue_times[i] + 1.0 - 1e-6) ++in_window;
                else break;
            }
            worst_window = std::max(worst_window, in_window);
        }
    }

    const std::string crash_path = dir.file("crash.jsonl");
    {
        ingest::SimulatedClock clock;
        ingest::HashScoreProvider inner(42);
        CrashAfter provider(inner, 500);
        ingest::HarvestCheckpoint checkpoint(crash_path);
        try {
            ingest::harvest_scores(users, provider, 10.0, checkpoint, clock);
            return {false, "kill at 500 never fired"};
        } catch (const std::runtime_error&) {
        }
    }
    ScoreStore resumed;
    {
        ingest::SimulatedClock clock;
        ingest::HashScoreProvider provider(42);
        ingest::HarvestCheckpoint checkpoint(crash_path);
        resumed = ingest::harvest_scores(users, provider, 10.0, checkpoint, clock);
    }

    // 999 gaps of 0.1 accumulate to 99.9 only up to double rounding.
    const bool ok = uninterrupted.size() == 1000 && elapsed >= 99.9 - 1e-6 &&
                    worst_window <= 10 && resumed == uninterrupted;
    return {ok, "1000 users in " + fmt(elapsed) + "s simulated, worst 1s window " +
                    std::to_string(worst_window) + ", resume " +
                    (resumed == uninterrupted ? "identical" : "DIVERGED")};
}

// ---- criterion 8 -----------------------------------------------------------

Outcome report_determinism() {
    testutil::TempDir dir;
    synth::SynthConfig synth_config;
    synth_config.n_articles = 2000;
    synth_config.seed = 42;
    synth::write_dataset(dir.file("data"), synth::generate_dataset(synth_config));

    pipeline::ReportConfig config;
    config.articles_path = dir.file("data") + "/articles.jsonl";
    config.scores_path = dir.file("data") + "/scores.csv";
    config.seed = 42;
    config.out_dir = dir.file("run1");
    pipeline::run_report(config);
    config.out_dir = dir.file("run2");
    pipeline::run_report(config);

    std::vector<std::string> mismatched;
    for (const char* name : {"report.json", "labeled.csv", "groups.csv", "correlation.csv",
                             "roc_lr.csv", "roc_knn.csv", "roc_svm.csv", "ztest.json"}) {
        if (testutil::read_text(dir.file("run1") + "/" + name) !=
            testutil::read_text(dir.file("run2") + "/" + name)) {
            mismatched.push_back(name);
        }
    }
    if (mismatched.empty()) return {true, "8 artifacts byte-identical across reruns"};
    std::string detail = "differs:";
    for (const auto& name : mismatched) detail += " " + name;
    return {false, detail};
}

// ---- criterion 9 -----------------------------------------------------------

Outcome property_suites() {
    const std::vector<std::pair<const char*, std::vector<std::string>>> results = {
        {"score monotonicity", proptest::check_score_monotonicity(201)},
        {"median invariance", proptest::check_median_invariance(202)},
        {"threshold monotonicity", proptest::check_threshold_monotonicity(203)},
        {"upsampling conservation", proptest::check_upsample_conservation(204)},
        {"z-test antisymmetry", proptest::check_ztest_antisymmetry(205)},
        {"auc transform invariance", proptest::check_auc_invariance(206)},
        {"knn translation invariance", proptest::check_knn_translation_invariance(207)},
    };
    std::string failing;
    for (const auto& [name, violations] : results) {
        if (!violations.empty()) {
            failing += std::string(" ") + name + " [" + violations.front() + "]";
        }
    }
    if (failing.empty()) {
        return {true, "7 suites x " + std::to_string(proptest::kDefaultCases) + " cases"};
    }
    return {false, "violations:" + failing};
}

}  // namespace

int main() {
    int failures = 0;
    failures += run(1, "z-test reproduction", ztest_reproduction);
    failures += run(2, "spam ratio reproduction", ratio_reproduction);
    failures += run(3, "normalization endpoints", normalization_endpoints);
    failures += run(4, "planted signal recovery", planted_signal_recovery);
    failures += run(5, "logistic gradient check", gradient_check);
    failures += run(6, "evaluation fixtures", eval_fixture);
    failures += run(7, "harvester contract", harvester_contract);
    failures += run(8, "report determinism", report_determinism);
    failures += run(9, "invariant suites", property_suites);

    if (failures == 0) {
        std::cout << "all 9 acceptance criteria passed\n";
        return 0;
    }
    std::cout << failures << " acceptance criterion(s) failed\n";
    return 1;
}
