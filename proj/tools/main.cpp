#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "botamp/errors.hpp"
#include "botamp/pipeline.hpp"
#include "botamp/stats.hpp"

namespace {

botamp::ingest::FileFormat resolve_format(const std::string& format, const std::string& path) {
    if (format == "csv") return botamp::ingest::FileFormat::csv;
    if (format == "jsonl") return botamp::ingest::FileFormat::jsonl;
    return botamp::ingest::detect_format(path);
}

botamp::stats::GroupKey group_key_from_string(const std::string& by) {
    if (by == "discipline") return botamp::stats::GroupKey::discipline;
    if (by == "location") return botamp::stats::GroupKey::author_location;
    if (by == "partition") return botamp::stats::GroupKey::health_partition;
    throw botamp::ConfigError("unknown grouping: " + by);
}

void require_exists(const std::string& path, const char* what) {
    if (!std::filesystem::exists(path)) {
        throw botamp::ConfigError(std::string(what) + " not found: " + path);
    }
}

}  // namespace

int main(int argc, char** argv) {
    using namespace botamp;

    CLI::App app{"Bot-amplification labeling, training, and reporting pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", pipeline::kVersion);
    app.set_config("--config", "",
                   "Flat key=value config file; command-line flags override file values, file "
                   "values override defaults");

    // score
    std::string score_scores, score_out, score_format = "auto";
    auto* score_cmd = app.add_subcommand("score", "Sum per-user metrics into bot scores");
    score_cmd->add_option("--scores", score_scores, "Score file (csv or jsonl)")
        ->required()
        ->check(CLI::ExistingFile);
    score_cmd->add_option("--format", score_format, "Input format")
        ->check(CLI::IsMember({"auto", "csv", "jsonl"}))
        ->capture_default_str();
    score_cmd->add_option("--out", score_out, "Output CSV (user_id,score)")->required();

    // label
    std::string label_articles, label_scores, label_out;
    double label_threshold = 20.0;
    auto* label_cmd =
        app.add_subcommand("label", "Label articles by median tweeter bot score");
    label_cmd->add_option("--articles", label_articles, "Article file (jsonl or csv)")
        ->required()
        ->check(CLI::ExistingFile);
    label_cmd->add_option("--scores", label_scores, "Score file")
        ->required()
        ->check(CLI::ExistingFile);
    label_cmd->add_option("--threshold", label_threshold, "Overall-score threshold")
        ->capture_default_str();
    label_cmd->add_option("--out", label_out, "Output labeled CSV")->required();

    // shared model knobs
    pipeline::TrainConfig train_cfg;
    std::string train_model = "lr", train_out;
    bool train_unstratified = false;
    auto* train_cmd = app.add_subcommand("train", "Train a classifier on a labeled file");
    train_cmd->add_option("--labeled", train_cfg.labeled_path, "Labeled CSV")
        ->required()
        ->check(CLI::ExistingFile);
    train_cmd->add_option("--model", train_model, "Model kind")
        ->check(CLI::IsMember({"lr", "knn", "svm"}))
        ->capture_default_str();
    train_cmd->add_option("--out", train_out, "Output model JSON")->required();
    train_cmd->add_option("--fraction", train_cfg.train_fraction, "Train fraction")
        ->capture_default_str();
    train_cmd->add_option("--seed", train_cfg.seed, "Master seed")->capture_default_str();
    train_cmd->add_flag("--unstratified", train_unstratified, "Disable stratified splitting");
    train_cmd->add_flag("--resample-before-split", train_cfg.resample_before_split,
                        "Upsample before splitting (leaks duplicates into the test set)");
    train_cmd->add_option("--k", train_cfg.knn_k, "Neighbor count (knn)")->capture_default_str();
    train_cmd->add_option("--lr-rate", train_cfg.lr.learning_rate, "Learning rate (lr)")
        ->capture_default_str();
    train_cmd->add_option("--lr-epochs", train_cfg.lr.max_epochs, "Max epochs (lr)")
        ->capture_default_str();
    train_cmd->add_option("--lr-tol", train_cfg.lr.tolerance, "Stop tolerance (lr)")
        ->capture_default_str();
    train_cmd->add_option("--lr-l2", train_cfg.lr.l2, "L2 strength (lr)")->capture_default_str();
    train_cmd->add_option("--svm-step", train_cfg.svm.step, "Initial step (svm)")
        ->capture_default_str();
    train_cmd->add_option("--svm-epochs", train_cfg.svm.epochs, "Epochs (svm)")
        ->capture_default_str();
    train_cmd->add_option("--svm-l2", train_cfg.svm.l2, "L2 strength (svm)")
        ->capture_default_str();

    // eval
    std::string eval_labeled, eval_model, eval_out_dir;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a labeled file");
    eval_cmd->add_option("--labeled", eval_labeled, "Labeled CSV")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--model-file", eval_model, "Model JSON from train")
        ->required()
        ->check(CLI::ExistingFile);
    eval_cmd->add_option("--out-dir", eval_out_dir, "Output directory")->required();

    // ztest
    std::string ztest_labeled, ztest_out;
    std::uint64_t zx1 = 0, zn1 = 0, zx2 = 0, zn2 = 0;
    auto* ztest_cmd = app.add_subcommand(
        "ztest", "Two-proportion z-test of spam ratios (health vs other, or raw counts)");
    auto* zl = ztest_cmd->add_option("--labeled", ztest_labeled, "Labeled CSV")
                   ->check(CLI::ExistingFile);
    auto* zx1o = ztest_cmd->add_option("--x1", zx1, "Successes in group 1")->excludes(zl);
    ztest_cmd->add_option("--n1", zn1, "Size of group 1")->needs(zx1o);
    ztest_cmd->add_option("--x2", zx2, "Successes in group 2")->needs(zx1o);
    ztest_cmd->add_option("--n2", zn2, "Size of group 2")->needs(zx1o);
    ztest_cmd->add_option("--out", ztest_out, "Output ztest.json (optional)");

    // summarize
    std::string sum_labeled, sum_by = "partition", sum_out;
    auto* sum_cmd = app.add_subcommand("summarize", "Group spam ratios and median scores");
    sum_cmd->add_option("--labeled", sum_labeled, "Labeled CSV")
        ->required()
        ->check(CLI::ExistingFile);
    sum_cmd->add_option("--by", sum_by, "Grouping key")
        ->check(CLI::IsMember({"discipline", "location", "partition"}))
        ->capture_default_str();
    sum_cmd->add_option("--out", sum_out, "Output groups CSV")->required();

    // synth
    synth::SynthConfig synth_cfg;
    std::string synth_out;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a deterministic synthetic dataset");
    synth_cmd->add_option("--n", synth_cfg.n_articles, "Article count")->capture_default_str();
    synth_cmd->add_option("--seed", synth_cfg.seed, "Seed")->capture_default_str();
    synth_cmd->add_option("--prevalence", synth_cfg.spam_prevalence, "Target spam prevalence")
        ->capture_default_str();
    synth_cmd->add_option("--health-share", synth_cfg.health_share, "Health-discipline share")
        ->capture_default_str();
    synth_cmd->add_option("--signal", synth_cfg.signal_strength, "Planted signal strength")
        ->capture_default_str();
    synth_cmd->add_option("--tweets-mean", synth_cfg.tweets_mean, "Mean tweets per article")
        ->capture_default_str();
    synth_cmd->add_option("--log-mean", synth_cfg.altmetric_log_mean, "Altmetric log-mean")
        ->capture_default_str();
    synth_cmd->add_option("--log-sd", synth_cfg.altmetric_log_sd, "Altmetric log-sd")
        ->capture_default_str();
    synth_cmd->add_option("--tolerance", synth_cfg.prevalence_tolerance, "Prevalence tolerance")
        ->capture_default_str();
    synth_cmd->add_option("--out", synth_out, "Output directory")->required();

    // harvest
    pipeline::HarvestConfig harvest_cfg;
    auto* harvest_cmd =
        app.add_subcommand("harvest", "Fetch per-user scores with rate limiting and checkpointing");
    harvest_cmd->add_option("--users", harvest_cfg.users_path, "File with one user id per line")
        ->required()
        ->check(CLI::ExistingFile);
    harvest_cmd->add_option("--limit", harvest_cfg.limit, "Requests per second")
        ->capture_default_str();
    harvest_cmd->add_option("--checkpoint", harvest_cfg.checkpoint_path, "Checkpoint JSONL path")
        ->required();
    harvest_cmd->add_option("--out", harvest_cfg.out_path, "Output scores CSV")->required();
    harvest_cmd->add_option("--provider", harvest_cfg.provider, "Score provider")
        ->check(CLI::IsMember({"hash", "file"}))
        ->capture_default_str();
    harvest_cmd->add_option("--provider-file", harvest_cfg.provider_file,
                            "Score file backing the file provider");
    harvest_cmd->add_option("--provider-seed", harvest_cfg.provider_seed,
                            "Seed for the hash provider")
        ->capture_default_str();
    harvest_cmd->add_flag("--simulated-clock", harvest_cfg.simulated_clock,
                          "Run on a simulated clock (no real waiting)");
    harvest_cmd->add_option("--retry-initial", harvest_cfg.retry.initial_backoff,
                            "Initial backoff seconds")
        ->capture_default_str();
    harvest_cmd->add_option("--retry-factor", harvest_cfg.retry.factor, "Backoff factor")
        ->capture_default_str();
    harvest_cmd->add_option("--retry-attempts", harvest_cfg.retry.max_attempts, "Max attempts")
        ->capture_default_str();

    // report
    pipeline::ReportConfig report_cfg;
    std::string report_in;
    bool report_unstratified = false;
    auto* report_cmd =
        app.add_subcommand("report", "Full pipeline: label, split, train, evaluate, test");
    report_cmd->add_option("--in", report_in,
                           "Input directory holding articles.jsonl and scores.csv");
    report_cmd->add_option("--articles", report_cfg.articles_path, "Article file (overrides --in)");
    report_cmd->add_option("--scores", report_cfg.scores_path, "Score file (overrides --in)");
    report_cmd->add_option("--out", report_cfg.out_dir, "Output directory")->required();
    report_cmd->add_option("--threshold", report_cfg.threshold, "Overall-score threshold")
        ->capture_default_str();
    report_cmd->add_option("--fraction", report_cfg.train_fraction, "Train fraction")
        ->capture_default_str();
    report_cmd->add_option("--seed", report_cfg.seed, "Master seed")->capture_default_str();
    report_cmd->add_flag("--unstratified", report_unstratified, "Disable stratified splitting");
    report_cmd->add_flag("--resample-before-split", report_cfg.resample_before_split,
                         "Upsample before splitting (leaks duplicates into the test set)");
    report_cmd->add_option("--k", report_cfg.knn_k, "Neighbor count")->capture_default_str();
    report_cmd->add_option("--rounds", report_cfg.bootstrap_rounds, "Bootstrap rounds")
        ->capture_default_str();
    report_cmd->add_option("--lr-rate", report_cfg.lr.learning_rate, "Learning rate (lr)")
        ->capture_default_str();
    report_cmd->add_option("--lr-epochs", report_cfg.lr.max_epochs, "Max epochs (lr)")
        ->capture_default_str();
    report_cmd->add_option("--lr-tol", report_cfg.lr.tolerance, "Stop tolerance (lr)")
        ->capture_default_str();
    report_cmd->add_option("--lr-l2", report_cfg.lr.l2, "L2 strength (lr)")->capture_default_str();
    report_cmd->add_option("--svm-step", report_cfg.svm.step, "Initial step (svm)")
        ->capture_default_str();
    report_cmd->add_option("--svm-epochs", report_cfg.svm.epochs, "Epochs (svm)")
        ->capture_default_str();
    report_cmd->add_option("--svm-l2", report_cfg.svm.l2, "L2 strength (svm)")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        nlohmann::json fragment;
        if (app.got_subcommand(score_cmd)) {
            fragment = pipeline::run_score(score_scores, resolve_format(score_format, score_scores),
                                           score_out);
        } else if (app.got_subcommand(label_cmd)) {
            fragment = pipeline::run_label(label_articles, label_scores, label_threshold, label_out);
        } else if (app.got_subcommand(train_cmd)) {
            train_cfg.kind = pipeline::model_kind_from_string(train_model);
            train_cfg.stratified = !train_unstratified;
            fragment = pipeline::run_train(train_cfg, train_out);
        } else if (app.got_subcommand(eval_cmd)) {
            fragment = pipeline::run_eval(eval_labeled, eval_model, eval_out_dir);
        } else if (app.got_subcommand(ztest_cmd)) {
            if (!ztest_labeled.empty()) {
                fragment = pipeline::run_ztest_labeled(ztest_labeled, ztest_out);
            } else if (zx1o->count() > 0) {
                fragment = pipeline::run_ztest_counts(zx1, zn1, zx2, zn2, ztest_out);
            } else {
                throw ConfigError("ztest needs either --labeled or --x1/--n1/--x2/--n2");
            }
        } else if (app.got_subcommand(sum_cmd)) {
            fragment = pipeline::run_summarize(sum_labeled, group_key_from_string(sum_by), sum_out);
        } else if (app.got_subcommand(synth_cmd)) {
            fragment = pipeline::run_synth(synth_cfg, synth_out);
        } else if (app.got_subcommand(harvest_cmd)) {
            fragment = pipeline::run_harvest(harvest_cfg);
        } else if (app.got_subcommand(report_cmd)) {
            if (!report_in.empty()) {
                const std::filesystem::path in(report_in);
                if (report_cfg.articles_path.empty()) {
                    report_cfg.articles_path = (in / "articles.jsonl").string();
                }
                if (report_cfg.scores_path.empty()) {
                    report_cfg.scores_path = (in / "scores.csv").string();
                }
            }
            if (report_cfg.articles_path.empty() || report_cfg.scores_path.empty()) {
                throw ConfigError("report needs --in or both --articles and --scores");
            }
            require_exists(report_cfg.articles_path, "article file");
            require_exists(report_cfg.scores_path, "score file");
            report_cfg.stratified = !report_unstratified;
            fragment = pipeline::run_report(report_cfg);
        }
        std::cout << fragment.dump(2) << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return 3;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
