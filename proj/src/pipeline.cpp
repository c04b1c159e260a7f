#include "botamp/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>

#include "botamp/csv.hpp"
#include "botamp/errors.hpp"
#include "botamp/eval.hpp"
#include "botamp/features.hpp"
#include "botamp/rng.hpp"
#include "botamp/scoring.hpp"

namespace botamp::pipeline {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

void write_json_file(const std::string& path, const json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("write failed: " + path);
}

json read_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError("invalid JSON: " + path);
    return j;
}

json reject_summary(const ingest::ParseReport& report) {
    json j;
    j["rows_in"] = report.rows_in;
    j["accepted"] = report.accepted;
    j["rejected"] = report.rejects.size();
    if (report.duplicate_overwrites > 0) j["duplicate_overwrites"] = report.duplicate_overwrites;
    return j;
}

json ztest_json(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2) {
    const stats::ZTestResult r = stats::two_proportion_ztest(x1, n1, x2, n2);
    json j;
    j["x1"] = x1;
    j["n1"] = n1;
    j["x2"] = x2;
    j["n2"] = n2;
    j["p1"] = r.p1;
    j["p2"] = r.p2;
    j["pooled"] = r.pooled;
    j["z"] = r.z;
    j["p_two_tailed"] = r.p_two_tailed;
    j["underflow"] = r.underflow;
    return j;
}

json group_json(const stats::GroupSummary& g) {
    return json{{"key", g.key},
                {"n", g.n_articles},
                {"n_spammed", g.n_spammed},
                {"ratio", g.ratio},
                {"median_score", g.median_overall_score}};
}

const stats::GroupSummary& find_group(const std::vector<stats::GroupSummary>& groups,
                                      const char* key) {
    for (const auto& g : groups) {
        if (g.key == key) return g;
    }
    throw ValidationError(std::string("labeled data has no \"") + key + "\" partition rows");
}

std::vector<LabeledArticle> read_labeled(const std::string& path) {
    auto labeled = scoring::read_labeled_csv(path);
    if (labeled.empty()) throw ValidationError("labeled file has no rows: " + path);
    return labeled;
}

struct PreparedData {
    features::FeatureEncoder encoder;
    features::FeatureMatrix train;  // upsampled
    features::FeatureMatrix test;
    std::size_t train_rows_before_upsample = 0;
};

PreparedData prepare(const std::vector<LabeledArticle>& labeled, double fraction, bool stratified,
                     bool resample_before_split, std::uint64_t seed) {
    PreparedData out;
    out.encoder.fit(labeled);
    features::FeatureMatrix matrix = out.encoder.transform(labeled);

    const learn::SplitSpec spec{fraction, derive_seed(seed, "split"), stratified};
    const std::uint64_t upsample_seed = derive_seed(seed, "upsample");
    if (resample_before_split) {
        matrix = learn::upsample_minority(matrix, upsample_seed);
        auto split = learn::split_train_test(matrix, spec);
        out.train_rows_before_upsample = split.train.n_rows;
        out.train = std::move(split.train);
        out.test = std::move(split.test);
    } else {
        auto split = learn::split_train_test(matrix, spec);
        out.train_rows_before_upsample = split.train.n_rows;
        out.train = learn::upsample_minority(split.train, upsample_seed);
        out.test = std::move(split.test);
    }
    return out;
}

json fingerprints_json(const features::FeatureEncoder& encoder) {
    json j;
    for (std::size_t c = 0; c < features::kFeatureCount; ++c) {
        if (c == features::kAltmetricColumn) continue;
        j[features::kFeatureNames[c]] = encoder.vocabulary(c).fingerprint();
    }
    return j;
}

json evaluate_model(const features::FeatureMatrix& test, const learn::Predictions& pred,
                    const std::string& roc_path) {
    const eval::Report report = eval::classification_report(test.labels, pred.labels);
    const auto roc = eval::roc_points(test.labels, pred.scores);
    eval::write_roc_csv(roc_path, roc);
    json j;
    j["report"] = eval::report_to_json(report);
    j["auc"] = eval::auc(roc);
    j["roc_csv"] = fs::path(roc_path).filename().string();
    return j;
}

const char* model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::lr: return "lr";
        case ModelKind::knn: return "knn";
        default: return "svm";
    }
}

}  // namespace

ModelKind model_kind_from_string(const std::string& name) {
    if (name == "lr") return ModelKind::lr;
    if (name == "knn") return ModelKind::knn;
    if (name == "svm") return ModelKind::svm;
    throw ConfigError("unknown model kind: " + name + " (expected lr, knn, or svm)");
}

nlohmann::json run_score(const std::string& scores_path, ingest::FileFormat format,
                         const std::string& out_path) {
    const auto parsed = ingest::parse_scores(scores_path, format);
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + out_path);
    out << csv::encode_row({"user_id", "score"});
    for (const auto& [user, metrics] : parsed.store) {
        out << csv::encode_row({user, csv::format_double(scoring::user_bot_score(metrics))});
    }
    if (!out) throw IoError("write failed: " + out_path);

    json j;
    j["users"] = parsed.store.size();
    j["parse"] = reject_summary(parsed.report);
    j["out"] = out_path;
    return j;
}

nlohmann::json run_label(const std::string& articles_path, const std::string& scores_path,
                         double threshold, const std::string& out_path) {
    const auto articles = ingest::parse_articles(articles_path, ingest::detect_format(articles_path));
    const auto scores = ingest::parse_scores(scores_path, ingest::detect_format(scores_path));

    scoring::LabelingReport label_report;
    const auto labeled =
        scoring::label_articles(articles.records, scores.store, threshold, &label_report);
    scoring::write_labeled_csv(out_path, labeled);

    std::size_t spammed = 0;
    for (const auto& a : labeled) spammed += a.is_spammed;

    json j;
    j["threshold"] = threshold;
    j["articles"] = reject_summary(articles.report);
    j["scores"] = reject_summary(scores.report);
    j["labeled"] = label_report.articles_out;
    j["spammed"] = spammed;
    j["tweeters_without_scores"] = label_report.tweeters_without_scores;
    j["out"] = out_path;
    return j;
}

nlohmann::json run_train(const TrainConfig& config, const std::string& model_out) {
    const auto labeled = read_labeled(config.labeled_path);
    PreparedData data = prepare(labeled, config.train_fraction, config.stratified,
                                config.resample_before_split, config.seed);

    json bundle;
    bundle["version"] = kVersion;
    bundle["kind"] = model_kind_name(config.kind);
    bundle["seed"] = config.seed;
    bundle["train_fraction"] = config.train_fraction;
    bundle["stratified"] = config.stratified;
    bundle["resample_before_split"] = config.resample_before_split;
    bundle["encoder"] = data.encoder.to_json();
    bundle["fingerprints"] = fingerprints_json(data.encoder);

    learn::Predictions pred;
    switch (config.kind) {
        case ModelKind::lr: {
            const auto model = learn::train_logistic(data.train, config.lr);
            bundle["hyper"] = {{"learning_rate", config.lr.learning_rate},
                               {"max_epochs", config.lr.max_epochs},
                               {"tolerance", config.lr.tolerance},
                               {"l2", config.lr.l2}};
            bundle["model"] = learn::logistic_to_json(model);
            pred = learn::logistic_predict(model, data.test);
            break;
        }
        case ModelKind::knn: {
            const auto model = learn::train_knn(data.train, config.knn_k);
            bundle["hyper"] = {{"k", config.knn_k}};
            bundle["model"] = learn::knn_to_json(model);
            pred = learn::knn_predict(model, data.test);
            break;
        }
        case ModelKind::svm: {
            const auto model = learn::train_svm(data.train, config.svm);
            bundle["hyper"] = {{"step", config.svm.step},
                               {"epochs", config.svm.epochs},
                               {"l2", config.svm.l2}};
            bundle["model"] = learn::svm_to_json(model);
            pred = learn::svm_predict(model, data.test);
            break;
        }
    }
    write_json_file(model_out, bundle);

    const eval::Report report = eval::classification_report(data.test.labels, pred.labels);
    json j;
    j["kind"] = model_kind_name(config.kind);
    j["rows"] = labeled.size();
    j["train_rows"] = data.train.n_rows;
    j["train_rows_before_upsample"] = data.train_rows_before_upsample;
    j["test_rows"] = data.test.n_rows;
    j["report"] = eval::report_to_json(report);
    j["model_file"] = model_out;
    return j;
}

nlohmann::json run_eval(const std::string& labeled_path, const std::string& model_path,
                        const std::string& out_dir) {
    const auto labeled = read_labeled(labeled_path);
    const json bundle = read_json_file(model_path);
    if (!bundle.is_object() || !bundle.contains("encoder") || !bundle.contains("model") ||
        !bundle.contains("kind")) {
        throw ValidationError("model file lacks kind/encoder/model: " + model_path);
    }

    const auto encoder = features::FeatureEncoder::from_json(bundle["encoder"]);
    const features::FeatureMatrix matrix = encoder.transform(labeled);

    learn::Predictions pred;
    const ModelKind kind = model_kind_from_string(bundle["kind"].get<std::string>());
    switch (kind) {
        case ModelKind::lr:
            pred = learn::logistic_predict(learn::logistic_from_json(bundle["model"]), matrix);
            break;
        case ModelKind::knn:
            pred = learn::knn_predict(learn::knn_from_json(bundle["model"]), matrix);
            break;
        case ModelKind::svm:
            pred = learn::svm_predict(learn::svm_from_json(bundle["model"]), matrix);
            break;
    }

    fs::create_directories(out_dir);
    const std::string roc_path =
        (fs::path(out_dir) / (std::string("roc_") + model_kind_name(kind) + ".csv")).string();
    json j;
    j["kind"] = model_kind_name(kind);
    j["rows"] = matrix.n_rows;
    j.update(evaluate_model(matrix, pred, roc_path));
    write_json_file((fs::path(out_dir) / "eval.json").string(), j);
    return j;
}

nlohmann::json run_ztest_counts(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2,
                                const std::string& out_path) {
    const json j = ztest_json(x1, n1, x2, n2);
    if (!out_path.empty()) write_json_file(out_path, j);
    return j;
}

nlohmann::json run_ztest_labeled(const std::string& labeled_path, const std::string& out_path) {
    const auto labeled = read_labeled(labeled_path);
    const auto groups = stats::group_spam_ratio(labeled, stats::GroupKey::health_partition);
    const auto& health = find_group(groups, "health");
    const auto& other = find_group(groups, "other");

    json j = ztest_json(health.n_spammed, health.n_articles, other.n_spammed, other.n_articles);
    j["health"] = group_json(health);
    j["other"] = group_json(other);
    j["all"] = group_json(find_group(groups, "all"));
    if (!out_path.empty()) write_json_file(out_path, j);
    return j;
}

nlohmann::json run_summarize(const std::string& labeled_path, stats::GroupKey key,
                             const std::string& out_path) {
    const auto labeled = read_labeled(labeled_path);
    const auto groups = stats::group_spam_ratio(labeled, key);
    stats::write_groups_csv(out_path, groups);

    json rows = json::array();
    for (const auto& g : groups) rows.push_back(group_json(g));
    json j;
    j["groups"] = rows;
    j["out"] = out_path;
    return j;
}

nlohmann::json run_synth(const synth::SynthConfig& config, const std::string& out_dir) {
    const auto dataset = synth::generate_dataset(config);
    synth::write_dataset(out_dir, dataset);

    json truth;
    truth["config"] = {{"n_articles", config.n_articles},
                       {"seed", config.seed},
                       {"spam_prevalence", config.spam_prevalence},
                       {"health_share", config.health_share},
                       {"altmetric_log_mean", config.altmetric_log_mean},
                       {"altmetric_log_sd", config.altmetric_log_sd},
                       {"tweets_mean", config.tweets_mean},
                       {"signal_strength", config.signal_strength}};
    truth["ground_truth"] = dataset.ground_truth;
    truth["feature_columns"] = features::kFeatureNames;
    truth["health_gap"] = dataset.health_gap;
    truth["base_logit"] = dataset.base_logit;
    truth["realized_prevalence"] = dataset.realized_prevalence;
    truth["realized_health_share"] = dataset.realized_health_share;
    truth["user_score_p75"] = dataset.user_score_p75;
    truth["user_score_max"] = dataset.user_score_max;
    write_json_file((fs::path(out_dir) / "truth.json").string(), truth);

    json j;
    j["articles"] = dataset.articles.size();
    j["users"] = dataset.scores.size();
    j["realized_prevalence"] = dataset.realized_prevalence;
    j["realized_health_share"] = dataset.realized_health_share;
    j["out"] = out_dir;
    return j;
}

nlohmann::json run_harvest(const HarvestConfig& config) {
    std::ifstream in(config.users_path, std::ios::binary);
    if (!in) throw IoError("cannot open: " + config.users_path);
    std::vector<std::string> users;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string id = csv::trim(line);
        if (!id.empty()) users.push_back(std::move(id));
    }

    std::unique_ptr<ingest::ScoreProvider> provider;
    if (config.provider == "hash") {
        provider = std::make_unique<ingest::HashScoreProvider>(config.provider_seed);
    } else if (config.provider == "file") {
        if (config.provider_file.empty()) {
            throw ConfigError("provider \"file\" requires --provider-file");
        }
        provider = std::make_unique<ingest::FileScoreProvider>(
            ingest::parse_scores(config.provider_file, ingest::detect_format(config.provider_file))
                .store);
    } else {
        throw ConfigError("unknown provider: " + config.provider + " (expected hash or file)");
    }

    std::unique_ptr<ingest::Clock> clock;
    if (config.simulated_clock) clock = std::make_unique<ingest::SimulatedClock>();
    else clock = std::make_unique<ingest::SystemClock>();

    ingest::HarvestCheckpoint checkpoint(config.checkpoint_path);
    ingest::HarvestReport report;
    const ScoreStore store = ingest::harvest_scores(users, *provider, config.limit, checkpoint,
                                                    *clock, config.retry, &report);
    ingest::write_scores_csv(config.out_path, store);

    json failures = json::array();
    for (const auto& [user, message] : report.failures) {
        failures.push_back({{"user_id", user}, {"message", message}});
    }
    json j;
    j["requested"] = report.requested;
    j["already_done"] = report.already_done;
    j["fetched"] = report.fetched;
    j["issued_requests"] = report.issue_times.size();
    j["elapsed_seconds"] = clock->now();
    j["failures"] = failures;
    j["users_total"] = store.size();
    j["out"] = config.out_path;
    return j;
}

nlohmann::json run_report(const ReportConfig& config) {
    fs::create_directories(config.out_dir);
    const fs::path out_dir(config.out_dir);

    const auto articles =
        ingest::parse_articles(config.articles_path, ingest::detect_format(config.articles_path));
    const auto scores =
        ingest::parse_scores(config.scores_path, ingest::detect_format(config.scores_path));

    scoring::LabelingReport label_report;
    const auto labeled =
        scoring::label_articles(articles.records, scores.store, config.threshold, &label_report);
    if (labeled.empty()) throw ValidationError("no labeled articles to model");
    scoring::write_labeled_csv((out_dir / "labeled.csv").string(), labeled);

    json report;
    report["version"] = kVersion;
    report["seed"] = config.seed;
    report["config"] = {{"articles", config.articles_path},
                        {"scores", config.scores_path},
                        {"threshold", config.threshold},
                        {"train_fraction", config.train_fraction},
                        {"stratified", config.stratified},
                        {"resample_before_split", config.resample_before_split},
                        {"knn_k", config.knn_k},
                        {"lr",
                         {{"learning_rate", config.lr.learning_rate},
                          {"max_epochs", config.lr.max_epochs},
                          {"tolerance", config.lr.tolerance},
                          {"l2", config.lr.l2}}},
                        {"svm",
                         {{"step", config.svm.step},
                          {"epochs", config.svm.epochs},
                          {"l2", config.svm.l2}}},
                        {"bootstrap_rounds", config.bootstrap_rounds}};

    std::size_t spammed = 0;
    for (const auto& a : labeled) spammed += a.is_spammed;
    const auto partition = stats::group_spam_ratio(labeled, stats::GroupKey::health_partition);
    stats::write_groups_csv((out_dir / "groups.csv").string(), partition);

    json partition_json;
    for (const auto& g : partition) partition_json[g.key] = group_json(g);
    report["dataset"] = {{"articles_in", articles.report.rows_in},
                         {"article_rejects", articles.report.rejects.size()},
                         {"labeled", labeled.size()},
                         {"spammed", spammed},
                         {"prevalence",
                          static_cast<double>(spammed) / static_cast<double>(labeled.size())},
                         {"tweeters_without_scores", label_report.tweeters_without_scores},
                         {"partition", partition_json}};

    // Correlations describe the whole labeled dataset, not just the train split.
    const features::FeatureMatrix full = features::assemble_features(labeled);
    const auto corr = features::feature_correlation(full);
    features::write_correlation_csv((out_dir / "correlation.csv").string(), corr);
    std::vector<std::string> corr_columns(features::kFeatureNames.begin(),
                                          features::kFeatureNames.end());
    corr_columns.push_back("is_spammed");
    report["correlation"] = {{"columns", corr_columns}, {"matrix", corr}};

    PreparedData data = prepare(labeled, config.train_fraction, config.stratified,
                                config.resample_before_split, config.seed);
    report["split"] = {{"train_rows", data.train_rows_before_upsample},
                       {"train_rows_after_upsample", data.train.n_rows},
                       {"test_rows", data.test.n_rows}};

    json models;
    {
        const auto model = learn::train_logistic(data.train, config.lr);
        const auto pred = learn::logistic_predict(model, data.test);
        json m = evaluate_model(data.test, pred, (out_dir / "roc_lr.csv").string());
        m["weights"] = model.weights;
        m["bias"] = model.bias;
        m["epochs_run"] = model.loss_log.size() - 1;
        m["final_loss"] = model.loss_log.back();
        models["lr"] = std::move(m);
    }
    {
        const auto model = learn::train_knn(data.train, config.knn_k);
        const auto pred = learn::knn_predict(model, data.test);
        json m = evaluate_model(data.test, pred, (out_dir / "roc_knn.csv").string());
        m["k"] = config.knn_k;
        models["knn"] = std::move(m);
    }
    {
        const auto model = learn::train_svm(data.train, config.svm);
        const auto pred = learn::svm_predict(model, data.test);
        json m = evaluate_model(data.test, pred, (out_dir / "roc_svm.csv").string());
        m["weights"] = model.weights;
        m["bias"] = model.bias;
        models["svm"] = std::move(m);
    }
    report["models"] = std::move(models);

    const auto importance = learn::feature_importance(
        data.train, config.bootstrap_rounds, derive_seed(config.seed, "importance"), config.lr);
    report["feature_importance"] = {{"columns", features::kFeatureNames},
                                    {"medians", importance},
                                    {"rounds", config.bootstrap_rounds}};

    const auto& health = find_group(partition, "health");
    const auto& other = find_group(partition, "other");
    json zj = ztest_json(health.n_spammed, health.n_articles, other.n_spammed, other.n_articles);
    zj["health"] = group_json(health);
    zj["other"] = group_json(other);
    zj["all"] = group_json(find_group(partition, "all"));
    write_json_file((out_dir / "ztest.json").string(), zj);
    report["ztest"] = std::move(zj);

    write_json_file((out_dir / "report.json").string(), report);
    return report;
}

}  // namespace botamp::pipeline
