#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include <json.hpp>

#include "botamp/ingest.hpp"
#include "botamp/learn.hpp"
#include "botamp/stats.hpp"
#include "botamp/synth.hpp"

namespace botamp::pipeline {

inline constexpr const char* kVersion = "0.1.0";

enum class ModelKind { lr, knn, svm };

ModelKind model_kind_from_string(const std::string& name);

struct TrainConfig {
    std::string labeled_path;
    ModelKind kind = ModelKind::lr;
    double train_fraction = 0.7;
    bool stratified = true;
    bool resample_before_split = false;
    std::uint64_t seed = 0;
    std::size_t knn_k = 34;
    learn::LogisticHyper lr{};
    learn::SvmHyper svm{};
};

struct ReportConfig {
    std::string articles_path;
    std::string scores_path;
    std::string out_dir;
    double threshold = 20.0;
    double train_fraction = 0.7;
    bool stratified = true;
    bool resample_before_split = false;
    std::uint64_t seed = 0;
    std::size_t knn_k = 34;
    learn::LogisticHyper lr{};
    learn::SvmHyper svm{};
    std::size_t bootstrap_rounds = 11;
};

struct HarvestConfig {
    std::string users_path;
    std::string checkpoint_path;
    std::string out_path;
    double limit = 10.0;
    std::string provider = "hash";  // hash | file
    std::string provider_file;
    std::uint64_t provider_seed = 0;
    bool simulated_clock = false;
    ingest::RetryPolicy retry{};
};

// Each run_* writes its output files and returns the fragment the CLI prints.
nlohmann::json run_score(const std::string& scores_path, ingest::FileFormat format,
                         const std::string& out_path);
nlohmann::json run_label(const std::string& articles_path, const std::string& scores_path,
                         double threshold, const std::string& out_path);
nlohmann::json run_train(const TrainConfig& config, const std::string& model_out);
nlohmann::json run_eval(const std::string& labeled_path, const std::string& model_path,
                        const std::string& out_dir);
nlohmann::json run_ztest_counts(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2,
                                const std::string& out_path);
nlohmann::json run_ztest_labeled(const std::string& labeled_path, const std::string& out_path);
nlohmann::json run_summarize(const std::string& labeled_path, stats::GroupKey key,
                             const std::string& out_path);
nlohmann::json run_synth(const synth::SynthConfig& config, const std::string& out_dir);
nlohmann::json run_harvest(const HarvestConfig& config);
nlohmann::json run_report(const ReportConfig& config);

}  // namespace botamp::pipeline
