#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <json.hpp>

#include "botamp/features.hpp"

namespace botamp::learn {

struct SplitSpec {
    double fraction = 0.7;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct Split {
    features::FeatureMatrix train;
    features::FeatureMatrix test;
};

Split split_train_test(const features::FeatureMatrix& matrix, const SplitSpec& spec);

features::FeatureMatrix upsample_minority(const features::FeatureMatrix& train,
                                          std::uint64_t seed);

struct Predictions {
    std::vector<double> scores;
    std::vector<std::uint8_t> labels;
};

using WeightVector = std::array<double, features::kFeatureCount>;

struct LogisticHyper {
    double learning_rate = 0.5;
    std::size_t max_epochs = 500;
    double tolerance = 1e-8;
    double l2 = 0.0;
};

struct LogisticModel {
    WeightVector weights{};
    double bias = 0.0;
    std::vector<double> loss_log;
};

// Mean binary cross-entropy with the sigmoid clipped away from {0, 1}, plus
// (l2/2)·‖w‖² (bias unregularized).
double logistic_loss(const WeightVector& weights, double bias,
                     const features::FeatureMatrix& data, double l2);
void logistic_gradient(const WeightVector& weights, double bias,
                       const features::FeatureMatrix& data, double l2,
                       WeightVector& grad_weights, double& grad_bias);

LogisticModel train_logistic(const features::FeatureMatrix& train,
                             const LogisticHyper& hyper = {});
Predictions logistic_predict(const LogisticModel& model, const features::FeatureMatrix& rows);

struct KnnModel {
    features::FeatureMatrix train;
    std::size_t k = 34;
};

KnnModel train_knn(const features::FeatureMatrix& train, std::size_t k = 34);
Predictions knn_predict(const KnnModel& model, const features::FeatureMatrix& rows);

struct SvmHyper {
    double step = 0.5;
    std::size_t epochs = 500;
    double l2 = 1e-4;
};

struct SvmModel {
    WeightVector weights{};
    double bias = 0.0;
    double l2 = 1e-4;
};

double svm_objective(const SvmModel& model, const features::FeatureMatrix& data);
SvmModel train_svm(const features::FeatureMatrix& train, const SvmHyper& hyper = {});
Predictions svm_predict(const SvmModel& model, const features::FeatureMatrix& rows);

// Median logistic coefficient over B bootstrap resamples; B = 1 is the plain
// fit with no resampling.
WeightVector feature_importance(const features::FeatureMatrix& train, std::size_t rounds,
                                std::uint64_t seed, const LogisticHyper& hyper = {});

struct KScanEntry {
    std::size_t k = 0;
    double f1_positive = 0.0;
};

std::vector<KScanEntry> knn_scan_k(const features::FeatureMatrix& train,
                                   const features::FeatureMatrix& test,
                                   const std::vector<std::size_t>& ks);

nlohmann::json logistic_to_json(const LogisticModel& model);
LogisticModel logistic_from_json(const nlohmann::json& j);
nlohmann::json svm_to_json(const SvmModel& model);
SvmModel svm_from_json(const nlohmann::json& j);
nlohmann::json knn_to_json(const KnnModel& model);
KnnModel knn_from_json(const nlohmann::json& j);

}  // namespace botamp::learn
