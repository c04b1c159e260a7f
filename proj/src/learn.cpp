#include "botamp/learn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "botamp/errors.hpp"
#include "botamp/eval.hpp"
#include "botamp/rng.hpp"

namespace botamp::learn {

namespace {

using features::FeatureMatrix;
using features::kFeatureCount;

FeatureMatrix gather_rows(const FeatureMatrix& m, const std::vector<std::size_t>& indices) {
    FeatureMatrix out;
    out.n_rows = indices.size();
    out.data.reserve(indices.size() * kFeatureCount);
    out.labels.reserve(indices.size());
    for (std::size_t idx : indices) {
        const double* row = m.row(idx);
        out.data.insert(out.data.end(), row, row + kFeatureCount);
        out.labels.push_back(m.labels[idx]);
    }
    return out;
}

void require_both_classes(const FeatureMatrix& m, const char* what) {
    bool has_pos = false, has_neg = false;
    for (std::uint8_t l : m.labels) {
        (l != 0 ? has_pos : has_neg) = true;
    }
    if (!has_pos || !has_neg) {
        throw ValidationError(std::string(what) + " requires both classes present");
    }
}

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

double affine(const WeightVector& w, double b, const double* row) {
    double z = b;
    for (std::size_t j = 0; j < kFeatureCount; ++j) z += w[j] * row[j];
    return z;
}

constexpr double kProbClip = 1e-12;

}  // namespace

Split split_train_test(const FeatureMatrix& matrix, const SplitSpec& spec) {
    if (!(spec.fraction > 0.0 && spec.fraction < 1.0)) {
        throw ConfigError("train fraction must be in (0, 1)");
    }
    if (matrix.n_rows == 0) throw ValidationError("split of empty matrix");

    Rng rng(spec.seed);
    std::vector<std::size_t> train_idx, test_idx;

    auto split_group = [&](std::vector<std::size_t>& group) {
        rng.shuffle(group);
        const std::size_t n_train =
            static_cast<std::size_t>(std::floor(static_cast<double>(group.size()) * spec.fraction));
        for (std::size_t i = 0; i < group.size(); ++i) {
            (i < n_train ? train_idx : test_idx).push_back(group[i]);
        }
    };

    if (spec.stratified) {
        std::vector<std::size_t> neg, pos;
        for (std::size_t i = 0; i < matrix.n_rows; ++i) {
            (matrix.labels[i] != 0 ? pos : neg).push_back(i);
        }
        if (neg.size() < 2 || pos.size() < 2) {
            throw ValidationError("stratified split requires at least 2 rows per class");
        }
        split_group(neg);
        split_group(pos);
    } else {
        std::vector<std::size_t> all(matrix.n_rows);
        std::iota(all.begin(), all.end(), 0);
        split_group(all);
    }

    std::sort(train_idx.begin(), train_idx.end());
    std::sort(test_idx.begin(), test_idx.end());
    return {gather_rows(matrix, train_idx), gather_rows(matrix, test_idx)};
}

FeatureMatrix upsample_minority(const FeatureMatrix& train, std::uint64_t seed) {
    require_both_classes(train, "upsampling");
    std::vector<std::size_t> pos, neg;
    for (std::size_t i = 0; i < train.n_rows; ++i) {
        (train.labels[i] != 0 ? pos : neg).push_back(i);
    }
    const auto& minority = pos.size() < neg.size() ? pos : neg;
    const auto& majority = pos.size() < neg.size() ? neg : pos;

    FeatureMatrix out = train;
    if (minority.size() == majority.size()) return out;

    Rng rng(seed);
    const std::size_t need = majority.size() - minority.size();
    out.data.reserve((train.n_rows + need) * kFeatureCount);
    out.labels.reserve(train.n_rows + need);
    for (std::size_t i = 0; i < need; ++i) {
        const std::size_t src = minority[rng.index(minority.size())];
        const double* row = train.row(src);
        out.data.insert(out.data.end(), row, row + kFeatureCount);
        out.labels.push_back(train.labels[src]);
    }
    out.n_rows = train.n_rows + need;
    return out;
}

double logistic_loss(const WeightVector& weights, double bias, const FeatureMatrix& data,
                     double l2) {
    if (data.n_rows == 0) throw ValidationError("loss of empty matrix");
    double total = 0.0;
    for (std::size_t i = 0; i < data.n_rows; ++i) {
        double p = sigmoid(affine(weights, bias, data.row(i)));
        p = std::clamp(p, kProbClip, 1.0 - kProbClip);
        total += data.labels[i] != 0 ? -std::log(p) : -std::log(1.0 - p);
    }
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    const double loss = total / static_cast<double>(data.n_rows) + 0.5 * l2 * reg;
    if (!std::isfinite(loss)) throw NumericError("non-finite training loss");
    return loss;
}

void logistic_gradient(const WeightVector& weights, double bias, const FeatureMatrix& data,
                       double l2, WeightVector& grad_weights, double& grad_bias) {
    if (data.n_rows == 0) throw ValidationError("gradient of empty matrix");
    grad_weights.fill(0.0);
    grad_bias = 0.0;
    for (std::size_t i = 0; i < data.n_rows; ++i) {
        const double* row = data.row(i);
        const double err = sigmoid(affine(weights, bias, row)) - (data.labels[i] != 0 ? 1.0 : 0.0);
        for (std::size_t j = 0; j < kFeatureCount; ++j) grad_weights[j] += err * row[j];
        grad_bias += err;
    }
    const double inv_n = 1.0 / static_cast<double>(data.n_rows);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        grad_weights[j] = grad_weights[j] * inv_n + l2 * weights[j];
    }
    grad_bias *= inv_n;
}

LogisticModel train_logistic(const FeatureMatrix& train, const LogisticHyper& hyper) {
    require_both_classes(train, "logistic training");
    if (!(hyper.learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
    if (hyper.l2 < 0.0) throw ConfigError("l2 strength must be non-negative");

    LogisticModel model;
    double loss = logistic_loss(model.weights, model.bias, train, hyper.l2);
    model.loss_log.push_back(loss);

    WeightVector grad{};
    double grad_b = 0.0;
    for (std::size_t epoch = 0; epoch < hyper.max_epochs; ++epoch) {
        logistic_gradient(model.weights, model.bias, train, hyper.l2, grad, grad_b);

        double step = hyper.learning_rate;
        WeightVector cand_w;
        double cand_b = 0.0;
        double cand_loss = 0.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving) {
            for (std::size_t j = 0; j < kFeatureCount; ++j) {
                cand_w[j] = model.weights[j] - step * grad[j];
            }
            cand_b = model.bias - step * grad_b;
            cand_loss = logistic_loss(cand_w, cand_b, train, hyper.l2);
            if (cand_loss <= loss) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        model.weights = cand_w;
        model.bias = cand_b;
        model.loss_log.push_back(cand_loss);
        const double delta = loss - cand_loss;
        loss = cand_loss;
        if (delta < hyper.tolerance) break;
    }
    return model;
}

Predictions logistic_predict(const LogisticModel& model, const FeatureMatrix& rows) {
    Predictions out;
    out.scores.reserve(rows.n_rows);
    out.labels.reserve(rows.n_rows);
    for (std::size_t i = 0; i < rows.n_rows; ++i) {
        double p = sigmoid(affine(model.weights, model.bias, rows.row(i)));
        p = std::clamp(p, kProbClip, 1.0 - kProbClip);
        out.scores.push_back(p);
        out.labels.push_back(p > 0.5 ? 1 : 0);
    }
    return out;
}

KnnModel train_knn(const FeatureMatrix& train, std::size_t k) {
    if (k < 1 || k > train.n_rows) {
        throw ValidationError("k must be in [1, n_train], got " + std::to_string(k) + " for " +
                              std::to_string(train.n_rows) + " rows");
    }
    return {train, k};
}

Predictions knn_predict(const KnnModel& model, const FeatureMatrix& rows) {
    Predictions out;
    out.scores.reserve(rows.n_rows);
    out.labels.reserve(rows.n_rows);

    // (distance², train index); the worst kept neighbor sits at the heap top.
    using Neighbor = std::pair<double, std::size_t>;
    std::vector<Neighbor> heap;
    heap.reserve(model.k);

    for (std::size_t q = 0; q < rows.n_rows; ++q) {
        const double* query = rows.row(q);
        heap.clear();
        for (std::size_t t = 0; t < model.train.n_rows; ++t) {
            const double* trow = model.train.row(t);
            double d2 = 0.0;
            for (std::size_t j = 0; j < kFeatureCount; ++j) {
                const double d = query[j] - trow[j];
                d2 += d * d;
            }
            const Neighbor cand{d2, t};
            if (heap.size() < model.k) {
                heap.push_back(cand);
                std::push_heap(heap.begin(), heap.end());
            } else if (cand < heap.front()) {
                std::pop_heap(heap.begin(), heap.end());
                heap.back() = cand;
                std::push_heap(heap.begin(), heap.end());
            }
        }
        std::size_t votes = 0;
        for (const auto& [d2, t] : heap) votes += (model.train.labels[t] != 0);
        const double score = static_cast<double>(votes) / static_cast<double>(model.k);
        out.scores.push_back(score);
        out.labels.push_back(score > 0.5 ? 1 : 0);
    }
    return out;
}

double svm_objective(const SvmModel& model, const FeatureMatrix& data) {
    if (data.n_rows == 0) throw ValidationError("objective of empty matrix");
    double total = 0.0;
    for (std::size_t i = 0; i < data.n_rows; ++i) {
        const double y = data.labels[i] != 0 ? 1.0 : -1.0;
        total += std::max(0.0, 1.0 - y * affine(model.weights, model.bias, data.row(i)));
    }
    double reg = 0.0;
    for (double w : model.weights) reg += w * w;
    return total / static_cast<double>(data.n_rows) + 0.5 * model.l2 * reg;
}

SvmModel train_svm(const FeatureMatrix& train, const SvmHyper& hyper) {
    require_both_classes(train, "svm training");
    if (!(hyper.step > 0.0)) throw ConfigError("step size must be positive");
    if (hyper.l2 < 0.0) throw ConfigError("l2 strength must be non-negative");

    SvmModel model;
    model.l2 = hyper.l2;
    const double inv_n = 1.0 / static_cast<double>(train.n_rows);

    // Descend in a column-centered parametrization: with b' = b + w.c the
    // objective is unchanged and has the same minimizer, but the bias axis
    // decouples from the all-positive feature columns, which conditions the
    // subgradient steps much better. Fold the offset back into bias at the end.
    WeightVector center{};
    for (std::size_t i = 0; i < train.n_rows; ++i) {
        const double* row = train.row(i);
        for (std::size_t j = 0; j < kFeatureCount; ++j) center[j] += row[j];
    }
    for (auto& c : center) c *= inv_n;

    double bias_c = 0.0;
    WeightVector grad{};
    for (std::size_t t = 1; t <= hyper.epochs; ++t) {
        grad.fill(0.0);
        double grad_b = 0.0;
        for (std::size_t i = 0; i < train.n_rows; ++i) {
            const double* row = train.row(i);
            const double y = train.labels[i] != 0 ? 1.0 : -1.0;
            double margin = bias_c;
            for (std::size_t j = 0; j < kFeatureCount; ++j) {
                margin += model.weights[j] * (row[j] - center[j]);
            }
            if (y * margin < 1.0) {
                for (std::size_t j = 0; j < kFeatureCount; ++j) {
                    grad[j] -= y * (row[j] - center[j]);
                }
                grad_b -= y;
            }
        }
        const double step = hyper.step / std::sqrt(static_cast<double>(t));
        for (std::size_t j = 0; j < kFeatureCount; ++j) {
            model.weights[j] -= step * (grad[j] * inv_n + hyper.l2 * model.weights[j]);
        }
        bias_c -= step * grad_b * inv_n;
    }
    model.bias = bias_c;
    for (std::size_t j = 0; j < kFeatureCount; ++j) model.bias -= model.weights[j] * center[j];
    for (double w : model.weights) {
        if (!std::isfinite(w)) throw NumericError("non-finite svm weight");
    }
    return model;
}

Predictions svm_predict(const SvmModel& model, const FeatureMatrix& rows) {
    Predictions out;
    out.scores.reserve(rows.n_rows);
    out.labels.reserve(rows.n_rows);
    for (std::size_t i = 0; i < rows.n_rows; ++i) {
        const double margin = affine(model.weights, model.bias, rows.row(i));
        out.scores.push_back(margin);
        out.labels.push_back(margin > 0.0 ? 1 : 0);
    }
    return out;
}

WeightVector feature_importance(const FeatureMatrix& train, std::size_t rounds,
                                std::uint64_t seed, const LogisticHyper& hyper) {
    if (rounds < 1) throw ConfigError("bootstrap rounds must be at least 1");
    if (rounds == 1) return train_logistic(train, hyper).weights;

    Rng rng(seed);
    std::vector<WeightVector> samples;
    samples.reserve(rounds);
    std::vector<std::size_t> indices(train.n_rows);
    for (std::size_t b = 0; b < rounds; ++b) {
        for (auto& idx : indices) idx = rng.index(train.n_rows);
        FeatureMatrix boot = gather_rows(train, indices);
        samples.push_back(train_logistic(boot, hyper).weights);
    }

    WeightVector medians{};
    std::vector<double> column(rounds);
    for (std::size_t j = 0; j < kFeatureCount; ++j) {
        for (std::size_t b = 0; b < rounds; ++b) column[b] = samples[b][j];
        std::sort(column.begin(), column.end());
        medians[j] = rounds % 2 == 1
                         ? column[rounds / 2]
                         : 0.5 * (column[rounds / 2 - 1] + column[rounds / 2]);
    }
    return medians;
}

std::vector<KScanEntry> knn_scan_k(const FeatureMatrix& train, const FeatureMatrix& test,
                                   const std::vector<std::size_t>& ks) {
    std::vector<KScanEntry> out;
    out.reserve(ks.size());
    for (std::size_t k : ks) {
        const KnnModel model = train_knn(train, k);
        const Predictions pred = knn_predict(model, test);
        const eval::Report report = eval::classification_report(test.labels, pred.labels);
        out.push_back({k, report.positive.f1});
    }
    return out;
}

namespace {

WeightVector weights_from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() != kFeatureCount) {
        throw ValidationError("model json needs " + std::to_string(kFeatureCount) + " weights");
    }
    WeightVector w{};
    for (std::size_t i = 0; i < kFeatureCount; ++i) {
        w[i] = j[i].get<double>();
        if (!std::isfinite(w[i])) throw ValidationError("non-finite weight in model json");
    }
    return w;
}

}  // namespace

nlohmann::json logistic_to_json(const LogisticModel& model) {
    return nlohmann::json{{"kind", "logistic"},
                          {"weights", model.weights},
                          {"bias", model.bias},
                          {"loss_log", model.loss_log}};
}

LogisticModel logistic_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("kind", "") != "logistic") {
        throw ValidationError("model json is not a logistic model");
    }
    LogisticModel m;
    m.weights = weights_from_json(j.at("weights"));
    m.bias = j.at("bias").get<double>();
    if (j.contains("loss_log")) m.loss_log = j["loss_log"].get<std::vector<double>>();
    return m;
}

nlohmann::json svm_to_json(const SvmModel& model) {
    return nlohmann::json{{"kind", "svm"},
                          {"weights", model.weights},
                          {"bias", model.bias},
                          {"l2", model.l2}};
}

SvmModel svm_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("kind", "") != "svm") {
        throw ValidationError("model json is not an svm model");
    }
    SvmModel m;
    m.weights = weights_from_json(j.at("weights"));
    m.bias = j.at("bias").get<double>();
    m.l2 = j.at("l2").get<double>();
    return m;
}

nlohmann::json knn_to_json(const KnnModel& model) {
    return nlohmann::json{{"kind", "knn"},
                          {"k", model.k},
                          {"n_rows", model.train.n_rows},
                          {"data", model.train.data},
                          {"labels", model.train.labels}};
}

KnnModel knn_from_json(const nlohmann::json& j) {
    if (!j.is_object() || j.value("kind", "") != "knn") {
        throw ValidationError("model json is not a knn model");
    }
    KnnModel m;
    m.k = j.at("k").get<std::size_t>();
    m.train.n_rows = j.at("n_rows").get<std::size_t>();
    m.train.data = j.at("data").get<std::vector<double>>();
    m.train.labels = j.at("labels").get<std::vector<std::uint8_t>>();
    if (m.train.data.size() != m.train.n_rows * kFeatureCount ||
        m.train.labels.size() != m.train.n_rows) {
        throw ValidationError("knn model json has inconsistent dimensions");
    }
    if (m.k < 1 || m.k > m.train.n_rows) throw ValidationError("knn model json has k out of range");
    return m;
}

}  // namespace botamp::learn
