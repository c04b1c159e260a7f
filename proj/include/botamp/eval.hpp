#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace botamp::eval {

struct Confusion {
    std::size_t tp = 0;
    std::size_t fn = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
};

Confusion confusion(const std::vector<std::uint8_t>& truth,
                    const std::vector<std::uint8_t>& predicted);

struct ClassMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    std::size_t support = 0;
};

struct Report {
    Confusion matrix;
    ClassMetrics positive;
    ClassMetrics negative;
    double accuracy = 0.0;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double macro_f1 = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    double weighted_f1 = 0.0;
};

Report classification_report(const std::vector<std::uint8_t>& truth,
                             const std::vector<std::uint8_t>& predicted);
Report report_from_confusion(const Confusion& m);

struct RocPoint {
    double fpr = 0.0;
    double tpr = 0.0;
};

// One point per distinct score, positive predicted when score >= threshold,
// bracketed by (0,0) and (1,1). Needs both classes present in truth.
std::vector<RocPoint> roc_points(const std::vector<std::uint8_t>& truth,
                                 const std::vector<double>& scores);

double auc(const std::vector<RocPoint>& points);

nlohmann::json report_to_json(const Report& report);
void write_roc_csv(const std::string& path, const std::vector<RocPoint>& points);

}  // namespace botamp::eval
