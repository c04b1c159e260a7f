#include "botamp/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "botamp/csv.hpp"
#include "botamp/errors.hpp"

namespace botamp::eval {

namespace {

double safe_div(double num, double den) { return den == 0.0 ? 0.0 : num / den; }

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
    ClassMetrics m;
    m.support = tp + fn;
    m.precision = safe_div(static_cast<double>(tp), static_cast<double>(tp + fp));
    m.recall = safe_div(static_cast<double>(tp), static_cast<double>(tp + fn));
    m.f1 = safe_div(2.0 * m.precision * m.recall, m.precision + m.recall);
    return m;
}

}  // namespace

Confusion confusion(const std::vector<std::uint8_t>& truth,
                    const std::vector<std::uint8_t>& predicted) {
    if (truth.size() != predicted.size()) {
        throw ValidationError("truth and prediction lengths differ");
    }
    if (truth.empty()) throw ValidationError("confusion matrix of empty label set");
    Confusion m;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool t = truth[i] != 0;
        const bool p = predicted[i] != 0;
        if (t && p) ++m.tp;
        else if (t && !p) ++m.fn;
        else if (!t && p) ++m.fp;
        else ++m.tn;
    }
    return m;
}

Report report_from_confusion(const Confusion& m) {
    const std::size_t total = m.tp + m.fn + m.fp + m.tn;
    if (total == 0) throw ValidationError("confusion matrix is empty");

    Report r;
    r.matrix = m;
    r.positive = class_metrics(m.tp, m.fp, m.fn);
    r.negative = class_metrics(m.tn, m.fn, m.fp);
    r.accuracy = static_cast<double>(m.tp + m.tn) / static_cast<double>(total);

    r.macro_precision = 0.5 * (r.positive.precision + r.negative.precision);
    r.macro_recall = 0.5 * (r.positive.recall + r.negative.recall);
    r.macro_f1 = 0.5 * (r.positive.f1 + r.negative.f1);

    const double wp = static_cast<double>(r.positive.support) / static_cast<double>(total);
    const double wn = static_cast<double>(r.negative.support) / static_cast<double>(total);
    r.weighted_precision = wp * r.positive.precision + wn * r.negative.precision;
    r.weighted_recall = wp * r.positive.recall + wn * r.negative.recall;
    r.weighted_f1 = wp * r.positive.f1 + wn * r.negative.f1;
    return r;
}

Report classification_report(const std::vector<std::uint8_t>& truth,
                             const std::vector<std::uint8_t>& predicted) {
    return report_from_confusion(confusion(truth, predicted));
}

std::vector<RocPoint> roc_points(const std::vector<std::uint8_t>& truth,
                                 const std::vector<double>& scores) {
    if (truth.size() != scores.size()) throw ValidationError("truth and score lengths differ");
    if (truth.empty()) throw ValidationError("roc of empty label set");
    for (double s : scores) {
        if (!std::isfinite(s)) throw NumericError("non-finite score in roc input");
    }

    std::size_t pos = 0;
    for (std::uint8_t t : truth) pos += (t != 0);
    const std::size_t neg = truth.size() - pos;
    if (pos == 0 || neg == 0) throw ValidationError("roc requires both classes in truth");

    std::vector<std::size_t> order(truth.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });

    std::vector<RocPoint> pts;
    pts.push_back({0.0, 0.0});
    std::size_t tp = 0, fp = 0;
    std::size_t i = 0;
    while (i < order.size()) {
        const double s = scores[order[i]];
        while (i < order.size() && scores[order[i]] == s) {
            if (truth[order[i]] != 0) ++tp;
            else ++fp;
            ++i;
        }
        pts.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                       static_cast<double>(tp) / static_cast<double>(pos)});
    }
    return pts;
}

double auc(const std::vector<RocPoint>& points) {
    if (points.size() < 2) throw ValidationError("auc needs at least two roc points");
    double area = 0.0;
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double dx = points[i].fpr - points[i - 1].fpr;
        if (dx < 0.0) throw ValidationError("roc points must be ordered by fpr");
        area += dx * 0.5 * (points[i].tpr + points[i - 1].tpr);
    }
    return area;
}

nlohmann::json report_to_json(const Report& report) {
    nlohmann::json j;
    j["confusion"] = {{"tp", report.matrix.tp},
                      {"fn", report.matrix.fn},
                      {"fp", report.matrix.fp},
                      {"tn", report.matrix.tn}};
    auto cls = [](const ClassMetrics& m) {
        return nlohmann::json{{"precision", m.precision},
                              {"recall", m.recall},
                              {"f1", m.f1},
                              {"support", m.support}};
    };
    j["true"] = cls(report.positive);
    j["false"] = cls(report.negative);
    j["accuracy"] = report.accuracy;
    j["macro"] = {{"precision", report.macro_precision},
                  {"recall", report.macro_recall},
                  {"f1", report.macro_f1}};
    j["weighted"] = {{"precision", report.weighted_precision},
                     {"recall", report.weighted_recall},
                     {"f1", report.weighted_f1}};
    return j;
}

void write_roc_csv(const std::string& path, const std::vector<RocPoint>& points) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << csv::encode_row({"fpr", "tpr"});
    for (const auto& p : points) {
        out << csv::encode_row({csv::format_double(p.fpr), csv::format_double(p.tpr)});
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace botamp::eval
