#include "botamp/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include "botamp/csv.hpp"
#include "botamp/errors.hpp"

namespace botamp::scoring {

double user_bot_score(const BotometerMetrics& m) {
    double sum = 0.0;
    for (double v : m.values) sum += v;
    return sum;
}

double median(std::vector<double> values) {
    if (values.empty()) throw ValidationError("median of empty sequence");
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

double article_overall_score(const std::vector<double>& scores) {
    if (scores.empty()) throw ValidationError("article has no tweeter scores");
    return median(scores);
}

bool label_article(double overall_score, double threshold) {
    return overall_score > threshold;
}

namespace {

// Median of an already-sorted range [lo, hi).
double sorted_median(const std::vector<double>& v, std::size_t lo, std::size_t hi) {
    const std::size_t n = hi - lo;
    if (n % 2 == 1) return v[lo + n / 2];
    return (v[lo + n / 2 - 1] + v[lo + n / 2]) / 2.0;
}

}  // namespace

ScoreSummary score_summary(const std::vector<double>& scores) {
    if (scores.empty()) throw ValidationError("score_summary of empty sequence");
    std::vector<double> sorted = scores;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    ScoreSummary s;
    s.n = n;
    s.min = sorted.front();
    s.max = sorted.back();
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(n);
    double var = 0.0;
    for (double v : sorted) var += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(var / static_cast<double>(n));
    s.median = sorted_median(sorted, 0, n);
    if (n == 1) {
        s.q1 = s.q3 = sorted[0];
    } else {
        // Lower/upper halves exclude the middle element when n is odd.
        const std::size_t half = n / 2;
        s.q1 = sorted_median(sorted, 0, half);
        s.q3 = sorted_median(sorted, n - half, n);
    }
    return s;
}

std::string mode_location(const std::vector<std::string>& locations) {
    if (locations.empty()) throw ValidationError("mode_location of empty sequence");
    std::map<std::string, std::size_t> counts;
    for (const auto& loc : locations) {
        if (loc != kUnknownCategory) ++counts[loc];
    }
    if (counts.empty()) return kUnknownCategory;
    // std::map iterates keys in order, so the first max is the smallest key.
    std::string best;
    std::size_t best_count = 0;
    for (const auto& [key, count] : counts) {
        if (count > best_count) {
            best = key;
            best_count = count;
        }
    }
    return best;
}

std::vector<LabeledArticle> label_articles(const std::vector<ArticleRecord>& articles,
                                           const ScoreStore& scores, double threshold,
                                           LabelingReport* report) {
    LabelingReport local;
    local.articles_in = articles.size();
    std::vector<LabeledArticle> out;
    out.reserve(articles.size());

    for (const auto& article : articles) {
        std::vector<double> tweeter_scores;
        tweeter_scores.reserve(article.tweeter_user_ids.size());
        for (const auto& uid : article.tweeter_user_ids) {
            auto it = scores.find(uid);
            if (it == scores.end()) {
                ++local.tweeters_without_scores;
                continue;
            }
            tweeter_scores.push_back(user_bot_score(it->second));
        }
        if (tweeter_scores.empty()) {
            throw ValidationError("article " + article.altmetric_id +
                                  " has no tweeter with a known bot score");
        }
        LabeledArticle row;
        row.altmetric_id = article.altmetric_id;
        row.overall_score = article_overall_score(tweeter_scores);
        row.discipline = article.discipline;
        row.journal = article.journal;
        row.research_type = article.research_type;
        row.publisher = article.publisher;
        row.altmetric_score = article.altmetric_score;
        row.author_location = mode_location(article.tweeter_locations);
        row.is_spammed = label_article(row.overall_score, threshold);
        out.push_back(std::move(row));
    }
    local.articles_out = out.size();
    if (report) *report = local;
    return out;
}

namespace {

const std::vector<std::string> kLabeledHeader = {
    "altmetric_id", "overall_score", "discipline",      "journal",   "research_type",
    "publisher",    "altmetric_score", "author_location", "is_spammed"};

}  // namespace

void write_labeled_csv(const std::string& path, const std::vector<LabeledArticle>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << csv::encode_row(kLabeledHeader);
    for (const auto& r : rows) {
        out << csv::encode_row({r.altmetric_id, csv::format_double(r.overall_score), r.discipline,
                                r.journal, r.research_type, r.publisher,
                                csv::format_double(r.altmetric_score), r.author_location,
                                r.is_spammed ? "true" : "false"});
    }
    if (!out) throw IoError("write failed: " + path);
}

std::vector<LabeledArticle> read_labeled_csv(const std::string& path) {
    const auto records = csv::read_file(path);
    if (records.empty()) throw ValidationError("labeled file is empty: " + path);
    if (records[0] != kLabeledHeader) throw ValidationError("labeled file has wrong header: " + path);

    std::vector<LabeledArticle> rows;
    rows.reserve(records.size() - 1);
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& rec = records[i];
        if (rec.size() != kLabeledHeader.size()) {
            throw ValidationError("labeled row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rec.size()) + " fields");
        }
        LabeledArticle r;
        r.altmetric_id = rec[0];
        auto overall = csv::parse_double(rec[1]);
        auto alt = csv::parse_double(rec[6]);
        if (!overall || !alt) {
            throw ValidationError("labeled row " + std::to_string(i + 1) + " has a bad number");
        }
        r.overall_score = *overall;
        r.discipline = rec[2];
        r.journal = rec[3];
        r.research_type = rec[4];
        r.publisher = rec[5];
        r.altmetric_score = *alt;
        r.author_location = rec[7];
        if (rec[8] == "true") r.is_spammed = true;
        else if (rec[8] == "false") r.is_spammed = false;
        else throw ValidationError("labeled row " + std::to_string(i + 1) + " has a bad boolean");
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace botamp::scoring
