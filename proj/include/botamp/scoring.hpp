#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "botamp/types.hpp"

namespace botamp::scoring {

// Sum of the eight metrics, range [0, 40].
double user_bot_score(const BotometerMetrics& m);

// Median with the even-length convention: mean of the two middle order
// statistics. Throws ValidationError on empty input.
double median(std::vector<double> values);

// Per-article overall score = median of its tweeters' bot scores.
double article_overall_score(const std::vector<double>& scores);

// Strictly-above-threshold rule: a score exactly at the threshold is clean.
bool label_article(double overall_score, double threshold = 20.0);

struct ScoreSummary {
    std::size_t n = 0;
    double min = 0.0;
    double max = 0.0;
    double mean = 0.0;
    double stddev = 0.0;  // population
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
};

// Quartiles are medians of the lower/upper halves, middle element excluded
// for odd lengths.
ScoreSummary score_summary(const std::vector<double>& scores);

// Most frequent location, ties broken by lexicographically smallest.
// "unknown" entries are ignored unless every entry is unknown.
std::string mode_location(const std::vector<std::string>& locations);

struct LabelingReport {
    std::size_t articles_in = 0;
    std::size_t articles_out = 0;
    std::size_t tweeters_without_scores = 0;
};

// Aggregate articles into labeled rows: overall score = median bot score of
// the tweeters found in the store. Tweeters missing from the store are
// skipped and counted; an article whose tweeters are all missing is a
// validation error.
std::vector<LabeledArticle> label_articles(const std::vector<ArticleRecord>& articles,
                                           const ScoreStore& scores, double threshold = 20.0,
                                           LabelingReport* report = nullptr);

// Labeled dataset file: CSV with header altmetric_id,overall_score,discipline,
// journal,research_type,publisher,altmetric_score,author_location,is_spammed.
void write_labeled_csv(const std::string& path, const std::vector<LabeledArticle>& rows);
std::vector<LabeledArticle> read_labeled_csv(const std::string& path);

}  // namespace botamp::scoring
