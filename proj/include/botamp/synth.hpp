#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "botamp/learn.hpp"
#include "botamp/types.hpp"

namespace botamp::synth {

struct SynthConfig {
    std::size_t n_articles = 10000;
    std::uint64_t seed = 0;
    double spam_prevalence = 0.1443;
    double health_share = 0.8427;
    // Log-normal parameters chosen so the score distribution has mean 114.61
    // and standard deviation 326.36.
    double altmetric_log_mean = 3.6369;
    double altmetric_log_sd = 1.4863;
    double tweets_mean = 7.0;
    double signal_strength = 1.0;
    double prevalence_tolerance = 0.01;
};

struct SynthDataset {
    std::vector<ArticleRecord> articles;
    ScoreStore scores;
    // The linear model behind the planted signal, on the generator's own
    // rank encoding of each feature column.
    learn::WeightVector ground_truth{};
    double health_gap = 0.0;
    double base_logit = 0.0;
    double realized_prevalence = 0.0;
    double realized_health_share = 0.0;
    double user_score_p75 = 0.0;
    double user_score_max = 0.0;
};

SynthDataset generate_dataset(const SynthConfig& config);

// Writes articles.jsonl and scores.csv in the ingest formats.
void write_dataset(const std::string& directory, const SynthDataset& dataset);

}  // namespace botamp::synth
