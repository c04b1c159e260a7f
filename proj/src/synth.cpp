#include "botamp/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <map>

#include "botamp/csv.hpp"
#include "botamp/errors.hpp"
#include "botamp/ingest.hpp"
#include "botamp/rng.hpp"
#include "botamp/scoring.hpp"

namespace botamp::synth {

namespace {

const std::vector<std::string> kHealthPool = {
    "Biochemistry",
    "Genetics and Molecular Biology",
    "Medicine",
    "Life Sciences",
    "Health Sciences",
    "Psychology",
    "Dentistry",
    "Health Professions",
    "Nursing",
    "Pharmacology, Toxicology, and Pharmaceutics",
    "Immunology and Microbiology",
    "Neuroscience",
};

const std::vector<std::string> kOtherPool = {
    "Agricultural and Biological Sciences",
    "Arts and Humanities",
    "Business, Management and Accounting",
    "Chemistry",
    "Computer Science",
    "Earth and Planetary Sciences",
    "Energy",
    "Engineering",
    "Environmental Science",
    "Mathematics",
    "Physics and Astronomy",
    "Social Sciences",
};

const std::vector<std::string> kResearchTypes = {"article", "book", "chapter", "news", "review"};

const std::vector<std::string> kLocations = {
    "Australia", "Brazil", "Canada",       "China",  "France",      "Germany",
    "India",     "Italy",  "Japan",        "Mexico", "Netherlands", "Nigeria",
    "South Africa", "South Korea", "Spain", "Sweden", "United Kingdom", "United States",
};

constexpr double kEmptyLocationRate = 0.1;
constexpr std::size_t kJournalCount = 40;
constexpr std::size_t kPublisherCount = 20;
constexpr double kLabelThreshold = 20.0;

// Per-column weights of the planted linear model, scaled by the configured
// signal strength. Columns: discipline, journal, research_type, publisher,
// altmetric_score, author_location.
constexpr learn::WeightVector kPlantedWeights = {12.5, 0.0, 20.0, 0.0, -20.0, 0.0};
constexpr double kPlantedHealthGap = 2.5;

// Per-article latent amplification offset, independent of every feature. It
// concentrates bot users on a minority of articles, so the prevalence target
// stays reachable with a small overall bot share (keeping the user-score 75th
// percentile in the human range) even when the planted signal is zero.
constexpr double kLatentSpread = 5.0;

std::string zero_padded(const char* prefix, std::size_t value, int width) {
    std::string digits = std::to_string(value);
    std::string out = prefix;
    for (int i = static_cast<int>(digits.size()); i < width; ++i) out.push_back('0');
    return out + digits;
}

// Rank encoding over a fixed pool plus the "unknown" sentinel, mirroring how
// a vocabulary built from fully realized data would encode each value.
class PoolEncoder {
  public:
    explicit PoolEncoder(std::vector<std::string> pool) : values_(std::move(pool)) {
        values_.push_back(kUnknownCategory);
        std::sort(values_.begin(), values_.end());
    }
    double encode(const std::string& value) const {
        const auto it = std::lower_bound(values_.begin(), values_.end(), value);
        const std::size_t rank =
            (it != values_.end() && *it == value)
                ? static_cast<std::size_t>(it - values_.begin())
                : static_cast<std::size_t>(std::lower_bound(values_.begin(), values_.end(),
                                                            std::string(kUnknownCategory)) -
                                           values_.begin());
        return static_cast<double>(rank) / static_cast<double>(values_.size() - 1);
    }

  private:
    std::vector<std::string> values_;
};

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

struct UserDraw {
    double bot_threshold = 0.0;  // uniform; the user turns bot when it falls below the mixture weight
    BotometerMetrics human{};
    BotometerMetrics bot{};
    double human_sum = 0.0;
    double bot_sum = 0.0;
};

void validate_config(const SynthConfig& c) {
    if (c.n_articles < 10) throw ConfigError("n_articles must be at least 10");
    if (!(c.spam_prevalence > 0.0 && c.spam_prevalence < 1.0)) {
        throw ConfigError("spam_prevalence must be in (0, 1)");
    }
    if (!(c.health_share > 0.0 && c.health_share < 1.0)) {
        throw ConfigError("health_share must be in (0, 1)");
    }
    if (!(c.altmetric_log_sd > 0.0)) throw ConfigError("altmetric_log_sd must be positive");
    if (!(c.tweets_mean >= 1.0)) throw ConfigError("tweets_mean must be at least 1");
    if (c.signal_strength < 0.0) throw ConfigError("signal_strength must be non-negative");
    if (!(c.prevalence_tolerance > 0.0)) throw ConfigError("prevalence_tolerance must be positive");
}

}  // namespace

SynthDataset generate_dataset(const SynthConfig& config) {
    validate_config(config);
    const std::size_t n = config.n_articles;
    const double s = config.signal_strength;

    const PoolEncoder disc_enc([] {
        std::vector<std::string> all = kHealthPool;
        all.insert(all.end(), kOtherPool.begin(), kOtherPool.end());
        return all;
    }());
    std::vector<std::string> journal_pool, publisher_pool;
    for (std::size_t j = 1; j <= kJournalCount; ++j) {
        journal_pool.push_back(zero_padded("Journal ", j, 3));
    }
    for (std::size_t p = 1; p <= kPublisherCount; ++p) {
        publisher_pool.push_back(zero_padded("Publisher ", p, 2));
    }
    const PoolEncoder journal_enc(journal_pool);
    const PoolEncoder publisher_enc(publisher_pool);
    const PoolEncoder rtype_enc(kResearchTypes);
    const PoolEncoder location_enc(kLocations);

    Rng structure(derive_seed(config.seed, "synth.structure"));
    Rng users(derive_seed(config.seed, "synth.users"));

    // Health slots allocated exactly, then shuffled into place.
    const std::size_t n_health =
        static_cast<std::size_t>(std::llround(static_cast<double>(n) * config.health_share));
    std::vector<std::uint8_t> is_health(n, 0);
    for (std::size_t i = 0; i < std::min(n_health, n); ++i) is_health[i] = 1;
    structure.shuffle(is_health);

    SynthDataset out;
    out.articles.resize(n);
    for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
        out.ground_truth[j] = s * kPlantedWeights[j];
    }
    out.health_gap = s * kPlantedHealthGap;

    std::vector<double> article_logit(n);  // planted signal, before the tuned intercept
    std::vector<UserDraw> draws;
    std::vector<std::pair<std::size_t, std::size_t>> article_users(n);  // [first, last) into draws

    std::size_t user_counter = 0;
    for (std::size_t i = 0; i < n; ++i) {
        ArticleRecord& a = out.articles[i];
        a.altmetric_id = zero_padded("a", i + 1, 7);
        const auto& pool = is_health[i] ? kHealthPool : kOtherPool;
        a.discipline = pool[structure.index(pool.size())];
        a.journal = journal_pool[structure.index(journal_pool.size())];
        a.research_type = kResearchTypes[structure.index(kResearchTypes.size())];
        a.publisher = publisher_pool[structure.index(publisher_pool.size())];

        const double alt_u = structure.next_double();
        a.altmetric_score = std::exp(config.altmetric_log_mean +
                                     config.altmetric_log_sd * inverse_normal_cdf(alt_u));

        const int n_tweets = config.tweets_mean == 1.0
                                 ? 1
                                 : structure.geometric(1.0 / config.tweets_mean);
        a.tweeter_user_ids.reserve(n_tweets);
        a.tweeter_locations.reserve(n_tweets);
        for (int t = 0; t < n_tweets; ++t) {
            a.tweeter_user_ids.push_back(zero_padded("u", ++user_counter, 8));
            if (structure.next_double() < kEmptyLocationRate) {
                a.tweeter_locations.push_back(kUnknownCategory);
            } else {
                a.tweeter_locations.push_back(kLocations[structure.index(kLocations.size())]);
            }
        }

        const std::array<double, features::kFeatureCount> encoded = {
            disc_enc.encode(a.discipline),
            journal_enc.encode(a.journal),
            rtype_enc.encode(a.research_type),
            publisher_enc.encode(a.publisher),
            alt_u,  // the score's own CDF value; rank-like by construction
            location_enc.encode(scoring::mode_location(a.tweeter_locations)),
        };
        double logit = kLatentSpread * (2.0 * structure.next_double() - 1.0);
        for (std::size_t j = 0; j < features::kFeatureCount; ++j) {
            logit += out.ground_truth[j] * (encoded[j] - 0.5);
        }
        if (is_health[i]) logit += out.health_gap;
        article_logit[i] = logit;

        article_users[i] = {draws.size(), draws.size() + static_cast<std::size_t>(n_tweets)};
        for (int t = 0; t < n_tweets; ++t) {
            UserDraw d;
            d.bot_threshold = users.next_double();
            for (std::size_t k = 0; k < BotometerMetrics::kCount; ++k) {
                d.human[k] = users.uniform(0.0, 1.5);
                d.human_sum += d.human[k];
            }
            for (std::size_t k = 0; k < BotometerMetrics::kCount; ++k) {
                d.bot[k] = users.uniform(2.8, 4.8);
                d.bot_sum += d.bot[k];
            }
            draws.push_back(d);
        }
    }

    // All randomness is drawn; spammed-article share is now a deterministic,
    // non-decreasing step function of the intercept. Bisect it.
    std::vector<double> sums;
    auto prevalence_at = [&](double base) {
        std::size_t spammed = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double w = sigmoid(base + article_logit[i]);
            sums.clear();
            for (std::size_t u = article_users[i].first; u < article_users[i].second; ++u) {
                sums.push_back(draws[u].bot_threshold < w ? draws[u].bot_sum
                                                          : draws[u].human_sum);
            }
            if (scoring::article_overall_score(sums) > kLabelThreshold) ++spammed;
        }
        return static_cast<double>(spammed) / static_cast<double>(n);
    };

    double lo = -40.0, hi = 40.0;
    for (int iter = 0; iter < 100; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (prevalence_at(mid) < config.spam_prevalence) lo = mid;
        else hi = mid;
    }
    out.base_logit = 0.5 * (lo + hi);
    out.realized_prevalence = prevalence_at(out.base_logit);
    // The step function can straddle the target; take whichever side lands closer.
    if (std::fabs(prevalence_at(hi) - config.spam_prevalence) <
        std::fabs(out.realized_prevalence - config.spam_prevalence)) {
        out.base_logit = hi;
        out.realized_prevalence = prevalence_at(hi);
    }

    std::vector<double> user_sums;
    user_sums.reserve(draws.size());
    for (std::size_t i = 0; i < n; ++i) {
        const double w = sigmoid(out.base_logit + article_logit[i]);
        const auto& a = out.articles[i];
        for (std::size_t u = article_users[i].first; u < article_users[i].second; ++u) {
            const bool bot = draws[u].bot_threshold < w;
            const auto& m = bot ? draws[u].bot : draws[u].human;
            out.scores[a.tweeter_user_ids[u - article_users[i].first]] = m;
            user_sums.push_back(bot ? draws[u].bot_sum : draws[u].human_sum);
        }
    }

    out.realized_health_share =
        static_cast<double>(std::count(is_health.begin(), is_health.end(), 1)) /
        static_cast<double>(n);
    std::sort(user_sums.begin(), user_sums.end());
    out.user_score_max = user_sums.back();
    const auto summary = scoring::score_summary(user_sums);
    out.user_score_p75 = summary.q3;

    if (std::fabs(out.realized_prevalence - config.spam_prevalence) > config.prevalence_tolerance) {
        throw ValidationError("infeasible config: realized prevalence " +
                              csv::format_double(out.realized_prevalence) + " misses target " +
                              csv::format_double(config.spam_prevalence) + " by more than " +
                              csv::format_double(config.prevalence_tolerance));
    }
    if (!(out.user_score_p75 < 16.0)) {
        throw ValidationError("infeasible config: user score 75th percentile " +
                              csv::format_double(out.user_score_p75) + " must stay below 16");
    }
    if (out.user_score_max > 38.5) {
        throw ValidationError("infeasible config: user score maximum " +
                              csv::format_double(out.user_score_max) + " exceeds 38.5");
    }
    if (std::fabs(out.realized_health_share - config.health_share) > 0.01) {
        throw ValidationError("infeasible config: realized health share " +
                              csv::format_double(out.realized_health_share) + " misses target " +
                              csv::format_double(config.health_share));
    }
    return out;
}

void write_dataset(const std::string& directory, const SynthDataset& dataset) {
    std::filesystem::create_directories(directory);
    const auto dir = std::filesystem::path(directory);
    ingest::write_articles_jsonl((dir / "articles.jsonl").string(), dataset.articles);
    ingest::write_scores_csv((dir / "scores.csv").string(), dataset.scores);
}

}  // namespace botamp::synth
