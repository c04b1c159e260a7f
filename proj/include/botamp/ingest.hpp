#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "botamp/types.hpp"

namespace botamp::ingest {

enum class FileFormat { jsonl, csv };

FileFormat detect_format(const std::string& path);

std::string select_primary_discipline(const std::string& raw);

struct RowReject {
    std::size_t line = 0;
    std::string reason;
};

struct ParseReport {
    std::size_t rows_in = 0;
    std::size_t accepted = 0;
    std::vector<RowReject> rejects;
    std::size_t duplicate_overwrites = 0;  // scores only: later row replaced an earlier one
};

struct ParsedArticles {
    std::vector<ArticleRecord> records;
    ParseReport report;
};

struct ParsedScores {
    ScoreStore store;
    ParseReport report;
};

ParsedArticles parse_articles(const std::string& path, FileFormat format);
ParsedScores parse_scores(const std::string& path, FileFormat format = FileFormat::csv);

void write_articles_jsonl(const std::string& path, const std::vector<ArticleRecord>& records);
void write_articles_csv(const std::string& path, const std::vector<ArticleRecord>& records);
void write_scores_csv(const std::string& path, const ScoreStore& store);

// Seconds-based time source so the harvester runs identically against wall
// time and a simulated clock.
class Clock {
  public:
    virtual ~Clock() = default;
    virtual double now() = 0;
    virtual void wait_until(double t) = 0;
};

class SimulatedClock : public Clock {
  public:
    double now() override { return t_; }
    void wait_until(double t) override {
        if (t > t_) t_ = t;
    }

  private:
    double t_ = 0.0;
};

class SystemClock : public Clock {
  public:
    SystemClock();
    double now() override;
    void wait_until(double t) override;

  private:
    double origin_;
};

class RateLimiter {
  public:
    RateLimiter(double per_second, Clock& clock);
    double acquire();  // blocks on the clock, returns the issue time

  private:
    double interval_;
    double next_free_ = 0.0;
    Clock& clock_;
};

struct ProviderFailure {
    bool retryable = false;
    std::string message;
};

using FetchResult = std::variant<BotometerMetrics, ProviderFailure>;

class ScoreProvider {
  public:
    virtual ~ScoreProvider() = default;
    virtual FetchResult fetch(const std::string& user_id) = 0;
};

// Deterministic stand-in provider: metrics are a pure function of the user id
// and the provider seed.
class HashScoreProvider : public ScoreProvider {
  public:
    explicit HashScoreProvider(std::uint64_t seed = 0) : seed_(seed) {}
    FetchResult fetch(const std::string& user_id) override;

  private:
    std::uint64_t seed_;
};

class FileScoreProvider : public ScoreProvider {
  public:
    explicit FileScoreProvider(ScoreStore store) : store_(std::move(store)) {}
    FetchResult fetch(const std::string& user_id) override;

  private:
    ScoreStore store_;
};

// Wraps another provider and injects failures: the first `retryable_failures`
// fetches of each user fail retryably, users listed in `permanent` always
// fail permanently.
class FlakyProvider : public ScoreProvider {
  public:
    FlakyProvider(ScoreProvider& inner, int retryable_failures)
        : inner_(inner), retryable_failures_(retryable_failures) {}
    void fail_permanently(const std::string& user_id) { permanent_.insert(user_id); }
    FetchResult fetch(const std::string& user_id) override;
    std::size_t calls() const { return calls_; }

  private:
    ScoreProvider& inner_;
    int retryable_failures_;
    std::map<std::string, int> seen_;
    std::set<std::string> permanent_;
    std::size_t calls_ = 0;
};

// Append-only JSONL of completed (user_id, metrics) entries, flushed per
// entry so a crash loses at most the in-flight request.
class HarvestCheckpoint {
  public:
    explicit HarvestCheckpoint(std::string path);

    const ScoreStore& entries() const { return entries_; }
    bool contains(const std::string& user_id) const { return entries_.count(user_id) != 0; }
    std::size_t size() const { return entries_.size(); }
    void append(const std::string& user_id, const BotometerMetrics& metrics);
    const std::string& path() const { return path_; }

  private:
    std::string path_;
    ScoreStore entries_;
    std::ofstream out_;
};

struct RetryPolicy {
    double initial_backoff = 1.0;
    double factor = 2.0;
    int max_attempts = 5;
};

struct HarvestReport {
    std::size_t requested = 0;
    std::size_t already_done = 0;
    std::size_t fetched = 0;
    std::vector<std::pair<std::string, std::string>> failures;
    std::vector<double> issue_times;
};

ScoreStore harvest_scores(const std::vector<std::string>& user_ids, ScoreProvider& provider,
                          double limit, HarvestCheckpoint& checkpoint, Clock& clock,
                          const RetryPolicy& retry = {}, HarvestReport* report = nullptr);

}  // namespace botamp::ingest
