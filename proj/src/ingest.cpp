#include "botamp/ingest.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "botamp/csv.hpp"
#include "botamp/errors.hpp"

namespace botamp::ingest {

namespace {

using nlohmann::json;

constexpr std::array<const char*, 8> kArticleColumns = {
    "altmetric_id", "discipline",      "journal",           "research_type",
    "publisher",    "altmetric_score", "tweeter_user_ids",  "tweeter_locations"};

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

bool metrics_in_range(const BotometerMetrics& m) {
    for (std::size_t i = 0; i < BotometerMetrics::kCount; ++i) {
        if (!std::isfinite(m[i]) || m[i] < 0.0 || m[i] > 5.0) return false;
    }
    return true;
}

// Returns an error message, or empty when the record is valid. Fills in the
// "unknown" sentinel for empty locations and reduces the discipline.
std::string finalize_record(ArticleRecord& r) {
    if (r.altmetric_id.empty()) return "empty altmetric_id";
    try {
        r.discipline = select_primary_discipline(r.discipline);
    } catch (const ValidationError&) {
        return "empty discipline";
    }
    if (r.journal.empty()) return "empty journal";
    if (r.research_type.empty()) return "empty research_type";
    if (r.publisher.empty()) return "empty publisher";
    if (!std::isfinite(r.altmetric_score) || r.altmetric_score < 0.0) {
        return "altmetric_score must be a non-negative number";
    }
    if (r.tweeter_user_ids.empty()) return "zero tweeters";
    if (r.tweeter_locations.size() != r.tweeter_user_ids.size()) {
        return "tweeter_locations length differs from tweeter_user_ids";
    }
    for (const auto& id : r.tweeter_user_ids) {
        if (id.empty()) return "empty tweeter user id";
    }
    for (auto& loc : r.tweeter_locations) {
        if (loc.empty()) loc = kUnknownCategory;
    }
    return {};
}

std::string parse_article_json(const std::string& line, ArticleRecord& out) {
    const json j = json::parse(line, nullptr, false);
    if (j.is_discarded()) return "invalid JSON";
    if (!j.is_object()) return "row is not a JSON object";
    for (const char* key : kArticleColumns) {
        if (!j.contains(key)) return std::string("missing field ") + key;
    }
    auto str = [&](const char* key, std::string& dst) {
        if (!j[key].is_string()) return false;
        dst = j[key].get<std::string>();
        return true;
    };
    if (!str("altmetric_id", out.altmetric_id)) return "altmetric_id must be a string";
    if (!str("discipline", out.discipline)) return "discipline must be a string";
    if (!str("journal", out.journal)) return "journal must be a string";
    if (!str("research_type", out.research_type)) return "research_type must be a string";
    if (!str("publisher", out.publisher)) return "publisher must be a string";
    if (!j["altmetric_score"].is_number()) return "altmetric_score must be a number";
    out.altmetric_score = j["altmetric_score"].get<double>();
    for (const char* key : {"tweeter_user_ids", "tweeter_locations"}) {
        if (!j[key].is_array()) return std::string(key) + " must be an array";
        for (const auto& e : j[key]) {
            if (!e.is_string()) return std::string(key) + " must contain strings";
        }
    }
    out.tweeter_user_ids = j["tweeter_user_ids"].get<std::vector<std::string>>();
    out.tweeter_locations = j["tweeter_locations"].get<std::vector<std::string>>();
    return {};
}

std::string parse_article_csv_row(const std::vector<std::string>& row, ArticleRecord& out) {
    if (row.size() != kArticleColumns.size()) {
        return "expected " + std::to_string(kArticleColumns.size()) + " fields, got " +
               std::to_string(row.size());
    }
    out.altmetric_id = row[0];
    out.discipline = row[1];
    out.journal = row[2];
    out.research_type = row[3];
    out.publisher = row[4];
    const auto score = csv::parse_double(row[5]);
    if (!score) return "altmetric_score must be a number";
    out.altmetric_score = *score;
    out.tweeter_user_ids = csv::split(row[6], ';');
    out.tweeter_locations = csv::split(row[7], ';');
    return {};
}

}  // namespace

FileFormat detect_format(const std::string& path) {
    const auto ext = std::filesystem::path(path).extension().string();
    if (ext == ".jsonl" || ext == ".json") return FileFormat::jsonl;
    if (ext == ".csv") return FileFormat::csv;
    throw ConfigError("cannot infer file format from extension: " + path);
}

std::string select_primary_discipline(const std::string& raw) {
    const std::size_t semi = raw.find(';');
    const std::string primary = trim(semi == std::string::npos ? raw : raw.substr(0, semi));
    if (primary.empty()) throw ValidationError("empty discipline");
    return primary;
}

ParsedArticles parse_articles(const std::string& path, FileFormat format) {
    ParsedArticles out;
    std::set<std::string> ids;

    auto accept = [&](ArticleRecord&& r, std::string err, std::size_t line) {
        ++out.report.rows_in;
        if (err.empty()) err = finalize_record(r);
        if (!err.empty()) {
            out.report.rejects.push_back({line, std::move(err)});
            return;
        }
        if (!ids.insert(r.altmetric_id).second) {
            throw ValidationError("duplicate altmetric_id: " + r.altmetric_id);
        }
        out.records.push_back(std::move(r));
        ++out.report.accepted;
    };

    if (format == FileFormat::jsonl) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open: " + path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            ArticleRecord r;
            std::string err = parse_article_json(line, r);
            accept(std::move(r), std::move(err), lineno);
        }
    } else {
        const auto rows = csv::read_file(path);
        if (rows.empty()) throw ValidationError("missing header row: " + path);
        const std::vector<std::string> expected(kArticleColumns.begin(), kArticleColumns.end());
        if (rows[0] != expected) {
            throw ValidationError("article CSV header must be exactly: " +
                                  csv::join(expected, ','));
        }
        for (std::size_t i = 1; i < rows.size(); ++i) {
            ArticleRecord r;
            std::string err = parse_article_csv_row(rows[i], r);
            accept(std::move(r), std::move(err), i + 1);
        }
    }
    return out;
}

ParsedScores parse_scores(const std::string& path, FileFormat format) {
    ParsedScores out;

    auto reject = [&](std::size_t line, std::string reason) {
        out.report.rejects.push_back({line, std::move(reason)});
    };
    auto accept = [&](const std::string& user_id, const BotometerMetrics& m, std::size_t line) {
        if (user_id.empty()) {
            reject(line, "empty user_id");
            return;
        }
        if (!metrics_in_range(m)) {
            reject(line, "metric outside [0, 5]");
            return;
        }
        if (!out.store.emplace(user_id, m).second) {
            out.store[user_id] = m;
            ++out.report.duplicate_overwrites;
        }
        ++out.report.accepted;
    };

    if (format == FileFormat::csv) {
        const auto rows = csv::read_file(path);
        if (rows.empty()) throw ValidationError("missing header row: " + path);
        std::vector<std::string> expected = {"user_id"};
        for (const char* name : BotometerMetrics::kNames) expected.push_back(name);
        if (rows[0] != expected) {
            throw ValidationError("score CSV header must be exactly: " + csv::join(expected, ','));
        }
        for (std::size_t i = 1; i < rows.size(); ++i) {
            const auto& row = rows[i];
            ++out.report.rows_in;
            if (row.size() != expected.size()) {
                reject(i + 1, "expected " + std::to_string(expected.size()) + " fields");
                continue;
            }
            BotometerMetrics m;
            bool numeric = true;
            for (std::size_t k = 0; k < BotometerMetrics::kCount; ++k) {
                const auto v = csv::parse_double(row[k + 1]);
                if (!v) {
                    numeric = false;
                    break;
                }
                m[k] = *v;
            }
            if (!numeric) {
                reject(i + 1, "metric is not a number");
                continue;
            }
            accept(row[0], m, i + 1);
        }
    } else {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open: " + path);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            ++out.report.rows_in;
            const json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("user_id") ||
                !j["user_id"].is_string()) {
                reject(lineno, "invalid score object");
                continue;
            }
            BotometerMetrics m;
            bool numeric = true;
            for (std::size_t k = 0; k < BotometerMetrics::kCount; ++k) {
                const char* name = BotometerMetrics::kNames[k];
                if (!j.contains(name) || !j[name].is_number()) {
                    numeric = false;
                    break;
                }
                m[k] = j[name].get<double>();
            }
            if (!numeric) {
                reject(lineno, "missing or non-numeric metric");
                continue;
            }
            accept(j["user_id"].get<std::string>(), m, lineno);
        }
    }
    return out;
}

void write_articles_jsonl(const std::string& path, const std::vector<ArticleRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    for (const auto& r : records) {
        json j;
        j["altmetric_id"] = r.altmetric_id;
        j["discipline"] = r.discipline;
        j["journal"] = r.journal;
        j["research_type"] = r.research_type;
        j["publisher"] = r.publisher;
        j["altmetric_score"] = r.altmetric_score;
        j["tweeter_user_ids"] = r.tweeter_user_ids;
        j["tweeter_locations"] = r.tweeter_locations;
        out << j.dump() << '\n';
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_articles_csv(const std::string& path, const std::vector<ArticleRecord>& records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << csv::encode_row(
        std::vector<std::string>(kArticleColumns.begin(), kArticleColumns.end()));
    for (const auto& r : records) {
        out << csv::encode_row({r.altmetric_id, r.discipline, r.journal, r.research_type,
                                r.publisher, csv::format_double(r.altmetric_score),
                                csv::join(r.tweeter_user_ids, ';'),
                                csv::join(r.tweeter_locations, ';')});
    }
    if (!out) throw IoError("write failed: " + path);
}

void write_scores_csv(const std::string& path, const ScoreStore& store) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    std::vector<std::string> header = {"user_id"};
    for (const char* name : BotometerMetrics::kNames) header.push_back(name);
    out << csv::encode_row(header);
    for (const auto& [user, m] : store) {
        std::vector<std::string> row = {user};
        for (std::size_t k = 0; k < BotometerMetrics::kCount; ++k) {
            row.push_back(csv::format_double(m[k]));
        }
        out << csv::encode_row(row);
    }
    if (!out) throw IoError("write failed: " + path);
}

SystemClock::SystemClock() {
    origin_ = std::chrono::duration<double>(
                  std::chrono::steady_clock::now().time_since_epoch())
                  .count();
}

double SystemClock::now() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
               .count() -
           origin_;
}

void SystemClock::wait_until(double t) {
    const double delta = t - now();
    if (delta > 0.0) std::this_thread::sleep_for(std::chrono::duration<double>(delta));
}

RateLimiter::RateLimiter(double per_second, Clock& clock) : clock_(clock) {
    if (!(per_second > 0.0)) throw ConfigError("rate limit must be positive");
    interval_ = 1.0 / per_second;
}

double RateLimiter::acquire() {
    const double t = std::max(clock_.now(), next_free_);
    clock_.wait_until(t);
    next_free_ = t + interval_;
    return t;
}

FetchResult HashScoreProvider::fetch(const std::string& user_id) {
    std::uint64_t h = 1469598103934665603ULL ^ seed_;
    for (char c : user_id) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    BotometerMetrics m;
    for (std::size_t k = 0; k < BotometerMetrics::kCount; ++k) {
        std::uint64_t x = h + (k + 1) * 0x9e3779b97f4a7c15ULL;
        x ^= x >> 30;
        x *= 0xbf58476d1ce4e5b9ULL;
        x ^= x >> 27;
        x *= 0x94d049bb133111ebULL;
        x ^= x >> 31;
        m[k] = static_cast<double>(x >> 11) * 0x1.0p-53 * 5.0;
    }
    return m;
}

FetchResult FileScoreProvider::fetch(const std::string& user_id) {
    auto it = store_.find(user_id);
    if (it == store_.end()) {
        return ProviderFailure{false, "no score available for user " + user_id};
    }
    return it->second;
}

FetchResult FlakyProvider::fetch(const std::string& user_id) {
    ++calls_;
    if (permanent_.count(user_id) != 0) {
        return ProviderFailure{false, "permanent failure for " + user_id};
    }
    int& n = seen_[user_id];
    if (n < retryable_failures_) {
        ++n;
        return ProviderFailure{true, "transient failure for " + user_id};
    }
    return inner_.fetch(user_id);
}

HarvestCheckpoint::HarvestCheckpoint(std::string path) : path_(std::move(path)) {
    if (std::filesystem::exists(path_)) {
        std::ifstream in(path_, std::ios::binary);
        if (!in) throw IoError("cannot open checkpoint: " + path_);
        std::string line;
        std::size_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (trim(line).empty()) continue;
            const json j = json::parse(line, nullptr, false);
            if (j.is_discarded() || !j.is_object() || !j.contains("user_id") ||
                !j["user_id"].is_string()) {
                throw ValidationError("corrupt checkpoint entry at line " +
                                      std::to_string(lineno) + ": " + path_);
            }
            BotometerMetrics m;
            for (std::size_t k = 0; k < BotometerMetrics::kCount; ++k) {
                const char* name = BotometerMetrics::kNames[k];
                if (!j.contains(name) || !j[name].is_number()) {
                    throw ValidationError("corrupt checkpoint entry at line " +
                                          std::to_string(lineno) + ": " + path_);
                }
                m[k] = j[name].get<double>();
            }
            if (!metrics_in_range(m)) {
                throw ValidationError("corrupt checkpoint entry at line " +
                                      std::to_string(lineno) + ": " + path_);
            }
            entries_[j["user_id"].get<std::string>()] = m;
        }
    }
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) throw IoError("cannot open checkpoint for append: " + path_);
}

void HarvestCheckpoint::append(const std::string& user_id, const BotometerMetrics& metrics) {
    json j;
    j["user_id"] = user_id;
    for (std::size_t k = 0; k < BotometerMetrics::kCount; ++k) {
        j[BotometerMetrics::kNames[k]] = metrics[k];
    }
    out_ << j.dump() << '\n';
    out_.flush();
    if (!out_) throw IoError("checkpoint append failed: " + path_);
    entries_[user_id] = metrics;
}

ScoreStore harvest_scores(const std::vector<std::string>& user_ids, ScoreProvider& provider,
                          double limit, HarvestCheckpoint& checkpoint, Clock& clock,
                          const RetryPolicy& retry, HarvestReport* report) {
    if (retry.max_attempts < 1) throw ConfigError("retry max_attempts must be at least 1");
    RateLimiter limiter(limit, clock);
    HarvestReport rep;

    std::set<std::string> seen;
    for (const auto& id : user_ids) {
        if (id.empty()) throw ValidationError("empty user id in harvest request");
        if (!seen.insert(id).second) continue;
        ++rep.requested;
        if (checkpoint.contains(id)) {
            ++rep.already_done;
            continue;
        }
        double backoff = retry.initial_backoff;
        std::string last_error;
        bool done = false;
        for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
            rep.issue_times.push_back(limiter.acquire());
            FetchResult r = provider.fetch(id);
            if (auto* m = std::get_if<BotometerMetrics>(&r)) {
                checkpoint.append(id, *m);
                ++rep.fetched;
                done = true;
                break;
            }
            const auto& f = std::get<ProviderFailure>(r);
            last_error = f.message;
            if (!f.retryable) break;
            if (attempt < retry.max_attempts) {
                clock.wait_until(clock.now() + backoff);
                backoff *= retry.factor;
            }
        }
        if (!done) rep.failures.emplace_back(id, last_error);
    }

    if (report != nullptr) *report = std::move(rep);
    return checkpoint.entries();
}

}  // namespace botamp::ingest
