#include "botamp/stats.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <fstream>
#include <map>

#include "botamp/csv.hpp"
#include "botamp/errors.hpp"
#include "botamp/scoring.hpp"

namespace botamp::stats {

namespace {

std::string normalize_discipline(std::string_view raw) {
    std::string s;
    s.reserve(raw.size());
    for (char ch : raw) s.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

const std::array<const char*, 12> kHealthDisciplines = {
    "biochemistry",
    "genetics and molecular biology",
    "medicine",
    "life sciences",
    "health sciences",
    "psychology",
    "dentistry",
    "health professions",
    "nursing",
    "pharmacology, toxicology, and pharmaceutics",
    "immunology and microbiology",
    "neuroscience",
};

}  // namespace

bool is_health_discipline(std::string_view discipline) {
    const std::string norm = normalize_discipline(discipline);
    for (const char* h : kHealthDisciplines) {
        if (norm == h) return true;
    }
    return false;
}

namespace {

struct GroupAccumulator {
    std::size_t n_spammed = 0;
    std::vector<double> scores;
};

std::vector<GroupSummary> summarize_groups(const std::vector<LabeledArticle>& articles,
                                           GroupKey key) {
    if (articles.empty()) throw ValidationError("group summary of empty article set");

    std::map<std::string, GroupAccumulator> groups;
    auto add = [&](const std::string& k, const LabeledArticle& a) {
        auto& g = groups[k];
        if (a.is_spammed) ++g.n_spammed;
        g.scores.push_back(a.overall_score);
    };

    for (const auto& a : articles) {
        switch (key) {
            case GroupKey::discipline:
                add(a.discipline, a);
                break;
            case GroupKey::author_location:
                add(a.author_location, a);
                break;
            case GroupKey::health_partition:
                add("all", a);
                add(is_health_discipline(a.discipline) ? "health" : "other", a);
                break;
        }
    }

    std::vector<GroupSummary> out;
    out.reserve(groups.size());
    for (auto& [k, g] : groups) {
        GroupSummary s;
        s.key = k;
        s.n_articles = g.scores.size();
        s.n_spammed = g.n_spammed;
        s.ratio = static_cast<double>(g.n_spammed) / static_cast<double>(s.n_articles);
        s.median_overall_score = scoring::median(std::move(g.scores));
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::vector<GroupSummary> group_spam_ratio(const std::vector<LabeledArticle>& articles,
                                           GroupKey key) {
    return summarize_groups(articles, key);
}

std::vector<GroupSummary> group_median_score(const std::vector<LabeledArticle>& articles,
                                             GroupKey key) {
    if (key == GroupKey::health_partition) {
        throw ValidationError("group_median_score expects discipline or author_location");
    }
    return summarize_groups(articles, key);
}

namespace {

// Cody's three-piece rational approximation (Math. Comp. 23, 1969), the same
// scheme classic libm erfc implementations use.
constexpr double kErfThresh = 0.46875;
constexpr double kErfcBig = 26.543;  // erfc underflows to 0 past here
constexpr double kInvSqrtPi = 5.6418958354775628695e-1;

double erf_small(double x) {
    static const double a[5] = {3.16112374387056560e0, 1.13864154151050156e2,
                                3.77485237685302021e2, 3.20937758913846947e3,
                                1.85777706184603153e-1};
    static const double b[4] = {2.36012909523441209e1, 2.44024637934444173e2,
                                1.28261652607737228e3, 2.84423683343917062e3};
    const double z = x * x;
    double num = a[4] * z;
    double den = z;
    for (int i = 0; i < 3; ++i) {
        num = (num + a[i]) * z;
        den = (den + b[i]) * z;
    }
    return x * (num + a[3]) / (den + b[3]);
}

// exp(-y^2) split so the argument reduction keeps full precision.
double exp_neg_y_squared(double y) {
    const double ysq = std::floor(y * 16.0) / 16.0;
    const double del = (y - ysq) * (y + ysq);
    return std::exp(-ysq * ysq) * std::exp(-del);
}

double erfc_mid(double y) {
    static const double c[9] = {5.64188496988670089e-1, 8.88314979438837594e0,
                                6.61191906371416295e1,  2.98635138197400131e2,
                                8.81952221241769090e2,  1.71204761263407058e3,
                                2.05107837782607147e3,  1.23033935479799725e3,
                                2.15311535474403846e-8};
    static const double d[8] = {1.57449261107098347e1, 1.17693950891312499e2,
                                5.37181101862009858e2, 1.62138957456669019e3,
                                3.29079923573345963e3, 4.36261909014324716e3,
                                3.43936767414372164e3, 1.23033935480374942e3};
    double num = c[8] * y;
    double den = y;
    for (int i = 0; i < 7; ++i) {
        num = (num + c[i]) * y;
        den = (den + d[i]) * y;
    }
    return exp_neg_y_squared(y) * (num + c[7]) / (den + d[7]);
}

double erfc_far(double y) {
    if (y >= kErfcBig) return 0.0;
    static const double p[6] = {3.05326634961232344e-1, 3.60344899949804439e-1,
                                1.25781726111229246e-1, 1.60837851487422766e-2,
                                6.58749161529837803e-4, 1.63153871373020978e-2};
    static const double q[5] = {2.56852019228982242e0, 1.87295284992346047e0,
                                5.27905102951428412e-1, 6.05183413124413191e-2,
                                2.33520497626869185e-3};
    const double z = 1.0 / (y * y);
    double num = p[5] * z;
    double den = z;
    for (int i = 0; i < 4; ++i) {
        num = (num + p[i]) * z;
        den = (den + q[i]) * z;
    }
    double r = z * (num + p[4]) / (den + q[4]);
    r = (kInvSqrtPi - r) / y;
    return exp_neg_y_squared(y) * r;
}

}  // namespace

double erfc_approx(double x) {
    const double y = std::fabs(x);
    double result;
    if (y <= kErfThresh) result = 1.0 - erf_small(x);
    else if (y <= 4.0) result = erfc_mid(y);
    else result = erfc_far(y);
    if (x < 0.0 && y > kErfThresh) result = 2.0 - result;
    return result;
}

double normal_cdf(double z) {
    return 0.5 * erfc_approx(-z / std::sqrt(2.0));
}

TwoTailedP normal_two_tailed_p(double z) {
    if (!std::isfinite(z)) throw ValidationError("z must be finite");
    // Materializing Phi as a double loses the tail to rounding once |z|
    // passes ~8.3; that loss is what the underflow flag reports.
    const double phi = 1.0 - 0.5 * erfc_approx(std::fabs(z) / std::sqrt(2.0));
    double p = 2.0 * (1.0 - phi);
    if (p < 0.0) p = 0.0;
    if (p > 1.0) p = 1.0;
    TwoTailedP out;
    out.p = p;
    out.underflow = (p == 0.0);
    return out;
}

ZTestResult two_proportion_ztest(std::size_t x1, std::size_t n1, std::size_t x2, std::size_t n2) {
    if (n1 < 1 || n2 < 1) throw ValidationError("z-test requires n >= 1 in both groups");
    if (x1 > n1 || x2 > n2) throw ValidationError("z-test requires x <= n in both groups");

    ZTestResult r;
    r.p1 = static_cast<double>(x1) / static_cast<double>(n1);
    r.p2 = static_cast<double>(x2) / static_cast<double>(n2);
    r.pooled = static_cast<double>(x1 + x2) / static_cast<double>(n1 + n2);
    if (r.pooled <= 0.0 || r.pooled >= 1.0) {
        throw ValidationError("pooled proportion is 0 or 1: zero standard error");
    }
    const double se = std::sqrt(r.pooled * (1.0 - r.pooled) *
                                (1.0 / static_cast<double>(n1) + 1.0 / static_cast<double>(n2)));
    r.z = (r.p1 - r.p2) / se;
    const TwoTailedP p = normal_two_tailed_p(r.z);
    r.p_two_tailed = p.p;
    r.underflow = p.underflow;
    return r;
}

void write_groups_csv(const std::string& path, const std::vector<GroupSummary>& groups) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open for writing: " + path);
    out << csv::encode_row({"key", "n", "n_spammed", "ratio", "median_score"});
    for (const auto& g : groups) {
        out << csv::encode_row({g.key, std::to_string(g.n_articles), std::to_string(g.n_spammed),
                                csv::format_double(g.ratio),
                                csv::format_double(g.median_overall_score)});
    }
    if (!out) throw IoError("write failed: " + path);
}

}  // namespace botamp::stats
