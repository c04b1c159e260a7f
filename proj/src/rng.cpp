#include "botamp/rng.hpp"

#include <cmath>
#include <limits>

namespace botamp {

std::size_t Rng::index(std::size_t n) {
    if (n == 0) return 0;
    const std::uint64_t span = static_cast<std::uint64_t>(n);
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % span;
    std::uint64_t x;
    do {
        x = gen_();
    } while (x >= limit);
    return static_cast<std::size_t>(x % span);
}

// Acklam's rational approximation to the standard normal quantile.
double inverse_normal_cdf(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;

    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
               (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

double Rng::normal() {
    // Avoid the exact endpoints where the quantile diverges.
    double u = next_double();
    if (u <= 0.0) u = 0x1.0p-53;
    return inverse_normal_cdf(u);
}

int Rng::geometric(double p, int cap) {
    double u = next_double();
    if (u <= 0.0) u = 0x1.0p-53;
    if (p >= 1.0) return 1;
    int k = 1 + static_cast<int>(std::floor(std::log(1.0 - u) / std::log(1.0 - p)));
    if (k < 1) k = 1;
    if (k > cap) k = cap;
    return k;
}

std::uint64_t derive_seed(std::uint64_t master, std::string_view stage) {
    // FNV-1a over the stage name, mixed with the master seed.
    std::uint64_t h = 1469598103934665603ULL;
    for (char ch : stage) {
        h ^= static_cast<unsigned char>(ch);
        h *= 1099511628211ULL;
    }
    return splitmix64(master ^ h);
}

}  // namespace botamp
