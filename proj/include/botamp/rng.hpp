#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace botamp {

// Deterministic random source. mt19937_64 has a bit-exact stream mandated by
// the standard; the value transforms below are our own so that no
// implementation-defined std::*_distribution sneaks into outputs that must
// regenerate identically.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    // Uniform index in [0, n). Rejection sampling, no modulo bias.
    std::size_t index(std::size_t n);

    // Standard normal via rational inverse-CDF approximation (|rel err| < 1.2e-9).
    double normal();

    // Geometric on {1, 2, ...} with mean 1/p, capped to keep pathological
    // draws bounded.
    int geometric(double p, int cap = 1000);

    template <typename T>
    void shuffle(std::vector<T>& v) {
        if (v.size() < 2) return;
        for (std::size_t i = v.size() - 1; i > 0; --i) {
            std::size_t j = index(i + 1);
            std::swap(v[i], v[j]);
        }
    }

  private:
    std::mt19937_64 gen_;
};

// Stage-scoped seed derivation: hash the stage name into the master seed so
// that adding a stage never perturbs the streams of existing ones.
std::uint64_t derive_seed(std::uint64_t master, std::string_view stage);

// Standard normal quantile (Acklam's rational approximation, |rel err| < 1.2e-9).
double inverse_normal_cdf(double p);

}  // namespace botamp
