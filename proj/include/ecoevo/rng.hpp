#pragma once
// Deterministic random source.
//
// All stochastic components draw through this wrapper so that a (seed, build)
// pair reproduces runs bit for bit.  Transforms are written out explicitly
// instead of using std distributions, whose sequences vary across standard
// library implementations.

#include <cmath>
#include <cstdint>
#include <random>

namespace ecoevo {

/// splitmix64 finalizer; used both for seed conditioning and stream derivation.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

/// Seed for replicate `idx` of an ensemble keyed by `master`.  Distinct
/// replicates get decorrelated generator states; the map is pure so parallel
/// and sequential ensemble execution see identical streams.
inline std::uint64_t derive_stream(std::uint64_t master, std::uint64_t idx) {
    return mix64(master ^ mix64(idx + 0x51ed2701a9e5a3c7ull));
}

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(mix64(seed)) {}

    /// Uniform on [0,1) with 53 random bits.
    double uniform() {
        return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
    }

    /// Uniform on [0,1], never exactly 0 (safe as a log argument).
    double uniform_pos() {
        return 1.0 - uniform();
    }

    /// Exponential waiting time with the given rate; +inf when the rate is 0.
    double exp_time(double rate) {
        if (rate <= 0.0) return std::numeric_limits<double>::infinity();
        return -std::log(uniform_pos()) / rate;
    }

    /// Standard normal via the polar method (pairs cached).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u, v, s;
        do {
            u = 2.0 * uniform() - 1.0;
            v = 2.0 * uniform() - 1.0;
            s = u * u + v * v;
        } while (s >= 1.0 || s == 0.0);
        const double f = std::sqrt(-2.0 * std::log(s) / s);
        spare_ = v * f;
        have_spare_ = true;
        return u * f;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection against the largest multiple of n; unbiased.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = gen_();
        } while (x >= limit);
        return x % n;
    }

    std::uint64_t raw() { return gen_(); }

private:
    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

}  // namespace ecoevo
