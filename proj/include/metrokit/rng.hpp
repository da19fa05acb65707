#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace metrokit {

// Deterministic pseudo-random generator used everywhere randomness is needed.
// Engine: std::mt19937_64 (bit-exact across platforms). Variates are derived
// from raw engine output by explicit formulas, never through
// std::*_distribution, so that identical seeds give identical streams on any
// standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // Uniform in [0, 1) with 53-bit resolution.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller on two fresh uniforms.
    double normal() {
        double u1 = 0.0;
        do {
            u1 = uniform();
        } while (u1 <= 0.0);
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    int bernoulli(double p) { return uniform() < p ? 1 : 0; }

    // Independent substream; mixing, not splitting, so streams never collide
    // for distinct tags in practice.
    Rng spawn(std::uint64_t tag) {
        std::uint64_t z = (0x9E3779B97F4A7C15ULL * (tag + 1)) ^ engine_();
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return Rng(z ^ (z >> 31));
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace metrokit
