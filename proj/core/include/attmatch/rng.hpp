#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>

namespace attmatch {

/// Deterministic draws over a mt19937_64 stream. The standard <random>
/// distributions are implementation-defined, so the transforms live here:
/// identical seeds must yield identical datasets on every build.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n). Modulo bias is ~n * 2^-64, irrelevant for
    /// synthetic data sizes.
    std::uint64_t below(std::uint64_t n) { return engine_() % n; }

    /// Standard normal via Box-Muller (two uniforms per draw, no caching, so
    /// the stream position is a pure function of the call count).
    double normal() {
        double u1 = uniform();
        while (u1 == 0.0) u1 = uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }

    /// Index drawn from an unnormalized weight vector by inverse CDF.
    std::size_t categorical(std::span<const double> weights) {
        double total = 0;
        for (double w : weights) total += w;
        const double target = uniform() * total;
        double cumulative = 0;
        for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
            cumulative += weights[i];
            if (target < cumulative) return i;
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace attmatch
