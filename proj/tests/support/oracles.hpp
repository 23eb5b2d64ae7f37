#pragma once

// Test-only reference implementations. Everything here is deliberately
// independent of the library code paths it is used to check.

#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <vector>

namespace oracles {

struct BruteHit {
    std::size_t ordinal = 0;
    std::int64_t id = 0;
    double distance2 = 0;
};

/// Linear scan nearest neighbor: strictly smaller distance wins, equal
/// distance goes to the lower id. Distances accumulate in ascending
/// dimension order.
inline BruteHit brute_force_nearest(std::span<const double> points, std::size_t dim,
                                    std::span<const std::int64_t> ids,
                                    std::span<const double> query) {
    BruteHit best;
    best.distance2 = std::numeric_limits<double>::infinity();
    best.id = std::numeric_limits<std::int64_t>::max();
    const std::size_t n = ids.size();
    for (std::size_t i = 0; i < n; ++i) {
        double d2 = 0;
        for (std::size_t d = 0; d < dim; ++d) {
            const double diff = query[d] - points[i * dim + d];
            d2 += diff * diff;
        }
        if (d2 < best.distance2 || (d2 == best.distance2 && ids[i] < best.id)) {
            best.distance2 = d2;
            best.id = ids[i];
            best.ordinal = i;
        }
    }
    return best;
}

/// High-precision mean.
inline double mean_long_double(std::span<const double> values) {
    long double sum = 0;
    for (double v : values) sum += v;
    return static_cast<double>(sum / static_cast<long double>(values.size()));
}

/// Two-pass sample variance (n-1 denominator) in extended precision.
inline double sample_variance_long_double(std::span<const double> values) {
    const long double n = static_cast<long double>(values.size());
    long double mean = 0;
    for (double v : values) mean += v;
    mean /= n;
    long double ss = 0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return static_cast<double>(ss / (n - 1));
}

/// Textbook Pearson correlation.
inline double pearson(std::span<const double> x, std::span<const double> y) {
    const long double n = static_cast<long double>(x.size());
    long double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    long double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return static_cast<double>(sxy / std::sqrt(sxx * syy));
}

/// Uniform points, deliberately mixing continuous coordinates with a coarse
/// grid so exact distance ties actually occur.
inline std::vector<double> random_points(std::mt19937& rng, std::size_t n, std::size_t dim,
                                         bool quantized) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> points(n * dim);
    for (double& x : points) {
        x = uniform(rng);
        if (quantized) x = std::round(x * 4.0) / 4.0;
    }
    return points;
}

}  // namespace oracles
