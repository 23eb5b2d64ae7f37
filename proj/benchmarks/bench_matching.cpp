#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "attmatch/matching.hpp"

using attmatch::MatchResult;
using attmatch::NeighborIndex;
using attmatch::PointSet;

namespace {

PointSet random_points(std::mt19937& rng, std::size_t n, std::size_t dim) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    PointSet set;
    set.dim = dim;
    set.data.resize(n * dim);
    for (double& x : set.data) x = uniform(rng);
    set.ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) set.ids[i] = static_cast<std::int64_t>(i);
    set.rows.resize(n);
    return set;
}

/// Profile-like points: a handful of distinct profile rows plus a smooth
/// time-feature tail, the shape the matcher actually sees in an analysis.
PointSet clustered_points(std::mt19937& rng, std::size_t n, std::size_t dim, std::size_t n_profiles) {
    std::uniform_real_distribution<double> uniform(-1.0, 1.0);
    std::vector<double> profiles(n_profiles * (dim - 4));
    for (double& x : profiles) x = uniform(rng);

    PointSet set;
    set.dim = dim;
    set.data.resize(n * dim);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t p = rng() % n_profiles;
        for (std::size_t d = 0; d + 4 < dim; ++d) set.data[i * dim + d] = profiles[p * (dim - 4) + d];
        for (std::size_t d = dim - 4; d < dim; ++d) set.data[i * dim + d] = uniform(rng);
    }
    set.ids.resize(n);
    for (std::size_t i = 0; i < n; ++i) set.ids[i] = static_cast<std::int64_t>(i);
    set.rows.resize(n);
    return set;
}

}  // namespace

static void BM_index_build(benchmark::State& state) {
    std::mt19937 rng(1);
    const auto controls = random_points(rng, static_cast<std::size_t>(state.range(0)), 14);
    for (auto _ : state) {
        NeighborIndex index(controls);
        benchmark::DoNotOptimize(index.size());
    }
}
BENCHMARK(BM_index_build)->Arg(1000)->Arg(10000)->Arg(40000);

static void BM_match_uniform(benchmark::State& state) {
    std::mt19937 rng(2);
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    const auto controls = random_points(rng, 40000, dim);
    const auto treated = random_points(rng, 2000, dim);
    const NeighborIndex index(controls);
    for (auto _ : state) {
        const MatchResult result = attmatch::match_treated(index, treated, 2);
        benchmark::DoNotOptimize(result.pairs.size());
    }
    state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_match_uniform)->Arg(4)->Arg(14)->Arg(20);

static void BM_match_profile_shaped(benchmark::State& state) {
    std::mt19937 rng(3);
    const std::size_t dim = static_cast<std::size_t>(state.range(0));
    const auto controls = clustered_points(rng, 40000, dim, 400);
    const auto treated = clustered_points(rng, 2000, dim, 400);
    const NeighborIndex index(controls);
    for (auto _ : state) {
        const MatchResult result = attmatch::match_treated(index, treated, 2);
        benchmark::DoNotOptimize(result.pairs.size());
    }
    state.SetItemsProcessed(state.iterations() * 2000);
}
BENCHMARK(BM_match_profile_shaped)->Arg(14)->Arg(20);

static void BM_brute_force_baseline(benchmark::State& state) {
    std::mt19937 rng(4);
    const std::size_t dim = 14;
    const auto controls = random_points(rng, 40000, dim);
    const auto treated = random_points(rng, 200, dim);
    for (auto _ : state) {
        double checksum = 0;
        for (std::size_t i = 0; i < treated.size(); ++i) {
            double best = 1e300;
            for (std::size_t j = 0; j < controls.size(); ++j) {
                const double d2 = attmatch::squared_distance(treated.point(i), controls.point(j));
                if (d2 < best) best = d2;
            }
            checksum += best;
        }
        benchmark::DoNotOptimize(checksum);
    }
    state.SetItemsProcessed(state.iterations() * 200);
}
BENCHMARK(BM_brute_force_baseline);
