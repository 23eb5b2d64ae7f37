#include <benchmark/benchmark.h>

#include <numeric>
#include <random>

#include "attmatch/ingest.hpp"
#include "attmatch/profiles.hpp"
#include "attmatch/stats.hpp"
#include "attmatch/synth.hpp"
#include "attmatch/treatment.hpp"

using namespace attmatch;

namespace {

SynthDataset benchmark_dataset(std::size_t n_events) {
    SynthConfig config;
    config.n_users = 400;
    config.n_programs = 200;
    config.n_events = n_events;
    config.n_genres = 10;
    config.n_locations = 5;
    config.confounding_strength = 0.5;
    config.planted_effects = {{"pressure", "Dramas", 0.05}};
    config.seed = 12;
    return generate(config);
}

}  // namespace

static void BM_generate(benchmark::State& state) {
    for (auto _ : state) {
        const SynthDataset dataset = benchmark_dataset(static_cast<std::size_t>(state.range(0)));
        benchmark::DoNotOptimize(dataset.events.events.size());
    }
}
BENCHMARK(BM_generate)->Arg(10000)->Arg(50000)->Unit(benchmark::kMillisecond);

static void BM_join_nearest(benchmark::State& state) {
    const SynthDataset dataset = benchmark_dataset(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        const JoinedTable joined = join_nearest(dataset.events, dataset.attributes, 3600);
        benchmark::DoNotOptimize(joined.size());
    }
}
BENCHMARK(BM_join_nearest)->Arg(50000)->Unit(benchmark::kMillisecond);

static void BM_assign_quantile_tail(benchmark::State& state) {
    std::mt19937 rng(3);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    std::vector<double> values(n);
    std::uniform_real_distribution<double> uniform(-3.0, 3.0);
    for (double& v : values) v = uniform(rng);
    std::vector<std::int64_t> ids(n);
    std::iota(ids.begin(), ids.end(), 0);
    const TreatmentSpec spec{"x", Tail::High, 0.2};
    for (auto _ : state) {
        const TreatmentAssignment assignment = assign(values, ids, spec);
        benchmark::DoNotOptimize(assignment.n_treated);
    }
}
BENCHMARK(BM_assign_quantile_tail)->Arg(50000)->Arg(1000000)->Unit(benchmark::kMillisecond);

static void BM_full_heatmap(benchmark::State& state) {
    const SynthDataset dataset = benchmark_dataset(50000);
    const JoinedTable joined = join_nearest(dataset.events, dataset.attributes, 3600);
    const CovariateTable covariates =
        assemble_covariates(joined, ProfileKind::GenreFrequency, 16, 0);
    for (auto _ : state) {
        const Heatmap heatmap = build_heatmap(joined, covariates, default_specs(), {2.0, 2});
        benchmark::DoNotOptimize(heatmap.cells.size());
    }
}
BENCHMARK(BM_full_heatmap)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
