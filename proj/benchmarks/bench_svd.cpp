#include <benchmark/benchmark.h>

#include <random>

#include "attmatch/svd.hpp"

using attmatch::Matrix;

static void BM_truncated_svd(benchmark::State& state) {
    std::mt19937 rng(7);
    const auto rows = static_cast<std::size_t>(state.range(0));
    const auto cols = static_cast<std::size_t>(state.range(1));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    Matrix m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) m(r, c) = uniform(rng) < 0.1 ? 1.0 : 0.0;
    }
    for (auto _ : state) {
        const attmatch::TruncatedSvd svd = attmatch::truncated_svd(m, 16);
        benchmark::DoNotOptimize(svd.sigma[0]);
    }
}
BENCHMARK(BM_truncated_svd)
    ->Args({100, 80})
    ->Args({400, 200})
    ->Args({1000, 400})
    ->Unit(benchmark::kMillisecond);
