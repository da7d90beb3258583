#include <benchmark/benchmark.h>

#include "scev/alignment.hpp"
#include "scev/rng.hpp"

namespace {

scev::ContingencyTable random_table(std::size_t k, std::uint64_t seed) {
    scev::Rng rng(seed);
    scev::ContingencyTable t;
    t.k_src = t.k_tgt = k;
    t.counts.reserve(k * k);
    for (std::size_t i = 0; i < k * k; ++i) t.counts.push_back(100.0 * rng.uniform01());
    return t;
}

void BM_OptimalAlignment(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const scev::ContingencyTable t = random_table(k, 7);
    for (auto _ : state) {
        auto m = scev::optimal_alignment(t);
        benchmark::DoNotOptimize(m);
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(k));
}
BENCHMARK(BM_OptimalAlignment)->RangeMultiplier(2)->Range(4, 64)->Complexity(benchmark::oNCubed);

void BM_BruteForceAlignment(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    const scev::ContingencyTable t = random_table(k, 11);
    for (auto _ : state) {
        auto m = scev::brute_force_alignment(t);
        benchmark::DoNotOptimize(m);
    }
}
BENCHMARK(BM_BruteForceAlignment)->DenseRange(4, 8, 1);

}  // namespace
