#include <benchmark/benchmark.h>

#include "scev/clusterers.hpp"
#include "scev/io.hpp"

namespace {

void BM_LloydKMeans(benchmark::State& state) {
    const auto per_cluster = static_cast<std::size_t>(state.range(0));
    const scev::GaussianMix mix =
        scev::make_gaussians(per_cluster, {{0, 0}, {10, 0}, {0, 10}}, 0.8, 21);
    scev::ClustererConfig cfg;
    cfg.k = 3;
    cfg.rng_seed = 2;
    for (auto _ : state) {
        auto p = scev::lloyd_kmeans(mix.data, cfg);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_LloydKMeans)->RangeMultiplier(4)->Range(64, 16384);

void BM_SphericalKMeans(benchmark::State& state) {
    const auto per_cluster = static_cast<std::size_t>(state.range(0));
    const scev::GaussianMix mix =
        scev::make_gaussians(per_cluster, {{3, 1}, {-2, 4}, {1, -5}}, 0.3, 22);
    scev::ClustererConfig cfg;
    cfg.k = 3;
    cfg.rng_seed = 2;
    for (auto _ : state) {
        auto p = scev::spherical_kmeans(mix.data, cfg);
        benchmark::DoNotOptimize(p);
    }
}
BENCHMARK(BM_SphericalKMeans)->RangeMultiplier(4)->Range(64, 4096);

}  // namespace
