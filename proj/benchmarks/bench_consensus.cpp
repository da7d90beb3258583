#include <benchmark/benchmark.h>

#include "scev/consensus.hpp"
#include "scev/rng.hpp"

namespace {

scev::Ensemble random_ensemble(std::size_t n, std::size_t m, scev::Label space,
                               std::uint64_t seed) {
    scev::Rng rng(seed);
    std::vector<scev::Partition> parts;
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<scev::Label> labels(n);
        for (std::size_t i = 0; i < n; ++i)
            labels[i] = static_cast<scev::Label>(rng.below(static_cast<std::uint64_t>(space)));
        parts.emplace_back(std::move(labels), space);
    }
    return scev::Ensemble(std::move(parts), std::vector<scev::PartitionWeights>(m), 0);
}

// The consensus stage alone: contingency + alignment + relabel + vote.
void BM_ConsensusRun(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const scev::Ensemble e = random_ensemble(n, 5, 5, 3);
    for (auto _ : state) {
        auto audit = scev::consensus_run(e, scev::TiePolicy::kUnresolved, false);
        benchmark::DoNotOptimize(audit);
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_ConsensusRun)->RangeMultiplier(4)->Range(1000, 256000)->Complexity(benchmark::oN);

void BM_WeightedVote(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const scev::Ensemble e = random_ensemble(n, 5, 5, 9);
    const std::vector<double> omega(5, 1.0);
    for (auto _ : state) {
        auto r = scev::weighted_vote(e.partitions(), omega, scev::TiePolicy::kUnresolved);
        benchmark::DoNotOptimize(r);
    }
    state.SetComplexityN(static_cast<benchmark::IterationCount>(n));
}
BENCHMARK(BM_WeightedVote)->RangeMultiplier(4)->Range(1000, 256000)->Complexity(benchmark::oN);

}  // namespace
