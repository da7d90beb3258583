#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scev/types.hpp"

namespace scev {

enum class EmptyClusterPolicy {
    kReseedFarthest,  // empty centroid jumps to the point farthest from its own centroid
    kDrop,            // the cluster disappears and k shrinks
};

struct ClustererConfig {
    Label k = 2;
    int max_iters = 100;
    double tol = 1e-6;  // convergence threshold on centroid movement
    std::uint64_t rng_seed = 0;
    EmptyClusterPolicy empty_cluster_policy = EmptyClusterPolicy::kReseedFarthest;
};

enum class Algorithm { kKMeans, kSeeded, kConstrained, kCop, kSpherical };

const char* algorithm_name(Algorithm a);
Algorithm algorithm_from_name(const std::string& name);

struct EnsembleEntry {
    Algorithm algorithm = Algorithm::kKMeans;
    ClustererConfig config;
    double alpha = 1.0;
    double beta = 1.0;
};

struct ReferencePolicy {
    enum class Kind { kUserIndex, kRandom };
    Kind kind = Kind::kUserIndex;
    std::size_t index = 0;
    std::uint64_t seed = 0;

    static ReferencePolicy user_index(std::size_t i) { return {Kind::kUserIndex, i, 0}; }
    static ReferencePolicy random(std::uint64_t seed) { return {Kind::kRandom, 0, seed}; }
};

struct EnsembleSpec {
    std::vector<EnsembleEntry> entries;
    ReferencePolicy reference;
};

// Lloyd iterations: assign to the nearest centroid by squared Euclidean
// distance, recompute means, stop when the largest centroid movement drops
// below tol or max_iters is reached. Unseeded initialization samples k
// distinct points with rng_seed. Deterministic throughout; ties go to the
// smallest centroid index.
Partition lloyd_kmeans(const Dataset& data, const ClustererConfig& cfg,
                       const std::optional<std::vector<double>>& init_centroids = std::nullopt);

// Centroids start at the per-class means of the seed objects; the iterations
// are unconstrained afterwards (seeded objects may move). Every class in
// 0..k-1 needs at least one seed.
Partition seeded_kmeans(const Dataset& data, const std::map<std::string, Label>& seeds,
                        const ClustererConfig& cfg);

// Like seeded_kmeans, but seed objects are pinned to their class in every
// assignment step, so the output satisfies labels[i] = seeds[i].
Partition constrained_kmeans(const Dataset& data, const std::map<std::string, Label>& seeds,
                             const ClustererConfig& cfg);

// COP constraint semantics: must-link groups are assigned as one block by
// mean squared distance, objects are processed in ascending index order, and
// a cluster is feasible only if no cannot-link partner already sits in it
// during the pass. The returned partition has zero violations; when some
// object has no feasible cluster the run stops with InfeasibleAssignment.
// The bundle's seeds field is ignored.
Partition cop_kmeans(const Dataset& data, const SupervisionBundle& constraints,
                     const ClustererConfig& cfg);

// Rows are unit-normalized and assigned by maximum cosine similarity;
// centroids are normalized member means. Optional seeds initialize centroids
// as in seeded_kmeans. Any all-zero row raises ZeroVector.
Partition spherical_kmeans(const Dataset& data, const ClustererConfig& cfg,
                           const std::optional<std::map<std::string, Label>>& seeds = std::nullopt);

// Runs every entry, canonicalizes the outputs, attaches (alpha, beta) and
// selects the reference per policy. Entry failures are rethrown tagged with
// the entry index and algorithm.
Ensemble generate_ensemble(const Dataset& data, const EnsembleSpec& spec,
                           const SupervisionBundle& supervision);

}  // namespace scev
