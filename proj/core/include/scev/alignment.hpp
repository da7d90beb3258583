#pragma once

#include <cstddef>
#include <vector>

#include "scev/types.hpp"

namespace scev {

// Co-occurrence counts between two partitions' labels. Objects missing in
// either partition contribute nothing.
struct ContingencyTable {
    std::size_t k_src = 0;
    std::size_t k_tgt = 0;
    std::vector<double> counts;  // row-major k_src x k_tgt
    double n_effective = 0.0;

    double at(std::size_t a, std::size_t b) const { return counts[a * k_tgt + b]; }
    double& at(std::size_t a, std::size_t b) { return counts[a * k_tgt + b]; }
};

ContingencyTable contingency_table(const Partition& p, const Partition& ref);

// Injective source->target mapping maximizing the summed overlap
// sum_a counts[a][mapping(a)]. When k_src != k_tgt the table is zero-padded
// to square; source labels matched to padding map to fresh target labels
// k_tgt, k_tgt+1, ... in ascending source order. Among equally optimal
// mappings the lexicographically smallest assignment vector
// (mapping(0), mapping(1), ...) is returned, with every fresh label
// comparing equal to k_tgt. Hungarian solve is O(k^3); the tie-break
// refinement re-solves only when a smaller tight candidate exists.
AlignmentMap optimal_alignment(const ContingencyTable& t);

// Exhaustive oracle with the identical contract, for max(k_src, k_tgt) <= 8.
AlignmentMap brute_force_alignment(const ContingencyTable& t);

// Relabels p through m; kMissing is preserved.
Partition apply_alignment(const Partition& p, const AlignmentMap& m);

}  // namespace scev
