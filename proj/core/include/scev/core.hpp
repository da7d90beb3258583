#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "scev/types.hpp"

namespace scev {

// Connected components of the must-link graph over objects 0..n-1.
// Groups are returned sorted by smallest member, members ascending; the
// groups partition all n objects (singletons included). Idempotent.
std::vector<std::vector<std::size_t>> must_link_closure(
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs, std::size_t n);

// Checks ids against the dataset, transitively closes must_link and rejects
// bundles where a closed must-link pair is also cannot-linked.
SupervisionBundle validate_supervision(const SupervisionBundle& bundle, const Dataset& data);

// Relabels to 0..k'-1 in order of first appearance; kMissing is preserved
// and co-membership is unchanged.
Partition canonicalize(const Partition& p);

}  // namespace scev
