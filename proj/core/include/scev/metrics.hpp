#pragma once

#include "scev/types.hpp"

namespace scev {

struct MetricReport {
    double ari = 0.0;        // adjusted Rand index, [-1, 1]
    double nmi = 0.0;        // normalized mutual information, [0, 1]
    double purity = 0.0;     // [0, 1]
    double agreement = 0.0;  // fraction of equal labels after optimal alignment
    long long constraint_violations = 0;
};

// Objects missing in either partition are excluded pairwise from all of
// these; fewer than two jointly labeled objects raises TooFewObjects.

// Hubert-Arabie ARI. Pair counts are combined in integer arithmetic so the
// result is the exact rational value, correctly rounded once.
double adjusted_rand_index(const Partition& p, const Partition& q);

// Mutual information normalized by the arithmetic mean of the entropies,
// natural log. Both partitions a single cluster -> 1.0; exactly one a single
// cluster -> 0.0.
double normalized_mutual_information(const Partition& p, const Partition& q);

double purity(const Partition& p, const Partition& truth);

// Overlap achieved by the optimal alignment of p onto ref, divided by the
// number of jointly labeled objects.
double agreement_after_alignment(const Partition& p, const Partition& ref);

// Closed must-link pairs with differing labels plus cannot-link pairs with
// equal labels; pairs touching a missing label are skipped. The bundle must
// already be validated against data.
long long constraint_violation_count(const Partition& p, const SupervisionBundle& constraints,
                                     const Dataset& data);

MetricReport evaluate(const Partition& p, const Partition& truth);

}  // namespace scev
