#pragma once

#include <string>
#include <vector>

#include "scev/clusterers.hpp"
#include "scev/types.hpp"

namespace scev {

enum class TiePolicy {
    kUnresolved,  // emit the tie marker
    kReference,   // take the reference's label when it is among the tied
    kLowest,      // smallest tied label
};

const char* tie_policy_name(TiePolicy p);
TiePolicy tie_policy_from_name(const std::string& name);

std::size_t select_reference(const Ensemble& e, const ReferencePolicy& policy);

// omega_j = alpha_j * beta_j; with normalize the vector is rescaled so it
// sums to m. All-zero products raise AllZeroWeights.
std::vector<double> combine_weights(const std::vector<PartitionWeights>& weights, bool normalize);

// Weighted majority vote over partitions already mapped into a common label
// space. Missing labels abstain, as do partitions with omega_j = 0. Objects
// where everyone abstains come back kUnresolved with an empty score map.
// reference may be null unless the policy is kReference.
ConsensusResult weighted_vote(const std::vector<Partition>& aligned,
                              const std::vector<double>& omega, TiePolicy tie_policy,
                              const Partition* reference = nullptr);

// Everything scev_run records on the way to the consensus.
struct RunAudit {
    std::vector<Partition> base;      // canonicalized base partitions
    std::vector<PartitionWeights> weights;
    std::size_t reference_index = 0;
    std::vector<AlignmentMap> alignments;  // one per partition, vs the reference
    std::vector<Partition> aligned;
    std::vector<double> omega;
    ConsensusResult result;
};

// Alignment + voting for an existing ensemble (the consensus stage alone).
RunAudit consensus_run(const Ensemble& e, TiePolicy tie_policy, bool normalize);

// Full pipeline: generate_ensemble, reference selection, per-partition
// alignment, weight combination, weighted vote. Errors carry stage tags.
RunAudit scev_run(const Dataset& data, const EnsembleSpec& spec,
                  const SupervisionBundle& supervision, TiePolicy tie_policy, bool normalize);

}  // namespace scev
