#include "scev/consensus.hpp"

#include <algorithm>
#include <limits>

#include "scev/alignment.hpp"
#include "scev/rng.hpp"

namespace scev {

const char* tie_policy_name(TiePolicy p) {
    switch (p) {
        case TiePolicy::kUnresolved: return "unresolved";
        case TiePolicy::kReference: return "reference";
        case TiePolicy::kLowest: return "lowest";
    }
    return "unknown";
}

TiePolicy tie_policy_from_name(const std::string& name) {
    if (name == "unresolved") return TiePolicy::kUnresolved;
    if (name == "reference") return TiePolicy::kReference;
    if (name == "lowest") return TiePolicy::kLowest;
    fail(Errc::invalid_argument, "unknown tie policy '" + name + "'");
}

std::size_t select_reference(const Ensemble& e, const ReferencePolicy& policy) {
    if (policy.kind == ReferencePolicy::Kind::kUserIndex) {
        if (policy.index >= e.size())
            fail(Errc::index_out_of_range, "reference index " + std::to_string(policy.index) +
                                               " for m=" + std::to_string(e.size()));
        return policy.index;
    }
    Rng rng(policy.seed);
    return static_cast<std::size_t>(rng.below(e.size()));
}

std::vector<double> combine_weights(const std::vector<PartitionWeights>& weights, bool normalize) {
    std::vector<double> omega;
    omega.reserve(weights.size());
    double sum = 0.0;
    for (const auto& w : weights) {
        if (w.alpha < 0 || w.beta < 0)
            fail(Errc::invalid_argument, "weights must be non-negative");
        omega.push_back(w.alpha * w.beta);
        sum += omega.back();
    }
    if (sum == 0.0)
        fail(Errc::all_zero_weights, "every combined weight is zero");
    if (normalize) {
        const double scale = static_cast<double>(weights.size()) / sum;
        for (double& w : omega) w *= scale;
    }
    return omega;
}

ConsensusResult weighted_vote(const std::vector<Partition>& aligned,
                              const std::vector<double>& omega, TiePolicy tie_policy,
                              const Partition* reference) {
    if (aligned.empty())
        fail(Errc::degenerate_input, "nothing to vote over");
    if (aligned.size() != omega.size())
        fail(Errc::length_mismatch, "one weight per partition required");
    if (tie_policy == TiePolicy::kReference && reference == nullptr)
        fail(Errc::invalid_argument, "reference tie policy needs the reference partition");
    const std::size_t n = aligned.front().size();
    Label space = 0;
    for (const auto& p : aligned) {
        if (p.size() != n)
            fail(Errc::length_mismatch, "aligned partitions must cover the same n objects");
        space = std::max(space, p.k());
    }

    ConsensusResult res;
    res.k = space;
    res.labels.assign(n, kUnresolved);
    res.scores.assign(n, {});
    res.margins.assign(n, 0.0);
    res.tie_flags.assign(n, false);

    std::vector<double> tally(static_cast<std::size_t>(space), 0.0);
    std::vector<Label> touched;
    touched.reserve(aligned.size());

    for (std::size_t i = 0; i < n; ++i) {
        touched.clear();
        for (std::size_t j = 0; j < aligned.size(); ++j) {
            if (omega[j] == 0.0) continue;  // weight zero means the partition is ignored
            const Label l = aligned[j].label(i);
            if (l == kMissing) continue;
            if (tally[static_cast<std::size_t>(l)] == 0.0) touched.push_back(l);
            tally[static_cast<std::size_t>(l)] += omega[j];
        }
        if (touched.empty()) continue;  // everyone abstained: unresolved, empty scores

        std::sort(touched.begin(), touched.end());
        double best = 0.0, second = 0.0;
        for (Label l : touched) {
            const double s = tally[static_cast<std::size_t>(l)];
            if (s > best) {
                second = best;
                best = s;
            } else if (s > second) {
                second = s;
            }
        }
        std::vector<Label> winners;
        for (Label l : touched)
            if (tally[static_cast<std::size_t>(l)] == best) winners.push_back(l);

        res.margins[i] = best - second;
        res.tie_flags[i] = winners.size() > 1;
        if (winners.size() == 1) {
            res.labels[i] = winners.front();
        } else {
            switch (tie_policy) {
                case TiePolicy::kUnresolved:
                    res.labels[i] = kUnresolved;
                    break;
                case TiePolicy::kReference: {
                    const Label ref_label = reference->label(i);
                    const bool among =
                        ref_label != kMissing &&
                        std::find(winners.begin(), winners.end(), ref_label) != winners.end();
                    res.labels[i] = among ? ref_label : winners.front();
                    break;
                }
                case TiePolicy::kLowest:
                    res.labels[i] = winners.front();
                    break;
            }
        }

        auto& row = res.scores[i];
        row.reserve(touched.size());
        for (Label l : touched) {
            row.emplace_back(l, tally[static_cast<std::size_t>(l)]);
            tally[static_cast<std::size_t>(l)] = 0.0;
        }
    }
    return res;
}

RunAudit consensus_run(const Ensemble& e, TiePolicy tie_policy, bool normalize) {
    RunAudit audit;
    audit.base = e.partitions();
    audit.weights = e.weights();
    audit.reference_index = e.reference_index();
    const Partition& ref = e.partition(audit.reference_index);

    try {
        audit.alignments.reserve(e.size());
        audit.aligned.reserve(e.size());
        for (std::size_t j = 0; j < e.size(); ++j) {
            const AlignmentMap m = optimal_alignment(contingency_table(e.partition(j), ref));
            audit.aligned.push_back(apply_alignment(e.partition(j), m));
            audit.alignments.push_back(m);
        }
    } catch (const Error& err) {
        throw Error(err.code(), "align: " + err.detail());
    }

    try {
        audit.omega = combine_weights(e.weights(), normalize);
        audit.result = weighted_vote(audit.aligned, audit.omega, tie_policy,
                                     &audit.aligned[audit.reference_index]);
    } catch (const Error& err) {
        throw Error(err.code(), "vote: " + err.detail());
    }
    return audit;
}

RunAudit scev_run(const Dataset& data, const EnsembleSpec& spec,
                  const SupervisionBundle& supervision, TiePolicy tie_policy, bool normalize) {
    Ensemble e = [&] {
        try {
            return generate_ensemble(data, spec, supervision);
        } catch (const Error& err) {
            throw Error(err.code(), "generate: " + err.detail());
        }
    }();
    return consensus_run(e, tie_policy, normalize);
}

}  // namespace scev
