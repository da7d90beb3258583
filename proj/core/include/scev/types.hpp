#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "scev/errors.hpp"

namespace scev {

using Label = std::int32_t;

// Sentinel for an unknown assignment ("?" in partition files). Never a label value.
inline constexpr Label kMissing = -1;
// Same sentinel, named for consensus output (ties left open / total abstention).
inline constexpr Label kUnresolved = -1;

struct Provenance {
    std::string algorithm;
    std::uint32_t run = 0;
    std::uint64_t seed = 0;
};

// Immutable n x d feature matrix with stable object identifiers.
class Dataset {
public:
    Dataset(std::vector<double> features, std::size_t n, std::size_t d,
            std::vector<std::string> object_ids,
            std::vector<std::string> feature_names = {});

    std::size_t size() const { return n_; }
    std::size_t dim() const { return d_; }

    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * d_, d_};
    }
    double at(std::size_t i, std::size_t j) const { return features_[i * d_ + j]; }

    const std::vector<std::string>& object_ids() const { return object_ids_; }
    const std::vector<std::string>& feature_names() const { return feature_names_; }

    // Index of an object id, or throws unknown_object.
    std::size_t index_of(const std::string& id) const;
    bool has_id(const std::string& id) const { return index_.count(id) != 0; }

private:
    std::vector<double> features_;
    std::size_t n_ = 0;
    std::size_t d_ = 0;
    std::vector<std::string> object_ids_;
    std::vector<std::string> feature_names_;
    std::unordered_map<std::string, std::size_t> index_;
};

// A hard labeling of n objects over {0..k-1} plus kMissing, with provenance.
class Partition {
public:
    Partition(std::vector<Label> labels, Label k, Provenance provenance = {});

    std::size_t size() const { return labels_.size(); }
    Label k() const { return k_; }
    Label label(std::size_t i) const { return labels_[i]; }
    const std::vector<Label>& labels() const { return labels_; }
    const Provenance& provenance() const { return provenance_; }

    bool same_labels(const Partition& other) const {
        return k_ == other.k_ && labels_ == other.labels_;
    }

private:
    std::vector<Label> labels_;
    Label k_ = 0;
    Provenance provenance_;
};

// Seeds plus pairwise constraints, keyed by object id.
struct SupervisionBundle {
    std::map<std::string, Label> seeds;
    std::set<std::pair<std::string, std::string>> must_link;
    std::set<std::pair<std::string, std::string>> cannot_link;

    static std::pair<std::string, std::string> ordered(std::string a, std::string b) {
        return a <= b ? std::make_pair(std::move(a), std::move(b))
                      : std::make_pair(std::move(b), std::move(a));
    }

    bool empty() const { return seeds.empty() && must_link.empty() && cannot_link.empty(); }
};

struct PartitionWeights {
    double alpha = 1.0;  // trust in the generating algorithm for this data
    double beta = 1.0;   // supervisor feedback on the produced partition
};

// Ordered base partitions over the same objects, each with its weights,
// plus the index of the partition everything is aligned against.
class Ensemble {
public:
    Ensemble(std::vector<Partition> partitions, std::vector<PartitionWeights> weights,
             std::size_t reference_index);

    std::size_t size() const { return partitions_.size(); }
    std::size_t objects() const { return partitions_.front().size(); }
    const std::vector<Partition>& partitions() const { return partitions_; }
    const Partition& partition(std::size_t j) const { return partitions_[j]; }
    const std::vector<PartitionWeights>& weights() const { return weights_; }
    std::size_t reference_index() const { return reference_index_; }

private:
    std::vector<Partition> partitions_;
    std::vector<PartitionWeights> weights_;
    std::size_t reference_index_ = 0;
};

// Injective relabeling of one partition's label space into the reference's,
// possibly extended by fresh labels for unmatched source clusters.
struct AlignmentMap {
    std::vector<Label> mapping;  // source label -> target label
    double score = 0.0;          // overlap achieved by the mapping
    Label k_aligned = 0;         // size of the target space incl. fresh labels
};

struct ConsensusResult {
    std::vector<Label> labels;  // kUnresolved where no single winner exists
    // Per object: (label, total weight received), sorted by label. Only labels
    // that received positive weight appear.
    std::vector<std::vector<std::pair<Label, double>>> scores;
    std::vector<double> margins;  // best minus second-best score
    std::vector<bool> tie_flags;  // true iff two labels attain the maximum
    Label k = 0;
};

}  // namespace scev
