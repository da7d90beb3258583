#include "scev/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace scev {

const char* errc_name(Errc code) {
    switch (code) {
        case Errc::conflicting_constraints: return "ConflictingConstraints";
        case Errc::unknown_object: return "UnknownObject";
        case Errc::degenerate_input: return "DegenerateInput";
        case Errc::missing_seed_class: return "MissingSeedClass";
        case Errc::invalid_seed_class: return "InvalidSeedClass";
        case Errc::infeasible_assignment: return "InfeasibleAssignment";
        case Errc::zero_vector: return "ZeroVector";
        case Errc::length_mismatch: return "LengthMismatch";
        case Errc::too_large: return "TooLarge";
        case Errc::unmapped_label: return "UnmappedLabel";
        case Errc::index_out_of_range: return "IndexOutOfRange";
        case Errc::all_zero_weights: return "AllZeroWeights";
        case Errc::too_few_objects: return "TooFewObjects";
        case Errc::parse_error: return "ParseError";
        case Errc::non_numeric_feature: return "NonNumericFeature";
        case Errc::duplicate_id: return "DuplicateId";
        case Errc::ragged_rows: return "RaggedRows";
        case Errc::empty_column: return "EmptyColumn";
        case Errc::invalid_argument: return "InvalidArgument";
    }
    return "Error";
}

Dataset::Dataset(std::vector<double> features, std::size_t n, std::size_t d,
                 std::vector<std::string> object_ids, std::vector<std::string> feature_names)
    : features_(std::move(features)),
      n_(n),
      d_(d),
      object_ids_(std::move(object_ids)),
      feature_names_(std::move(feature_names)) {
    if (n_ < 1 || d_ < 1)
        fail(Errc::degenerate_input, "dataset needs n >= 1 and d >= 1");
    if (features_.size() != n_ * d_)
        fail(Errc::length_mismatch, "feature buffer does not match n*d");
    if (object_ids_.size() != n_)
        fail(Errc::length_mismatch, "object id count does not match n");
    if (!feature_names_.empty() && feature_names_.size() != d_)
        fail(Errc::length_mismatch, "feature name count does not match d");
    for (double v : features_)
        if (!std::isfinite(v))
            fail(Errc::non_numeric_feature, "dataset contains a non-finite value");
    index_.reserve(n_);
    for (std::size_t i = 0; i < n_; ++i) {
        if (!index_.emplace(object_ids_[i], i).second)
            fail(Errc::duplicate_id, "duplicate object id '" + object_ids_[i] + "'");
    }
}

std::size_t Dataset::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end())
        fail(Errc::unknown_object, "object id '" + id + "' not in dataset");
    return it->second;
}

Partition::Partition(std::vector<Label> labels, Label k, Provenance provenance)
    : labels_(std::move(labels)), k_(k), provenance_(std::move(provenance)) {
    if (k_ < 1)
        fail(Errc::degenerate_input, "partition needs k >= 1");
    bool any = false;
    for (Label l : labels_) {
        if (l == kMissing) continue;
        if (l < 0 || l >= k_)
            fail(Errc::index_out_of_range,
                 "label " + std::to_string(l) + " outside [0, " + std::to_string(k_) + ")");
        any = true;
    }
    if (!any)
        fail(Errc::degenerate_input, "partition has no non-missing label");
}

Ensemble::Ensemble(std::vector<Partition> partitions, std::vector<PartitionWeights> weights,
                   std::size_t reference_index)
    : partitions_(std::move(partitions)),
      weights_(std::move(weights)),
      reference_index_(reference_index) {
    if (partitions_.empty())
        fail(Errc::degenerate_input, "ensemble needs at least one partition");
    if (weights_.size() != partitions_.size())
        fail(Errc::length_mismatch, "one weight pair per partition required");
    const std::size_t n = partitions_.front().size();
    for (const auto& p : partitions_)
        if (p.size() != n)
            fail(Errc::length_mismatch, "all partitions must cover the same n objects");
    if (reference_index_ >= partitions_.size())
        fail(Errc::index_out_of_range,
             "reference index " + std::to_string(reference_index_) + " for m=" +
                 std::to_string(partitions_.size()));
    for (const auto& w : weights_)
        if (w.alpha < 0 || w.beta < 0)
            fail(Errc::invalid_argument, "weights must be non-negative");
}

namespace {

// Plain union-find, path halving.
struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace

std::vector<std::vector<std::size_t>> must_link_closure(
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs, std::size_t n) {
    DisjointSets sets(n);
    for (const auto& [a, b] : pairs) {
        if (a >= n || b >= n)
            fail(Errc::index_out_of_range, "constraint pair member outside [0, n)");
        sets.unite(a, b);
    }
    std::vector<std::vector<std::size_t>> by_root(n);
    for (std::size_t i = 0; i < n; ++i) by_root[sets.find(i)].push_back(i);
    std::vector<std::vector<std::size_t>> groups;
    for (auto& g : by_root)
        if (!g.empty()) groups.push_back(std::move(g));
    std::sort(groups.begin(), groups.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return groups;
}

SupervisionBundle validate_supervision(const SupervisionBundle& bundle, const Dataset& data) {
    for (const auto& [id, cls] : bundle.seeds) {
        data.index_of(id);
        if (cls < 0)
            fail(Errc::invalid_seed_class, "seed class for '" + id + "' is negative");
    }
    std::vector<std::pair<std::size_t, std::size_t>> ml;
    ml.reserve(bundle.must_link.size());
    for (const auto& [a, b] : bundle.must_link)
        ml.emplace_back(data.index_of(a), data.index_of(b));
    for (const auto& [a, b] : bundle.cannot_link) {
        data.index_of(a);
        data.index_of(b);
    }

    const auto groups = must_link_closure(ml, data.size());
    std::vector<std::size_t> group_of(data.size());
    for (std::size_t g = 0; g < groups.size(); ++g)
        for (std::size_t i : groups[g]) group_of[i] = g;

    for (const auto& [a, b] : bundle.cannot_link) {
        if (a == b)
            fail(Errc::conflicting_constraints, "cannot-link pair on a single object '" + a + "'");
        if (group_of[data.index_of(a)] == group_of[data.index_of(b)])
            fail(Errc::conflicting_constraints,
                 "objects '" + a + "' and '" + b + "' are must-linked but also cannot-linked");
    }

    SupervisionBundle closed = bundle;
    closed.must_link.clear();
    const auto& ids = data.object_ids();
    for (const auto& group : groups) {
        for (std::size_t i = 0; i < group.size(); ++i)
            for (std::size_t j = i + 1; j < group.size(); ++j)
                closed.must_link.insert(SupervisionBundle::ordered(ids[group[i]], ids[group[j]]));
    }
    return closed;
}

Partition canonicalize(const Partition& p) {
    std::vector<Label> remap(static_cast<std::size_t>(p.k()), kMissing);
    std::vector<Label> out(p.size(), kMissing);
    Label next = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Label l = p.label(i);
        if (l == kMissing) continue;
        if (remap[static_cast<std::size_t>(l)] == kMissing) remap[static_cast<std::size_t>(l)] = next++;
        out[i] = remap[static_cast<std::size_t>(l)];
    }
    return Partition(std::move(out), next, p.provenance());
}

}  // namespace scev
