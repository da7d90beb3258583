#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "scev/metrics.hpp"
#include "scev/rng.hpp"

using namespace scev;

namespace {

// Independent ARI oracle: enumerate object pairs, count the four agreement
// classes, combine exactly in integers and divide once.
double ari_pair_oracle(const Partition& p, const Partition& q) {
    long long both = 0, p_only = 0, q_only = 0, neither = 0;
    const std::size_t n = p.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (p.label(i) == kMissing || p.label(j) == kMissing) continue;
            if (q.label(i) == kMissing || q.label(j) == kMissing) continue;
            const bool in_p = p.label(i) == p.label(j);
            const bool in_q = q.label(i) == q.label(j);
            if (in_p && in_q)
                ++both;
            else if (in_p)
                ++p_only;
            else if (in_q)
                ++q_only;
            else
                ++neither;
        }
    const long long num = 2 * (both * neither - p_only * q_only);
    const long long den =
        (both + p_only) * (p_only + neither) + (both + q_only) * (q_only + neither);
    if (den == 0) return 1.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

Partition random_partition(Rng& rng, std::size_t n, Label k, double missing_prob = 0.0) {
    std::vector<Label> labels(n);
    labels[0] = 0;
    for (std::size_t i = 1; i < n; ++i)
        labels[i] = rng.uniform01() < missing_prob
                        ? kMissing
                        : static_cast<Label>(rng.below(static_cast<std::uint64_t>(k)));
    return Partition(std::move(labels), k);
}

Partition permute_labels(Rng& rng, const Partition& p) {
    std::vector<Label> perm(static_cast<std::size_t>(p.k()));
    for (Label l = 0; l < p.k(); ++l) perm[static_cast<std::size_t>(l)] = l;
    for (std::size_t i = perm.size(); i > 1; --i) std::swap(perm[i - 1], perm[rng.below(i)]);
    std::vector<Label> labels(p.size(), kMissing);
    for (std::size_t i = 0; i < p.size(); ++i)
        if (p.label(i) != kMissing) labels[i] = perm[static_cast<std::size_t>(p.label(i))];
    return Partition(std::move(labels), p.k());
}

Dataset indexed_dataset(std::size_t n) {
    std::vector<double> features(n);
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) {
        features[i] = static_cast<double>(i);
        ids.push_back("o" + std::to_string(i));
    }
    return Dataset(std::move(features), n, 1, std::move(ids));
}

}  // namespace

TEST_CASE("ari basics") {
    const Partition p({0, 0, 1, 1, 2}, 3);
    CHECK(adjusted_rand_index(p, p) == 1.0);

    // Label-permutation invariance.
    CHECK(adjusted_rand_index(Partition({0, 0, 1, 1}, 2), Partition({1, 1, 0, 0}, 2)) == 1.0);

    // Crossed pair; frozen from the pair-enumeration oracle.
    const Partition a({0, 0, 1, 1}, 2);
    const Partition b({0, 1, 0, 1}, 2);
    const double oracle = ari_pair_oracle(a, b);
    CHECK(oracle == -0.5);
    CHECK(adjusted_rand_index(a, b) == oracle);

    CHECK_THROWS_AS(
        adjusted_rand_index(Partition({0, kMissing}, 1), Partition({kMissing, 0}, 1)), Error);
}

TEST_CASE("ari equals the pair oracle on random partitions") {
    Rng rng(555);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 2 + rng.below(40);
        const Partition p = random_partition(rng, n, static_cast<Label>(1 + rng.below(5)), 0.1);
        Partition q = random_partition(rng, n, static_cast<Label>(1 + rng.below(5)), 0.1);
        long long joint = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (p.label(i) != kMissing && q.label(i) != kMissing) ++joint;
        if (joint < 2) continue;
        CHECK(adjusted_rand_index(p, q) == ari_pair_oracle(p, q));
    }
}

TEST_CASE("nmi basics") {
    const Partition p({0, 0, 1, 1}, 2);
    CHECK(normalized_mutual_information(p, p) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(normalized_mutual_information(p, Partition({1, 1, 0, 0}, 2)) ==
          doctest::Approx(1.0).epsilon(1e-12));

    // Constructed independence: joint counts equal the product of marginals.
    const Partition blocks({0, 0, 0, 1, 1, 1}, 2);
    const Partition stripes({0, 1, 2, 0, 1, 2}, 3);
    CHECK(std::abs(normalized_mutual_information(blocks, stripes)) <= 1e-12);

    // Degenerate conventions.
    const Partition single({0, 0, 0}, 1);
    CHECK(normalized_mutual_information(single, single) == 1.0);
    CHECK(normalized_mutual_information(single, Partition({0, 1, 2}, 3)) == 0.0);
}

TEST_CASE("purity basics") {
    const Partition truth({0, 1, 1}, 2);
    CHECK(purity(truth, truth) == 1.0);
    CHECK(purity(Partition({0, 0, 0, 0}, 1), Partition({0, 0, 1, 1}, 2)) == 0.5);
    CHECK(purity(Partition({0, 0, 1}, 2), truth) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("purity never decreases when a cluster is split") {
    Rng rng(808);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = 4 + rng.below(30);
        const Partition p = random_partition(rng, n, static_cast<Label>(1 + rng.below(4)));
        const Partition truth = random_partition(rng, n, static_cast<Label>(1 + rng.below(4)));

        // Split a random cluster: some of its members get a fresh label.
        const Label victim = static_cast<Label>(rng.below(static_cast<std::uint64_t>(p.k())));
        std::vector<Label> split = p.labels();
        for (std::size_t i = 0; i < n; ++i)
            if (split[i] == victim && rng.uniform01() < 0.5) split[i] = p.k();
        const Partition refined(std::move(split), p.k() + 1);

        CHECK(purity(refined, truth) >= purity(p, truth));
    }
}

TEST_CASE("agreement after alignment") {
    const Partition p({0, 0, 1, 1}, 2);
    CHECK(agreement_after_alignment(p, Partition({1, 1, 0, 0}, 2)) == 1.0);
    CHECK(agreement_after_alignment(Partition({0, 1, 0, 1}, 2), p) == 0.5);
}

TEST_CASE("constraint violation counting") {
    const Dataset d = indexed_dataset(4);
    SupervisionBundle empty;
    const Partition p({0, 1, 1, kMissing}, 2);
    CHECK(constraint_violation_count(p, empty, d) == 0);

    SupervisionBundle ml;
    ml.must_link.insert(SupervisionBundle::ordered("o0", "o1"));
    CHECK(constraint_violation_count(p, ml, d) == 1);

    SupervisionBundle cl;
    cl.cannot_link.insert(SupervisionBundle::ordered("o1", "o2"));
    CHECK(constraint_violation_count(p, cl, d) == 1);

    // Pairs touching a missing label are skipped.
    SupervisionBundle missing;
    missing.must_link.insert(SupervisionBundle::ordered("o0", "o3"));
    missing.cannot_link.insert(SupervisionBundle::ordered("o2", "o3"));
    CHECK(constraint_violation_count(p, missing, d) == 0);
}

TEST_CASE("metrics are invariant under label permutation") {
    Rng rng(616);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 3 + rng.below(30);
        const Partition p = random_partition(rng, n, static_cast<Label>(2 + rng.below(4)), 0.1);
        const Partition q = random_partition(rng, n, static_cast<Label>(2 + rng.below(4)), 0.1);
        long long joint = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (p.label(i) != kMissing && q.label(i) != kMissing) ++joint;
        if (joint < 2) continue;

        const Partition pp = permute_labels(rng, p);
        const Partition qq = permute_labels(rng, q);

        CHECK(adjusted_rand_index(pp, qq) == adjusted_rand_index(p, q));
        CHECK(adjusted_rand_index(p, q) == adjusted_rand_index(q, p));
        CHECK(std::abs(normalized_mutual_information(pp, qq) -
                       normalized_mutual_information(p, q)) <= 1e-12);
        CHECK(std::abs(normalized_mutual_information(p, q) -
                       normalized_mutual_information(q, p)) <= 1e-12);
        CHECK(purity(pp, qq) == purity(p, q));
        CHECK(agreement_after_alignment(pp, qq) == agreement_after_alignment(p, q));
    }
}

TEST_CASE("evaluate stays within ranges") {
    Rng rng(717);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 4 + rng.below(30);
        const Partition p = random_partition(rng, n, static_cast<Label>(1 + rng.below(5)));
        const Partition q = random_partition(rng, n, static_cast<Label>(1 + rng.below(5)));
        const MetricReport r = evaluate(p, q);
        CHECK(r.ari >= -1.0);
        CHECK(r.ari <= 1.0);
        CHECK(r.nmi >= 0.0);
        CHECK(r.nmi <= 1.0 + 1e-12);
        CHECK(r.purity >= 0.0);
        CHECK(r.purity <= 1.0);
        CHECK(r.agreement >= 0.0);
        CHECK(r.agreement <= 1.0);
        CHECK(r.constraint_violations == 0);
    }
}
