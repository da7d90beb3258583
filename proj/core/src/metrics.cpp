#include "scev/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "scev/alignment.hpp"

namespace scev {

namespace {

struct JointCounts {
    std::size_t kp = 0, kq = 0;
    std::vector<long long> cells;  // kp x kq
    std::vector<long long> rows, cols;
    long long n = 0;

    long long cell(std::size_t a, std::size_t b) const { return cells[a * kq + b]; }
};

JointCounts joint_counts(const Partition& p, const Partition& q) {
    if (p.size() != q.size())
        fail(Errc::length_mismatch, "partitions have different lengths");
    JointCounts jc;
    jc.kp = static_cast<std::size_t>(p.k());
    jc.kq = static_cast<std::size_t>(q.k());
    jc.cells.assign(jc.kp * jc.kq, 0);
    jc.rows.assign(jc.kp, 0);
    jc.cols.assign(jc.kq, 0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Label a = p.label(i);
        const Label b = q.label(i);
        if (a == kMissing || b == kMissing) continue;
        ++jc.cells[static_cast<std::size_t>(a) * jc.kq + static_cast<std::size_t>(b)];
        ++jc.rows[static_cast<std::size_t>(a)];
        ++jc.cols[static_cast<std::size_t>(b)];
        ++jc.n;
    }
    if (jc.n < 2)
        fail(Errc::too_few_objects, "fewer than 2 jointly labeled objects");
    return jc;
}

long long comb2(long long x) { return x < 2 ? 0 : x * (x - 1) / 2; }

}  // namespace

double adjusted_rand_index(const Partition& p, const Partition& q) {
    const JointCounts jc = joint_counts(p, q);
    long long index = 0, sum_a = 0, sum_b = 0;
    for (long long c : jc.cells) index += comb2(c);
    for (long long c : jc.rows) sum_a += comb2(c);
    for (long long c : jc.cols) sum_b += comb2(c);
    const long long total = comb2(jc.n);

    // ARI = (index - sum_a*sum_b/total) / ((sum_a+sum_b)/2 - sum_a*sum_b/total),
    // cleared of fractions: one exact integer ratio, one rounding.
    using wide = __int128;
    const wide num = 2 * (wide(index) * total - wide(sum_a) * sum_b);
    const wide den = wide(total) * (sum_a + sum_b) - 2 * wide(sum_a) * sum_b;
    if (den == 0) return 1.0;  // both trivial partitions, necessarily identical
    return static_cast<double>(num) / static_cast<double>(den);
}

double normalized_mutual_information(const Partition& p, const Partition& q) {
    const JointCounts jc = joint_counts(p, q);
    const double n = static_cast<double>(jc.n);

    double hp = 0.0, hq = 0.0;
    for (long long c : jc.rows)
        if (c > 0) hp -= (c / n) * std::log(c / n);
    for (long long c : jc.cols)
        if (c > 0) hq -= (c / n) * std::log(c / n);
    if (hp == 0.0 && hq == 0.0) return 1.0;
    if (hp == 0.0 || hq == 0.0) return 0.0;

    double mi = 0.0;
    for (std::size_t a = 0; a < jc.kp; ++a)
        for (std::size_t b = 0; b < jc.kq; ++b) {
            const long long c = jc.cell(a, b);
            if (c == 0) continue;
            mi += (c / n) * std::log((c * n) / (static_cast<double>(jc.rows[a]) * jc.cols[b]));
        }
    return mi / (0.5 * (hp + hq));
}

double purity(const Partition& p, const Partition& truth) {
    const JointCounts jc = joint_counts(p, truth);
    long long hits = 0;
    for (std::size_t a = 0; a < jc.kp; ++a) {
        long long best = 0;
        for (std::size_t b = 0; b < jc.kq; ++b) best = std::max(best, jc.cell(a, b));
        hits += best;
    }
    return static_cast<double>(hits) / static_cast<double>(jc.n);
}

double agreement_after_alignment(const Partition& p, const Partition& ref) {
    const ContingencyTable t = contingency_table(p, ref);
    if (t.n_effective < 2)
        fail(Errc::too_few_objects, "fewer than 2 jointly labeled objects");
    const AlignmentMap m = optimal_alignment(t);
    return m.score / t.n_effective;
}

long long constraint_violation_count(const Partition& p, const SupervisionBundle& constraints,
                                     const Dataset& data) {
    if (p.size() != data.size())
        fail(Errc::length_mismatch, "partition does not cover the dataset");
    long long violations = 0;
    auto labels_of = [&](const std::pair<std::string, std::string>& pr) {
        return std::make_pair(p.label(data.index_of(pr.first)), p.label(data.index_of(pr.second)));
    };
    for (const auto& pr : constraints.must_link) {
        const auto [a, b] = labels_of(pr);
        if (a == kMissing || b == kMissing) continue;
        if (a != b) ++violations;
    }
    for (const auto& pr : constraints.cannot_link) {
        const auto [a, b] = labels_of(pr);
        if (a == kMissing || b == kMissing) continue;
        if (a == b) ++violations;
    }
    return violations;
}

MetricReport evaluate(const Partition& p, const Partition& truth) {
    MetricReport r;
    r.ari = adjusted_rand_index(p, truth);
    r.nmi = normalized_mutual_information(p, truth);
    r.purity = purity(p, truth);
    r.agreement = agreement_after_alignment(p, truth);
    r.constraint_violations = 0;
    return r;
}

}  // namespace scev
