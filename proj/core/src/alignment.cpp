#include "scev/alignment.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace scev {

ContingencyTable contingency_table(const Partition& p, const Partition& ref) {
    if (p.size() != ref.size())
        fail(Errc::length_mismatch, "partitions have lengths " + std::to_string(p.size()) +
                                        " and " + std::to_string(ref.size()));
    ContingencyTable t;
    t.k_src = static_cast<std::size_t>(p.k());
    t.k_tgt = static_cast<std::size_t>(ref.k());
    t.counts.assign(t.k_src * t.k_tgt, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Label a = p.label(i);
        const Label b = ref.label(i);
        if (a == kMissing || b == kMissing) continue;
        t.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) += 1.0;
        t.n_effective += 1.0;
    }
    return t;
}

namespace {

// Square min-cost assignment, O(K^3) shortest augmenting paths with
// potentials. Returns row->col matching plus dual potentials u, v satisfying
// u[i] + v[j] <= cost(i,j) with equality on edges of any optimal matching.
struct AssignmentResult {
    std::vector<int> row_to_col;
    std::vector<double> u, v;  // 1-indexed, size K+1
    double total = 0.0;
};

class PaddedCosts {
public:
    explicit PaddedCosts(const ContingencyTable& t) : t_(t) {}

    // Negated overlap; padding cells cost 0.
    double operator()(std::size_t row, std::size_t col) const {
        if (row >= t_.k_src || col >= t_.k_tgt) return 0.0;
        return -t_.at(row, col);
    }

private:
    const ContingencyTable& t_;
};

// Solve with some rows/cols pinned out (already fixed by the refinement).
// active_* lists map the reduced problem back to padded indices.
AssignmentResult solve_assignment(const PaddedCosts& cost, const std::vector<int>& active_rows,
                                  const std::vector<int>& active_cols) {
    const int n = static_cast<int>(active_rows.size());
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> match(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        match[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = match[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur =
                    cost(active_rows[i0 - 1], active_cols[j - 1]) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const int j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0);
    }
    AssignmentResult res;
    res.row_to_col.assign(n, -1);
    for (int j = 1; j <= n; ++j)
        if (match[j]) res.row_to_col[match[j] - 1] = j - 1;
    for (int i = 0; i < n; ++i)
        res.total += cost(active_rows[i], active_cols[res.row_to_col[i]]);
    res.u = std::move(u);
    res.v = std::move(v);
    return res;
}

double overlap_eps(const ContingencyTable& t) {
    double mx = 0.0;
    for (double c : t.counts) mx = std::max(mx, std::abs(c));
    return 1e-9 * (1.0 + mx) * static_cast<double>(std::max<std::size_t>(t.k_src, 1));
}

// Final mapping from a padded row->col matching: real columns kept, padding
// columns become fresh labels k_tgt, k_tgt+1, ... in ascending source order.
AlignmentMap finish_mapping(const ContingencyTable& t, const std::vector<int>& row_to_col) {
    AlignmentMap m;
    m.mapping.assign(t.k_src, 0);
    Label fresh = static_cast<Label>(t.k_tgt);
    for (std::size_t a = 0; a < t.k_src; ++a) {
        const int c = row_to_col[a];
        if (c >= 0 && static_cast<std::size_t>(c) < t.k_tgt) {
            m.mapping[a] = static_cast<Label>(c);
            m.score += t.at(a, static_cast<std::size_t>(c));
        } else {
            m.mapping[a] = fresh++;
        }
    }
    m.k_aligned = std::max<Label>(static_cast<Label>(t.k_tgt), fresh);
    return m;
}

}  // namespace

AlignmentMap optimal_alignment(const ContingencyTable& t) {
    if (t.k_src == 0 || t.k_tgt == 0)
        fail(Errc::degenerate_input, "contingency table has an empty label space");
    const std::size_t K = std::max(t.k_src, t.k_tgt);
    const PaddedCosts cost(t);
    const double eps = overlap_eps(t);

    std::vector<int> all_rows(K), all_cols(K);
    std::iota(all_rows.begin(), all_rows.end(), 0);
    std::iota(all_cols.begin(), all_cols.end(), 0);
    const AssignmentResult base = solve_assignment(cost, all_rows, all_cols);

    // Tight edges under the optimal duals. A perfect matching made of tight
    // edges attains the dual objective, so the optimal matchings are exactly
    // the all-tight perfect matchings (complementary slackness both ways).
    std::vector<char> tight(K * K, 0);
    for (std::size_t i = 0; i < K; ++i)
        for (std::size_t j = 0; j < K; ++j) {
            const double reduced = cost(i, j) - base.u[i + 1] - base.v[j + 1];
            tight[i * K + j] = std::abs(reduced) <= eps ? 1 : 0;
        }

    // Witness: an all-tight perfect matching kept consistent with every pair
    // fixed so far, both directions.
    std::vector<int> match_col(K), match_row(K);
    for (std::size_t i = 0; i < K; ++i) {
        match_col[i] = base.row_to_col[i];
        match_row[static_cast<std::size_t>(base.row_to_col[i])] = static_cast<int>(i);
    }
    std::vector<char> fixed_col(K, 0);

    // Can the witness be rearranged over tight edges so that row a takes
    // column c? Displaces the current owner of c, who must re-match; only
    // a's old column is free, so one augmenting-path search decides it.
    auto try_force = [&](std::size_t a, std::size_t c) -> bool {
        const int freed = match_col[a];
        const int displaced = match_row[c];
        match_col[a] = static_cast<int>(c);
        match_row[c] = static_cast<int>(a);
        match_col[displaced] = -1;
        match_row[static_cast<std::size_t>(freed)] = -1;

        std::vector<char> visited(K, 0);
        auto dfs = [&](auto&& self, int row) -> bool {
            for (std::size_t col = 0; col < K; ++col) {
                if (visited[col] || fixed_col[col] || col == c) continue;
                if (!tight[static_cast<std::size_t>(row) * K + col]) continue;
                visited[col] = 1;
                if (match_row[col] == -1 || self(self, match_row[col])) {
                    match_row[col] = row;
                    match_col[row] = static_cast<int>(col);
                    return true;
                }
            }
            return false;
        };
        if (dfs(dfs, displaced)) return true;

        match_col[displaced] = static_cast<int>(c);
        match_row[c] = displaced;
        match_col[a] = freed;
        match_row[static_cast<std::size_t>(freed)] = static_cast<int>(a);
        return false;
    };

    for (std::size_t a = 0; a < t.k_src; ++a) {
        // Candidate columns below the witness choice, in final-value order:
        // real columns ascending; padding columns all compare equal, so a
        // padded witness only competes against real columns.
        const std::size_t limit =
            static_cast<std::size_t>(match_col[a]) < t.k_tgt
                ? static_cast<std::size_t>(match_col[a])
                : t.k_tgt;
        for (std::size_t c = 0; c < limit; ++c) {
            if (fixed_col[c] || !tight[a * K + c]) continue;
            if (try_force(a, c)) break;
        }
        fixed_col[static_cast<std::size_t>(match_col[a])] = 1;
    }

    std::vector<int> final_cols(match_col.begin(), match_col.end());
    AlignmentMap out = finish_mapping(t, final_cols);
    return out;
}

AlignmentMap brute_force_alignment(const ContingencyTable& t) {
    if (t.k_src == 0 || t.k_tgt == 0)
        fail(Errc::degenerate_input, "contingency table has an empty label space");
    if (std::max(t.k_src, t.k_tgt) > 8)
        fail(Errc::too_large, "exhaustive alignment bound is k <= 8");

    const std::size_t dummy_capacity = t.k_src > t.k_tgt ? t.k_src - t.k_tgt : 0;

    std::vector<int> current(t.k_src, -1);  // -1 encodes "padding" during search
    std::vector<char> used(t.k_tgt, 0);
    std::vector<int> best;
    double best_score = -1.0;

    // DFS over columns in final-value order; the first maximizer found is the
    // lexicographically smallest one, so only strictly better scores replace.
    auto rec = [&](auto&& self, std::size_t a, std::size_t dummies, double score) -> void {
        if (a == t.k_src) {
            if (score > best_score) {
                best_score = score;
                best = current;
            }
            return;
        }
        for (std::size_t c = 0; c < t.k_tgt; ++c) {
            if (used[c]) continue;
            used[c] = 1;
            current[a] = static_cast<int>(c);
            self(self, a + 1, dummies, score + t.at(a, c));
            used[c] = 0;
        }
        if (dummies < dummy_capacity) {
            current[a] = -1;
            self(self, a + 1, dummies + 1, score);
        }
    };
    rec(rec, 0, 0, 0.0);

    AlignmentMap m;
    m.mapping.assign(t.k_src, 0);
    Label fresh = static_cast<Label>(t.k_tgt);
    for (std::size_t a = 0; a < t.k_src; ++a) {
        if (best[a] >= 0) {
            m.mapping[a] = static_cast<Label>(best[a]);
            m.score += t.at(a, static_cast<std::size_t>(best[a]));
        } else {
            m.mapping[a] = fresh++;
        }
    }
    m.k_aligned = std::max<Label>(static_cast<Label>(t.k_tgt), fresh);
    return m;
}

Partition apply_alignment(const Partition& p, const AlignmentMap& m) {
    std::vector<Label> out(p.size(), kMissing);
    for (std::size_t i = 0; i < p.size(); ++i) {
        const Label l = p.label(i);
        if (l == kMissing) continue;
        if (static_cast<std::size_t>(l) >= m.mapping.size())
            fail(Errc::unmapped_label, "label " + std::to_string(l) + " has no mapping entry");
        out[i] = m.mapping[static_cast<std::size_t>(l)];
    }
    return Partition(std::move(out), m.k_aligned, p.provenance());
}

}  // namespace scev
