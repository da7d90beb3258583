#include "scev/clusterers.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <numeric>

#include "scev/core.hpp"
#include "scev/rng.hpp"

namespace scev {

const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::kKMeans: return "kmeans";
        case Algorithm::kSeeded: return "seeded";
        case Algorithm::kConstrained: return "constrained";
        case Algorithm::kCop: return "cop";
        case Algorithm::kSpherical: return "spherical";
    }
    return "unknown";
}

Algorithm algorithm_from_name(const std::string& name) {
    if (name == "kmeans") return Algorithm::kKMeans;
    if (name == "seeded") return Algorithm::kSeeded;
    if (name == "constrained") return Algorithm::kConstrained;
    if (name == "cop") return Algorithm::kCop;
    if (name == "spherical") return Algorithm::kSpherical;
    fail(Errc::invalid_argument, "unknown algorithm '" + name + "'");
}

namespace {

void check_config(const ClustererConfig& cfg, std::size_t n) {
    if (cfg.k < 1) fail(Errc::degenerate_input, "k must be >= 1");
    if (static_cast<std::size_t>(cfg.k) > n)
        fail(Errc::degenerate_input,
             "k=" + std::to_string(cfg.k) + " exceeds n=" + std::to_string(n));
    if (cfg.max_iters < 1) fail(Errc::invalid_argument, "max_iters must be positive");
    if (cfg.tol < 0) fail(Errc::invalid_argument, "tol must be non-negative");
}

double sqdist(std::span<const double> x, const double* c) {
    double s = 0.0;
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double diff = x[j] - c[j];
        s += diff * diff;
    }
    return s;
}

// k distinct rows chosen uniformly without replacement.
std::vector<double> sample_centroids(const Dataset& data, Label k, Rng& rng) {
    const std::size_t n = data.size(), d = data.dim();
    std::vector<std::size_t> pool(n);
    std::iota(pool.begin(), pool.end(), std::size_t{0});
    std::vector<double> centroids(static_cast<std::size_t>(k) * d);
    for (Label c = 0; c < k; ++c) {
        const std::size_t pick = static_cast<std::size_t>(c) +
                                 rng.below(n - static_cast<std::size_t>(c));
        std::swap(pool[static_cast<std::size_t>(c)], pool[pick]);
        const auto row = data.row(pool[static_cast<std::size_t>(c)]);
        std::copy(row.begin(), row.end(), centroids.begin() + static_cast<std::size_t>(c) * d);
    }
    return centroids;
}

// Resolved seed classes per object index; kMissing where unseeded. Verifies
// that every class 0..k-1 has at least one seed.
std::vector<Label> resolve_seeds(const Dataset& data, const std::map<std::string, Label>& seeds,
                                 Label k) {
    std::vector<Label> class_of(data.size(), kMissing);
    std::vector<char> covered(static_cast<std::size_t>(k), 0);
    for (const auto& [id, cls] : seeds) {
        if (cls < 0 || cls >= k)
            fail(Errc::invalid_seed_class,
                 "seed class " + std::to_string(cls) + " for '" + id + "' outside [0, " +
                     std::to_string(k) + ")");
        class_of[data.index_of(id)] = cls;
        covered[static_cast<std::size_t>(cls)] = 1;
    }
    for (Label c = 0; c < k; ++c)
        if (!covered[static_cast<std::size_t>(c)])
            fail(Errc::missing_seed_class, "class " + std::to_string(c) + " has no seed");
    return class_of;
}

std::vector<double> seed_mean_centroids(const Dataset& data, const std::vector<Label>& class_of,
                                        Label k) {
    const std::size_t d = data.dim();
    std::vector<double> centroids(static_cast<std::size_t>(k) * d, 0.0);
    std::vector<std::size_t> counts(static_cast<std::size_t>(k), 0);
    for (std::size_t i = 0; i < data.size(); ++i) {
        const Label c = class_of[i];
        if (c == kMissing) continue;
        const auto row = data.row(i);
        for (std::size_t j = 0; j < d; ++j)
            centroids[static_cast<std::size_t>(c) * d + j] += row[j];
        ++counts[static_cast<std::size_t>(c)];
    }
    for (Label c = 0; c < k; ++c)
        for (std::size_t j = 0; j < d; ++j)
            centroids[static_cast<std::size_t>(c) * d + j] /=
                static_cast<double>(counts[static_cast<std::size_t>(c)]);
    return centroids;
}

// Compact labels after drops: alive clusters keep their relative order.
Partition finalize_labels(std::vector<Label> assign, const std::vector<char>& alive,
                          Provenance prov) {
    std::vector<Label> remap(alive.size(), kMissing);
    Label next = 0;
    for (std::size_t c = 0; c < alive.size(); ++c)
        if (alive[c]) remap[c] = next++;
    for (Label& l : assign) l = remap[static_cast<std::size_t>(l)];
    return Partition(std::move(assign), next, std::move(prov));
}

#ifndef NDEBUG
double wcss(const Dataset& data, const std::vector<Label>& assign,
            const std::vector<double>& centroids) {
    double s = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i)
        s += sqdist(data.row(i), centroids.data() + static_cast<std::size_t>(assign[i]) * data.dim());
    return s;
}
#endif

// Shared Lloyd loop. pinned[i] != kMissing forces that assignment every pass.
Partition euclidean_lloyd(const Dataset& data, const ClustererConfig& cfg,
                          std::vector<double> centroids, const std::vector<Label>& pinned,
                          Provenance prov) {
    const std::size_t n = data.size(), d = data.dim();
    const std::size_t k = static_cast<std::size_t>(cfg.k);
    std::vector<char> alive(k, 1);
    std::vector<Label> assign(n, 0);
    std::vector<std::size_t> counts(k, 0);

#ifndef NDEBUG
    double prev_obj = std::numeric_limits<double>::infinity();
#endif

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            if (!pinned.empty() && pinned[i] != kMissing) {
                assign[i] = pinned[i];
                continue;
            }
            double best = std::numeric_limits<double>::infinity();
            Label best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                if (!alive[c]) continue;
                const double dist = sqdist(data.row(i), centroids.data() + c * d);
                if (dist < best) {
                    best = dist;
                    best_c = static_cast<Label>(c);
                }
            }
            assign[i] = best_c;
        }

        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(assign[i])];

        std::vector<char> moved(n, 0);
        for (std::size_t c = 0; c < k; ++c) {
            if (!alive[c] || counts[c] > 0) continue;
            if (cfg.empty_cluster_policy == EmptyClusterPolicy::kDrop) {
                alive[c] = 0;
                continue;
            }
            double far_dist = -1.0;
            std::size_t far_i = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (moved[i]) continue;
                if (!pinned.empty() && pinned[i] != kMissing) continue;
                if (counts[static_cast<std::size_t>(assign[i])] <= 1) continue;
                const double dist =
                    sqdist(data.row(i), centroids.data() + static_cast<std::size_t>(assign[i]) * d);
                if (dist > far_dist) {
                    far_dist = dist;
                    far_i = i;
                }
            }
            if (far_i == n) continue;  // nothing left to move, keep old centroid
            --counts[static_cast<std::size_t>(assign[far_i])];
            assign[far_i] = static_cast<Label>(c);
            ++counts[c];
            moved[far_i] = 1;
        }

        std::vector<double> next(k * d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = data.row(i);
            double* target = next.data() + static_cast<std::size_t>(assign[i]) * d;
            for (std::size_t j = 0; j < d; ++j) target[j] += row[j];
        }
        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (!alive[c] || counts[c] == 0) {
                std::copy(centroids.begin() + c * d, centroids.begin() + (c + 1) * d,
                          next.begin() + c * d);
                continue;
            }
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                next[c * d + j] /= static_cast<double>(counts[c]);
                const double diff = next[c * d + j] - centroids[c * d + j];
                dist += diff * diff;
            }
            movement = std::max(movement, std::sqrt(dist));
        }
        centroids = std::move(next);

#ifndef NDEBUG
        const double obj = wcss(data, assign, centroids);
        assert(obj <= prev_obj + 1e-9 * (1.0 + std::abs(prev_obj)));
        prev_obj = obj;
#endif
        if (movement < cfg.tol) break;
    }
    return finalize_labels(std::move(assign), alive, std::move(prov));
}

}  // namespace

Partition lloyd_kmeans(const Dataset& data, const ClustererConfig& cfg,
                       const std::optional<std::vector<double>>& init_centroids) {
    check_config(cfg, data.size());
    std::vector<double> centroids;
    if (init_centroids) {
        if (init_centroids->size() != static_cast<std::size_t>(cfg.k) * data.dim())
            fail(Errc::length_mismatch, "init centroids must be k x d");
        centroids = *init_centroids;
    } else {
        Rng rng(cfg.rng_seed);
        centroids = sample_centroids(data, cfg.k, rng);
    }
    return euclidean_lloyd(data, cfg, std::move(centroids), {},
                           {"kmeans", 0, cfg.rng_seed});
}

Partition seeded_kmeans(const Dataset& data, const std::map<std::string, Label>& seeds,
                        const ClustererConfig& cfg) {
    check_config(cfg, data.size());
    const auto class_of = resolve_seeds(data, seeds, cfg.k);
    return euclidean_lloyd(data, cfg, seed_mean_centroids(data, class_of, cfg.k), {},
                           {"seeded", 0, cfg.rng_seed});
}

Partition constrained_kmeans(const Dataset& data, const std::map<std::string, Label>& seeds,
                             const ClustererConfig& cfg) {
    check_config(cfg, data.size());
    const auto class_of = resolve_seeds(data, seeds, cfg.k);
    return euclidean_lloyd(data, cfg, seed_mean_centroids(data, class_of, cfg.k), class_of,
                           {"constrained", 0, cfg.rng_seed});
}

Partition cop_kmeans(const Dataset& data, const SupervisionBundle& constraints,
                     const ClustererConfig& cfg) {
    check_config(cfg, data.size());
    const SupervisionBundle valid = validate_supervision(constraints, data);
    const std::size_t n = data.size(), d = data.dim();
    const std::size_t k = static_cast<std::size_t>(cfg.k);

    std::vector<std::pair<std::size_t, std::size_t>> ml;
    ml.reserve(valid.must_link.size());
    for (const auto& [a, b] : valid.must_link)
        ml.emplace_back(data.index_of(a), data.index_of(b));
    const auto units = must_link_closure(ml, n);

    std::vector<std::vector<std::size_t>> cl_partners(n);
    for (const auto& [a, b] : valid.cannot_link) {
        const std::size_t ia = data.index_of(a), ib = data.index_of(b);
        cl_partners[ia].push_back(ib);
        cl_partners[ib].push_back(ia);
    }

    Rng rng(cfg.rng_seed);
    std::vector<double> centroids = sample_centroids(data, cfg.k, rng);
    std::vector<char> alive(k, 1);
    std::vector<Label> assign(n, 0);
    std::vector<char> assigned(n, 0);
    std::vector<std::size_t> counts(k, 0);

    auto unit_mean_sqdist = [&](const std::vector<std::size_t>& unit, std::size_t c) {
        double s = 0.0;
        for (std::size_t i : unit) s += sqdist(data.row(i), centroids.data() + c * d);
        return s / static_cast<double>(unit.size());
    };
    auto feasible = [&](const std::vector<std::size_t>& unit, std::size_t c) {
        for (std::size_t i : unit)
            for (std::size_t w : cl_partners[i])
                if (assigned[w] && assign[w] == static_cast<Label>(c)) return false;
        return true;
    };

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        std::fill(assigned.begin(), assigned.end(), 0);
        std::fill(counts.begin(), counts.end(), 0);
        for (const auto& unit : units) {
            double best = std::numeric_limits<double>::infinity();
            std::size_t best_c = k;
            for (std::size_t c = 0; c < k; ++c) {
                if (!alive[c] || !feasible(unit, c)) continue;
                const double dist = unit_mean_sqdist(unit, c);
                if (dist < best) {
                    best = dist;
                    best_c = c;
                }
            }
            if (best_c == k)
                fail(Errc::infeasible_assignment,
                     "no feasible cluster for object '" +
                         data.object_ids()[unit.front()] + "'");
            for (std::size_t i : unit) {
                assign[i] = static_cast<Label>(best_c);
                assigned[i] = 1;
            }
            counts[best_c] += unit.size();
        }

        std::vector<char> moved_unit(units.size(), 0);
        for (std::size_t c = 0; c < k; ++c) {
            if (!alive[c] || counts[c] > 0) continue;
            if (cfg.empty_cluster_policy == EmptyClusterPolicy::kDrop) {
                alive[c] = 0;
                continue;
            }
            double far_dist = -1.0;
            std::size_t far_u = units.size();
            for (std::size_t u = 0; u < units.size(); ++u) {
                if (moved_unit[u]) continue;
                const std::size_t home = static_cast<std::size_t>(assign[units[u].front()]);
                if (counts[home] <= units[u].size()) continue;
                const double dist = unit_mean_sqdist(units[u], home);
                if (dist > far_dist) {
                    far_dist = dist;
                    far_u = u;
                }
            }
            if (far_u == units.size()) continue;
            const std::size_t home = static_cast<std::size_t>(assign[units[far_u].front()]);
            counts[home] -= units[far_u].size();
            for (std::size_t i : units[far_u]) assign[i] = static_cast<Label>(c);
            counts[c] += units[far_u].size();
            moved_unit[far_u] = 1;
        }

        std::vector<double> next(k * d, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto row = data.row(i);
            double* target = next.data() + static_cast<std::size_t>(assign[i]) * d;
            for (std::size_t j = 0; j < d; ++j) target[j] += row[j];
        }
        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (!alive[c] || counts[c] == 0) {
                std::copy(centroids.begin() + c * d, centroids.begin() + (c + 1) * d,
                          next.begin() + c * d);
                continue;
            }
            double dist = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
                next[c * d + j] /= static_cast<double>(counts[c]);
                const double diff = next[c * d + j] - centroids[c * d + j];
                dist += diff * diff;
            }
            movement = std::max(movement, std::sqrt(dist));
        }
        centroids = std::move(next);
        if (movement < cfg.tol) break;
    }
    return finalize_labels(std::move(assign), alive, {"cop", 0, cfg.rng_seed});
}

Partition spherical_kmeans(const Dataset& data, const ClustererConfig& cfg,
                           const std::optional<std::map<std::string, Label>>& seeds) {
    check_config(cfg, data.size());
    const std::size_t n = data.size(), d = data.dim();
    const std::size_t k = static_cast<std::size_t>(cfg.k);

    std::vector<double> unit(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = data.row(i);
        double norm = 0.0;
        for (double x : row) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0)
            fail(Errc::zero_vector, "row '" + data.object_ids()[i] + "' is all zero");
        for (std::size_t j = 0; j < d; ++j) unit[i * d + j] = row[j] / norm;
    }
    auto dot_row = [&](std::size_t i, const double* c) {
        double s = 0.0;
        for (std::size_t j = 0; j < d; ++j) s += unit[i * d + j] * c[j];
        return s;
    };
    auto normalize = [&](double* v) {
        double norm = 0.0;
        for (std::size_t j = 0; j < d; ++j) norm += v[j] * v[j];
        norm = std::sqrt(norm);
        if (norm < 1e-12) return false;
        for (std::size_t j = 0; j < d; ++j) v[j] /= norm;
        return true;
    };

    std::vector<double> centroids(k * d, 0.0);
    if (seeds) {
        const auto class_of = resolve_seeds(data, *seeds, cfg.k);
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const Label c = class_of[i];
            if (c == kMissing) continue;
            for (std::size_t j = 0; j < d; ++j)
                centroids[static_cast<std::size_t>(c) * d + j] += unit[i * d + j];
            ++counts[static_cast<std::size_t>(c)];
        }
        for (std::size_t c = 0; c < k; ++c)
            if (!normalize(centroids.data() + c * d))
                fail(Errc::zero_vector,
                     "seed mean for class " + std::to_string(c) + " has zero norm");
    } else {
        Rng rng(cfg.rng_seed);
        std::vector<std::size_t> pool(n);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        for (std::size_t c = 0; c < k; ++c) {
            const std::size_t pick = c + rng.below(n - c);
            std::swap(pool[c], pool[pick]);
            std::copy(unit.begin() + pool[c] * d, unit.begin() + (pool[c] + 1) * d,
                      centroids.begin() + c * d);
        }
    }

    std::vector<char> alive(k, 1);
    std::vector<Label> assign(n, 0);
    std::vector<std::size_t> counts(k, 0);
#ifndef NDEBUG
    double prev_obj = -std::numeric_limits<double>::infinity();
#endif

    for (int iter = 0; iter < cfg.max_iters; ++iter) {
        for (std::size_t i = 0; i < n; ++i) {
            double best = -std::numeric_limits<double>::infinity();
            Label best_c = 0;
            for (std::size_t c = 0; c < k; ++c) {
                if (!alive[c]) continue;
                const double sim = dot_row(i, centroids.data() + c * d);
                if (sim > best) {
                    best = sim;
                    best_c = static_cast<Label>(c);
                }
            }
            assign[i] = best_c;
        }

        std::fill(counts.begin(), counts.end(), 0);
        for (std::size_t i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(assign[i])];

        std::vector<char> moved(n, 0);
        for (std::size_t c = 0; c < k; ++c) {
            if (!alive[c] || counts[c] > 0) continue;
            if (cfg.empty_cluster_policy == EmptyClusterPolicy::kDrop) {
                alive[c] = 0;
                continue;
            }
            double worst = std::numeric_limits<double>::infinity();
            std::size_t worst_i = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (moved[i]) continue;
                if (counts[static_cast<std::size_t>(assign[i])] <= 1) continue;
                const double sim =
                    dot_row(i, centroids.data() + static_cast<std::size_t>(assign[i]) * d);
                if (sim < worst) {
                    worst = sim;
                    worst_i = i;
                }
            }
            if (worst_i == n) continue;
            --counts[static_cast<std::size_t>(assign[worst_i])];
            assign[worst_i] = static_cast<Label>(c);
            ++counts[c];
            moved[worst_i] = 1;
        }

        std::vector<double> next(k * d, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j)
                next[static_cast<std::size_t>(assign[i]) * d + j] += unit[i * d + j];
        double movement = 0.0;
        for (std::size_t c = 0; c < k; ++c) {
            if (!alive[c] || counts[c] == 0 || !normalize(next.data() + c * d)) {
                std::copy(centroids.begin() + c * d, centroids.begin() + (c + 1) * d,
                          next.begin() + c * d);
                continue;
            }
            double dot = 0.0;
            for (std::size_t j = 0; j < d; ++j) dot += next[c * d + j] * centroids[c * d + j];
            movement = std::max(movement, 1.0 - dot);
        }
        centroids = std::move(next);

#ifndef NDEBUG
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            obj += dot_row(i, centroids.data() + static_cast<std::size_t>(assign[i]) * d);
        assert(obj >= prev_obj - 1e-9 * (1.0 + std::abs(prev_obj)));
        prev_obj = obj;
#endif
        if (movement < cfg.tol) break;
    }
    return finalize_labels(std::move(assign), alive, {"spherical", 0, cfg.rng_seed});
}

Ensemble generate_ensemble(const Dataset& data, const EnsembleSpec& spec,
                           const SupervisionBundle& supervision) {
    if (spec.entries.empty())
        fail(Errc::degenerate_input, "ensemble spec has no entries");
    if (spec.reference.kind == ReferencePolicy::Kind::kUserIndex &&
        spec.reference.index >= spec.entries.size())
        fail(Errc::index_out_of_range, "reference index " + std::to_string(spec.reference.index) +
                                           " for m=" + std::to_string(spec.entries.size()));
    const SupervisionBundle valid = validate_supervision(supervision, data);

    std::vector<Partition> partitions;
    std::vector<PartitionWeights> weights;
    partitions.reserve(spec.entries.size());
    for (std::size_t j = 0; j < spec.entries.size(); ++j) {
        const EnsembleEntry& entry = spec.entries[j];
        const std::string name = algorithm_name(entry.algorithm);
        try {
            Partition raw = [&] {
                switch (entry.algorithm) {
                    case Algorithm::kKMeans: return lloyd_kmeans(data, entry.config);
                    case Algorithm::kSeeded: return seeded_kmeans(data, valid.seeds, entry.config);
                    case Algorithm::kConstrained:
                        return constrained_kmeans(data, valid.seeds, entry.config);
                    case Algorithm::kCop: return cop_kmeans(data, valid, entry.config);
                    case Algorithm::kSpherical:
                        return spherical_kmeans(data, entry.config,
                                                valid.seeds.empty()
                                                    ? std::nullopt
                                                    : std::make_optional(valid.seeds));
                }
                fail(Errc::invalid_argument, "unhandled algorithm");
            }();
            Partition canon = canonicalize(raw);
            partitions.emplace_back(canon.labels(), canon.k(),
                                    Provenance{name, static_cast<std::uint32_t>(j),
                                               entry.config.rng_seed});
        } catch (const Error& e) {
            throw Error(e.code(),
                        "entry " + std::to_string(j) + " (" + name + "): " + e.detail());
        }
        weights.push_back({entry.alpha, entry.beta});
    }

    std::size_t reference = spec.reference.index;
    if (spec.reference.kind == ReferencePolicy::Kind::kRandom) {
        Rng rng(spec.reference.seed);
        reference = static_cast<std::size_t>(rng.below(partitions.size()));
    }
    return Ensemble(std::move(partitions), std::move(weights), reference);
}

}  // namespace scev
