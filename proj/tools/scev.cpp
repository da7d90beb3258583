// Command line driver for the clustering-ensemble pipeline.

#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "scev/alignment.hpp"
#include "scev/clusterers.hpp"
#include "scev/consensus.hpp"
#include "scev/core.hpp"
#include "scev/io.hpp"
#include "scev/metrics.hpp"

namespace {

using namespace scev;

template <typename Fn>
auto with_stage(const std::string& stage, Fn&& fn) {
    try {
        return fn();
    } catch (const Error& e) {
        throw Error(e.code(), stage + ": " + e.detail());
    }
}

std::vector<std::string> default_tokens(Label k) {
    std::vector<std::string> tokens;
    tokens.reserve(static_cast<std::size_t>(k));
    for (Label l = 0; l < k; ++l) tokens.push_back(std::to_string(l));
    return tokens;
}

// Reorders a single-column partition file onto the given id order.
Partition align_truth(const LoadedPartitions& truth, const std::vector<std::string>& ids) {
    std::map<std::string, std::size_t> where;
    for (std::size_t i = 0; i < truth.object_ids.size(); ++i) where[truth.object_ids[i]] = i;
    std::vector<Label> labels;
    labels.reserve(ids.size());
    for (const auto& id : ids) {
        auto it = where.find(id);
        if (it == where.end())
            fail(Errc::unknown_object, "truth file has no row for '" + id + "'");
        labels.push_back(truth.partitions.front().label(it->second));
    }
    return Partition(std::move(labels), truth.partitions.front().k(),
                     truth.partitions.front().provenance());
}

ClustererConfig make_config(Label k, int max_iters, double tol, std::uint64_t seed,
                            const std::string& empty_policy) {
    ClustererConfig cfg;
    cfg.k = k;
    cfg.max_iters = max_iters;
    cfg.tol = tol;
    cfg.rng_seed = seed;
    if (empty_policy == "reseed-farthest")
        cfg.empty_cluster_policy = EmptyClusterPolicy::kReseedFarthest;
    else if (empty_policy == "drop")
        cfg.empty_cluster_policy = EmptyClusterPolicy::kDrop;
    else
        fail(Errc::invalid_argument, "empty cluster policy '" + empty_policy + "'");
    return cfg;
}

std::vector<std::vector<double>> parse_centers(const std::string& text) {
    std::vector<std::vector<double>> centers;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t pos = text.find(';', start);
        const std::string chunk =
            pos == std::string::npos ? text.substr(start) : text.substr(start, pos - start);
        std::vector<double> center;
        std::size_t cstart = 0;
        while (cstart <= chunk.size()) {
            const std::size_t cpos = chunk.find(',', cstart);
            const std::string cell = cpos == std::string::npos ? chunk.substr(cstart)
                                                               : chunk.substr(cstart, cpos - cstart);
            try {
                center.push_back(std::stod(cell));
            } catch (const std::exception&) {
                fail(Errc::parse_error, "center coordinate '" + cell + "'");
            }
            if (cpos == std::string::npos) break;
            cstart = cpos + 1;
        }
        centers.push_back(std::move(center));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return centers;
}

void write_pipeline_outputs(const RunConfig& cfg, const Dataset& data,
                            const SupervisionBundle& bundle, const RunAudit& audit) {
    std::vector<std::vector<std::string>> tokens;
    tokens.reserve(audit.base.size());
    for (const auto& p : audit.base) tokens.push_back(default_tokens(p.k()));

    std::optional<MetricReport> metrics;
    if (cfg.truth) {
        const LoadedPartitions truth = with_stage("load", [&] { return load_partitions(*cfg.truth); });
        const Partition truth_aligned = align_truth(truth, data.object_ids());
        const Partition consensus(audit.result.labels, std::max<Label>(audit.result.k, 1),
                                  {"consensus", 0, 0});
        metrics = with_stage("eval", [&] { return evaluate(consensus, truth_aligned); });
        if (!bundle.must_link.empty() || !bundle.cannot_link.empty())
            metrics->constraint_violations = with_stage(
                "eval", [&] { return constraint_violation_count(consensus, bundle, data); });
    }

    with_stage("write", [&] {
        save_partitions(cfg.out_partitions, data.object_ids(), audit.base, &tokens);
        save_weights(cfg.out_weights, audit.weights);
        save_consensus_labels(cfg.out_labels, data.object_ids(), audit.result,
                              tokens[audit.reference_index]);
        atomic_write(cfg.out_report,
                     render_report(audit, data.object_ids(), tokens, cfg.tie_policy,
                                   cfg.normalize, metrics ? &*metrics : nullptr));
        return 0;
    });
}

int run_cluster(const std::string& data_path, const std::string& algorithm, Label k,
                int max_iters, double tol, std::uint64_t seed, const std::string& empty_policy,
                const std::optional<std::string>& seeds_path,
                const std::optional<std::string>& constraints_path, const std::string& out) {
    const Dataset data = with_stage("load", [&] { return load_dataset(data_path); });
    const SupervisionBundle bundle =
        with_stage("load", [&] { return load_supervision(seeds_path, constraints_path, data); });
    const ClustererConfig cfg = make_config(k, max_iters, tol, seed, empty_policy);
    const Algorithm algo = algorithm_from_name(algorithm);

    const Partition p = with_stage("cluster", [&] {
        switch (algo) {
            case Algorithm::kKMeans: return lloyd_kmeans(data, cfg);
            case Algorithm::kSeeded: return seeded_kmeans(data, bundle.seeds, cfg);
            case Algorithm::kConstrained: return constrained_kmeans(data, bundle.seeds, cfg);
            case Algorithm::kCop: return cop_kmeans(data, bundle, cfg);
            case Algorithm::kSpherical:
                return spherical_kmeans(data, cfg,
                                        bundle.seeds.empty()
                                            ? std::nullopt
                                            : std::make_optional(bundle.seeds));
        }
        fail(Errc::invalid_argument, "unhandled algorithm");
    });
    with_stage("write", [&] {
        save_partitions(out, data.object_ids(), {p});
        return 0;
    });
    return 0;
}

int run_ensemble(const std::string& config_path) {
    const RunConfig cfg = with_stage("load", [&] { return load_run_config(config_path); });
    const Dataset data = with_stage("load", [&] { return load_dataset(cfg.dataset); });
    const SupervisionBundle bundle =
        with_stage("load", [&] { return load_supervision(cfg.seeds, cfg.constraints, data); });
    const Ensemble e = generate_ensemble(data, cfg.spec, bundle);

    std::vector<std::vector<std::string>> tokens;
    for (const auto& p : e.partitions()) tokens.push_back(default_tokens(p.k()));
    with_stage("write", [&] {
        save_partitions(cfg.out_partitions, data.object_ids(), e.partitions(), &tokens);
        save_weights(cfg.out_weights, e.weights());
        return 0;
    });
    return 0;
}

int run_consensus(const std::string& partitions_path, const std::optional<std::string>& weights_path,
                  std::size_t reference, const std::string& tie_policy, bool normalize,
                  const std::string& out, const std::optional<std::string>& report_path,
                  const std::optional<std::string>& truth_path) {
    const LoadedPartitions loaded =
        with_stage("load", [&] { return load_partitions(partitions_path); });
    std::vector<PartitionWeights> weights(loaded.partitions.size());
    if (weights_path)
        weights = with_stage("load",
                             [&] { return load_weights(*weights_path, loaded.partitions.size()); });
    if (reference >= loaded.partitions.size())
        fail(Errc::index_out_of_range, "--reference " + std::to_string(reference) + " for m=" +
                                           std::to_string(loaded.partitions.size()));
    const Ensemble e(loaded.partitions, weights, reference);
    const TiePolicy policy = tie_policy_from_name(tie_policy);
    const RunAudit audit = consensus_run(e, policy, normalize);

    std::optional<MetricReport> metrics;
    if (truth_path) {
        const LoadedPartitions truth = with_stage("load", [&] { return load_partitions(*truth_path); });
        const Partition truth_aligned = align_truth(truth, loaded.object_ids);
        const Partition consensus(audit.result.labels, std::max<Label>(audit.result.k, 1),
                                  {"consensus", 0, 0});
        metrics = with_stage("eval", [&] { return evaluate(consensus, truth_aligned); });
    }

    with_stage("write", [&] {
        save_consensus_labels(out, loaded.object_ids, audit.result,
                              loaded.tokens[audit.reference_index]);
        if (report_path)
            atomic_write(*report_path,
                         render_report(audit, loaded.object_ids, loaded.tokens, policy, normalize,
                                       metrics ? &*metrics : nullptr));
        return 0;
    });
    return 0;
}

int run_eval(const std::string& a_path, const std::string& b_path,
             const std::optional<std::string>& out) {
    const LoadedPartitions a = with_stage("load", [&] { return load_partitions(a_path); });
    const LoadedPartitions b = with_stage("load", [&] { return load_partitions(b_path); });
    const Partition q = align_truth(b, a.object_ids);
    const MetricReport r = with_stage("eval", [&] { return evaluate(a.partitions.front(), q); });
    const std::string text = render_metrics(r);
    std::fputs(text.c_str(), stdout);
    if (out)
        with_stage("write", [&] {
            atomic_write(*out, text);
            return 0;
        });
    return 0;
}

int run_pipeline(const std::string& config_path) {
    const RunConfig cfg = with_stage("load", [&] { return load_run_config(config_path); });
    const Dataset data = with_stage("load", [&] { return load_dataset(cfg.dataset); });
    const SupervisionBundle bundle =
        with_stage("load", [&] { return load_supervision(cfg.seeds, cfg.constraints, data); });
    const RunAudit audit = scev_run(data, cfg.spec, bundle, cfg.tie_policy, cfg.normalize);
    write_pipeline_outputs(cfg, data, bundle, audit);
    return 0;
}

int run_synth(std::size_t n_per_cluster, const std::string& centers_text, double sigma,
              std::uint64_t seed, const std::string& out, const std::string& truth_out) {
    const auto centers = parse_centers(centers_text);
    const GaussianMix mix = make_gaussians(n_per_cluster, centers, sigma, seed);
    with_stage("write", [&] {
        save_dataset(out, mix.data);
        save_partitions(truth_out, mix.data.object_ids(), {mix.truth});
        return 0;
    });
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised clustering ensembles by weighted voting"};
    app.require_subcommand(1);

    // cluster
    std::string c_data, c_algorithm = "kmeans", c_out = "partition.csv";
    std::string c_empty = "reseed-farthest";
    scev::Label c_k = 2;
    int c_max_iters = 100;
    double c_tol = 1e-6;
    std::uint64_t c_seed = 0;
    std::optional<std::string> c_seeds, c_constraints;
    auto* cluster = app.add_subcommand("cluster", "Run one base clusterer");
    cluster->add_option("--data", c_data, "dataset csv")->required();
    cluster->add_option("--algorithm", c_algorithm,
                        "kmeans|seeded|constrained|cop|spherical");
    cluster->add_option("--k", c_k, "cluster count")->required();
    cluster->add_option("--max-iters", c_max_iters, "iteration cap");
    cluster->add_option("--tol", c_tol, "convergence threshold");
    cluster->add_option("--seed", c_seed, "rng seed");
    cluster->add_option("--empty-policy", c_empty, "reseed-farthest|drop");
    cluster->add_option("--seeds", c_seeds, "seeds csv");
    cluster->add_option("--constraints", c_constraints, "constraints csv");
    cluster->add_option("--out", c_out, "partition file to write");

    // ensemble
    std::string e_config;
    auto* ensemble = app.add_subcommand("ensemble", "Generate base partitions from a run config");
    ensemble->add_option("--config", e_config, "run config json")->required();

    // consensus
    std::string n_partitions, n_tie = "unresolved", n_out = "consensus.csv";
    std::optional<std::string> n_weights, n_report, n_truth;
    std::size_t n_reference = 0;
    bool n_normalize = false;
    auto* consensus = app.add_subcommand("consensus", "Align and vote over existing partitions");
    consensus->add_option("--partitions", n_partitions, "partitions csv")->required();
    consensus->add_option("--weights", n_weights, "weights csv (default all 1,1)");
    consensus->add_option("--reference", n_reference, "reference partition index");
    consensus->add_option("--tie-policy", n_tie, "unresolved|reference|lowest");
    consensus->add_flag("--normalize", n_normalize, "rescale weights to sum to m");
    consensus->add_option("--out", n_out, "consensus labels file");
    consensus->add_option("--report", n_report, "audit report json");
    consensus->add_option("--truth", n_truth, "truth labels for metrics");

    // eval
    std::string v_a, v_b;
    std::optional<std::string> v_out;
    auto* eval = app.add_subcommand("eval", "Compare two partition files");
    eval->add_option("a", v_a, "partition csv")->required();
    eval->add_option("b", v_b, "partition csv")->required();
    eval->add_option("--out", v_out, "metrics json");

    // pipeline
    std::string p_config;
    auto* pipeline = app.add_subcommand("pipeline", "Full run from a config json");
    pipeline->add_option("--config", p_config, "run config json")->required();

    // synth
    std::size_t s_n = 50;
    std::string s_centers = "0,0;10,0;0,10", s_out = "data.csv", s_truth = "truth.csv";
    double s_sigma = 0.5;
    std::uint64_t s_seed = 0;
    auto* synth = app.add_subcommand("synth", "Generate gaussian blobs with ground truth");
    synth->add_option("--n-per-cluster", s_n, "points per center");
    synth->add_option("--centers", s_centers, "centers as 'x,y;x,y;...'");
    synth->add_option("--sigma", s_sigma, "isotropic stddev");
    synth->add_option("--seed", s_seed, "rng seed");
    synth->add_option("--out", s_out, "dataset csv");
    synth->add_option("--truth-out", s_truth, "truth labels csv");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cluster->parsed())
            return run_cluster(c_data, c_algorithm, c_k, c_max_iters, c_tol, c_seed, c_empty,
                               c_seeds, c_constraints, c_out);
        if (ensemble->parsed()) return run_ensemble(e_config);
        if (consensus->parsed())
            return run_consensus(n_partitions, n_weights, n_reference, n_tie, n_normalize, n_out,
                                 n_report, n_truth);
        if (eval->parsed()) return run_eval(v_a, v_b, v_out);
        if (pipeline->parsed()) return run_pipeline(p_config);
        if (synth->parsed()) return run_synth(s_n, s_centers, s_sigma, s_seed, s_out, s_truth);
    } catch (const scev::Error& e) {
        std::cerr << "scev: error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "scev: error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
