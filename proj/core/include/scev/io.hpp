#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scev/consensus.hpp"
#include "scev/metrics.hpp"
#include "scev/types.hpp"

namespace scev {

// Comma-separated, first column the object id, remaining columns numeric
// features. A header is assumed when every non-id cell of the first row
// fails numeric parsing; header names become feature names.
Dataset load_dataset(const std::string& path);

// Comma-separated, first column the object id, each further column one
// partition. "?" marks a missing assignment; all other tokens are labels and
// are mapped per column to dense integers in sorted token order. The token
// tables are kept so outputs can be rendered back in the original alphabet.
struct LoadedPartitions {
    std::vector<std::string> object_ids;
    std::vector<Partition> partitions;
    std::vector<std::vector<std::string>> tokens;  // per partition: dense label -> token
};
LoadedPartitions load_partitions(const std::string& path);

// Seeds file: lines "object_id,class"; constraints file: lines
// "id,id,ML" or "id,id,CL". The bundle is validated against the dataset.
SupervisionBundle load_supervision(const std::optional<std::string>& seeds_path,
                                   const std::optional<std::string>& constraints_path,
                                   const Dataset& data);

// Weights file: lines "partition_index,alpha,beta"; absent indices default
// to 1.0, 1.0.
std::vector<PartitionWeights> load_weights(const std::string& path, std::size_t m);

struct GaussianMix {
    Dataset data;
    Partition truth;
};

// Deterministic isotropic blobs; truth carries the generating labels.
GaussianMix make_gaussians(std::size_t n_per_cluster,
                           const std::vector<std::vector<double>>& centers, double sigma,
                           std::uint64_t seed);

// All writers go through a temp file plus rename, so interrupted runs never
// leave truncated outputs.
void atomic_write(const std::string& path, const std::string& content);

void save_dataset(const std::string& path, const Dataset& data);

// tokens, when given, renders dense labels back to their original alphabet;
// otherwise labels print as decimal integers. Missing prints as "?".
void save_partitions(const std::string& path, const std::vector<std::string>& ids,
                     const std::vector<Partition>& partitions,
                     const std::vector<std::vector<std::string>>* tokens = nullptr);

void save_weights(const std::string& path, const std::vector<PartitionWeights>& weights);

// One consensus label per line as "id,token". Labels map through the
// reference partition's token table; fresh labels beyond it render as
// "+0", "+1", ...; unresolved objects render as "?".
void save_consensus_labels(const std::string& path, const std::vector<std::string>& ids,
                           const ConsensusResult& result,
                           const std::vector<std::string>& reference_tokens);

std::string label_token(Label label, const std::vector<std::string>& reference_tokens);

// Structured audit document: per-partition mappings and scores, combined
// weights, per-object score tables and tie flags, metrics when truth is
// given. Deterministic byte-for-byte for identical runs.
std::string render_report(const RunAudit& audit, const std::vector<std::string>& object_ids,
                          const std::vector<std::vector<std::string>>& tokens,
                          TiePolicy tie_policy, bool normalize,
                          const MetricReport* metrics = nullptr);

std::string render_metrics(const MetricReport& metrics);

// CLI run configuration, parsed from JSON.
struct RunConfig {
    std::string dataset;
    std::optional<std::string> seeds;
    std::optional<std::string> constraints;
    std::optional<std::string> truth;
    EnsembleSpec spec;
    TiePolicy tie_policy = TiePolicy::kUnresolved;
    bool normalize = false;
    std::string out_partitions = "partitions.csv";
    std::string out_weights = "weights.csv";
    std::string out_labels = "consensus.csv";
    std::string out_report = "report.json";
};
RunConfig load_run_config(const std::string& path);

}  // namespace scev
