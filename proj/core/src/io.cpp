#include "scev/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "json.hpp"

#include "scev/core.hpp"
#include "scev/rng.hpp"

namespace scev {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && (s[b] == ' ' || s[b] == '\t' || s[b] == '\r')) ++b;
    while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
    return s.substr(b, e - b);
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            cells.push_back(trim(line.substr(start)));
            break;
        }
        cells.push_back(trim(line.substr(start, pos - start)));
        start = pos + 1;
    }
    return cells;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(Errc::parse_error, "cannot open '" + path + "'");
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        rows.push_back(split_csv(line));
    }
    return rows;
}

bool parse_double(const std::string& s, double& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

bool parse_u64(const std::string& s, std::uint64_t& out) {
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto res = std::from_chars(begin, end, out);
    return res.ec == std::errc{} && res.ptr == end;
}

std::string cell_pos(std::size_t row, std::size_t col) {
    return "row " + std::to_string(row + 1) + ", column " + std::to_string(col + 1);
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

}  // namespace

Dataset load_dataset(const std::string& path) {
    const auto rows = read_rows(path);
    if (rows.empty())
        fail(Errc::parse_error, "'" + path + "' has no rows");

    const std::size_t width = rows[0].size();
    if (width < 2)
        fail(Errc::parse_error, "'" + path + "' needs an id column plus features");

    // Header iff every non-id cell of the first row fails numeric parsing.
    bool header = true;
    for (std::size_t c = 1; c < width; ++c) {
        double v;
        if (parse_double(rows[0][c], v)) {
            header = false;
            break;
        }
    }
    std::vector<std::string> feature_names;
    std::size_t first = 0;
    if (header) {
        feature_names.assign(rows[0].begin() + 1, rows[0].end());
        first = 1;
        if (rows.size() == 1)
            fail(Errc::parse_error, "'" + path + "' has a header but no data rows");
    }

    const std::size_t n = rows.size() - first;
    const std::size_t d = width - 1;
    std::vector<std::string> ids;
    std::vector<double> features;
    ids.reserve(n);
    features.reserve(n * d);
    for (std::size_t r = first; r < rows.size(); ++r) {
        if (rows[r].size() != width)
            fail(Errc::parse_error, "ragged row at " + cell_pos(r, rows[r].size()));
        ids.push_back(rows[r][0]);
        for (std::size_t c = 1; c < width; ++c) {
            double v;
            if (!parse_double(rows[r][c], v))
                fail(Errc::parse_error,
                     "'" + rows[r][c] + "' is not numeric at " + cell_pos(r, c));
            if (!std::isfinite(v))
                fail(Errc::non_numeric_feature, "non-finite value at " + cell_pos(r, c));
            features.push_back(v);
        }
    }
    return Dataset(std::move(features), n, d, std::move(ids), std::move(feature_names));
}

LoadedPartitions load_partitions(const std::string& path) {
    const auto rows = read_rows(path);
    if (rows.empty())
        fail(Errc::parse_error, "'" + path + "' has no rows");
    const std::size_t width = rows[0].size();
    if (width < 2)
        fail(Errc::parse_error, "'" + path + "' needs an id column plus partitions");
    for (std::size_t r = 0; r < rows.size(); ++r)
        if (rows[r].size() != width)
            fail(Errc::ragged_rows, "row " + std::to_string(r + 1) + " has " +
                                        std::to_string(rows[r].size()) + " cells, expected " +
                                        std::to_string(width));

    LoadedPartitions out;
    out.object_ids.reserve(rows.size());
    std::set<std::string> seen;
    for (const auto& row : rows) {
        if (!seen.insert(row[0]).second)
            fail(Errc::duplicate_id, "duplicate object id '" + row[0] + "'");
        out.object_ids.push_back(row[0]);
    }

    for (std::size_t c = 1; c < width; ++c) {
        std::set<std::string> alphabet;
        for (const auto& row : rows)
            if (row[c] != "?") alphabet.insert(row[c]);
        if (alphabet.empty())
            fail(Errc::empty_column, "partition column " + std::to_string(c) + " is all '?'");
        std::map<std::string, Label> to_dense;
        std::vector<std::string> tokens;
        for (const auto& tok : alphabet) {  // sorted token order
            to_dense[tok] = static_cast<Label>(tokens.size());
            tokens.push_back(tok);
        }
        std::vector<Label> labels;
        labels.reserve(rows.size());
        for (const auto& row : rows)
            labels.push_back(row[c] == "?" ? kMissing : to_dense[row[c]]);
        out.partitions.emplace_back(std::move(labels), static_cast<Label>(tokens.size()),
                                    Provenance{"file", static_cast<std::uint32_t>(c - 1), 0});
        out.tokens.push_back(std::move(tokens));
    }
    return out;
}

SupervisionBundle load_supervision(const std::optional<std::string>& seeds_path,
                                   const std::optional<std::string>& constraints_path,
                                   const Dataset& data) {
    SupervisionBundle bundle;
    if (seeds_path) {
        const auto rows = read_rows(*seeds_path);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != 2)
                fail(Errc::parse_error,
                     "seed line " + std::to_string(r + 1) + " needs 'object_id,class'");
            double v;
            if (!parse_double(rows[r][1], v) || v != std::floor(v) || v < 0)
                fail(Errc::parse_error, "seed class '" + rows[r][1] + "' at line " +
                                            std::to_string(r + 1) + " is not a class index");
            if (!bundle.seeds.emplace(rows[r][0], static_cast<Label>(v)).second)
                fail(Errc::parse_error, "duplicate seed for '" + rows[r][0] + "'");
        }
    }
    if (constraints_path) {
        const auto rows = read_rows(*constraints_path);
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != 3)
                fail(Errc::parse_error, "constraint line " + std::to_string(r + 1) +
                                            " needs 'object_id,object_id,ML|CL'");
            const auto pair = SupervisionBundle::ordered(rows[r][0], rows[r][1]);
            if (rows[r][2] == "ML")
                bundle.must_link.insert(pair);
            else if (rows[r][2] == "CL")
                bundle.cannot_link.insert(pair);
            else
                fail(Errc::parse_error, "constraint tag '" + rows[r][2] + "' at line " +
                                            std::to_string(r + 1) + " is not ML or CL");
        }
    }
    return validate_supervision(bundle, data);
}

std::vector<PartitionWeights> load_weights(const std::string& path, std::size_t m) {
    const auto rows = read_rows(path);
    std::vector<PartitionWeights> weights(m);
    std::vector<char> given(m, 0);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        if (rows[r].size() != 3)
            fail(Errc::parse_error,
                 "weights line " + std::to_string(r + 1) + " needs 'index,alpha,beta'");
        std::uint64_t idx;
        double alpha, beta;
        if (!parse_u64(rows[r][0], idx))
            fail(Errc::parse_error, "bad partition index '" + rows[r][0] + "'");
        if (idx >= m)
            fail(Errc::index_out_of_range,
                 "partition index " + rows[r][0] + " for m=" + std::to_string(m));
        if (!parse_double(rows[r][1], alpha) || !parse_double(rows[r][2], beta))
            fail(Errc::parse_error, "bad weight at line " + std::to_string(r + 1));
        if (alpha < 0 || beta < 0)
            fail(Errc::invalid_argument, "weights must be non-negative");
        if (given[idx])
            fail(Errc::parse_error, "duplicate weights for partition " + rows[r][0]);
        given[idx] = 1;
        weights[idx] = {alpha, beta};
    }
    return weights;
}

GaussianMix make_gaussians(std::size_t n_per_cluster,
                           const std::vector<std::vector<double>>& centers, double sigma,
                           std::uint64_t seed) {
    if (centers.empty())
        fail(Errc::degenerate_input, "no centers given");
    if (n_per_cluster < 1)
        fail(Errc::degenerate_input, "n_per_cluster must be >= 1");
    if (sigma < 0)
        fail(Errc::invalid_argument, "sigma must be non-negative");
    const std::size_t d = centers.front().size();
    if (d < 1)
        fail(Errc::degenerate_input, "centers must have at least one coordinate");
    for (const auto& c : centers)
        if (c.size() != d)
            fail(Errc::length_mismatch, "centers have mixed dimensions");

    const std::size_t n = n_per_cluster * centers.size();
    Rng rng(seed);
    std::vector<double> features;
    features.reserve(n * d);
    std::vector<std::string> ids;
    ids.reserve(n);
    std::vector<Label> truth;
    truth.reserve(n);
    for (std::size_t c = 0; c < centers.size(); ++c) {
        for (std::size_t i = 0; i < n_per_cluster; ++i) {
            ids.push_back("g" + std::to_string(c * n_per_cluster + i));
            truth.push_back(static_cast<Label>(c));
            for (std::size_t j = 0; j < d; ++j)
                features.push_back(sigma == 0.0 ? centers[c][j]
                                                : centers[c][j] + rng.normal(0.0, sigma));
        }
    }
    Dataset data(std::move(features), n, d, std::move(ids));
    Partition labels(std::move(truth), static_cast<Label>(centers.size()),
                     {"truth", 0, seed});
    return {std::move(data), std::move(labels)};
}

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            fail(Errc::invalid_argument, "cannot write '" + tmp + "'");
        out << content;
        if (!out)
            fail(Errc::invalid_argument, "write to '" + tmp + "' failed");
    }
    std::filesystem::rename(tmp, path);
}

void save_dataset(const std::string& path, const Dataset& data) {
    std::string out;
    if (!data.feature_names().empty()) {
        out += "id";
        for (const auto& name : data.feature_names()) out += "," + name;
        out += "\n";
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
        out += data.object_ids()[i];
        for (std::size_t j = 0; j < data.dim(); ++j) out += "," + format_double(data.at(i, j));
        out += "\n";
    }
    atomic_write(path, out);
}

void save_partitions(const std::string& path, const std::vector<std::string>& ids,
                     const std::vector<Partition>& partitions,
                     const std::vector<std::vector<std::string>>* tokens) {
    for (const auto& p : partitions)
        if (p.size() != ids.size())
            fail(Errc::length_mismatch, "partition length does not match id count");
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += ids[i];
        for (std::size_t j = 0; j < partitions.size(); ++j) {
            const Label l = partitions[j].label(i);
            if (l == kMissing)
                out += ",?";
            else if (tokens)
                out += "," + (*tokens)[j][static_cast<std::size_t>(l)];
            else
                out += "," + std::to_string(l);
        }
        out += "\n";
    }
    atomic_write(path, out);
}

void save_weights(const std::string& path, const std::vector<PartitionWeights>& weights) {
    std::string out;
    for (std::size_t j = 0; j < weights.size(); ++j)
        out += std::to_string(j) + "," + format_double(weights[j].alpha) + "," +
               format_double(weights[j].beta) + "\n";
    atomic_write(path, out);
}

std::string label_token(Label label, const std::vector<std::string>& reference_tokens) {
    if (label == kUnresolved) return "?";
    if (static_cast<std::size_t>(label) < reference_tokens.size())
        return reference_tokens[static_cast<std::size_t>(label)];
    return "+" + std::to_string(label - static_cast<Label>(reference_tokens.size()));
}

void save_consensus_labels(const std::string& path, const std::vector<std::string>& ids,
                           const ConsensusResult& result,
                           const std::vector<std::string>& reference_tokens) {
    if (result.labels.size() != ids.size())
        fail(Errc::length_mismatch, "consensus length does not match id count");
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i)
        out += ids[i] + "," + label_token(result.labels[i], reference_tokens) + "\n";
    atomic_write(path, out);
}

std::string render_report(const RunAudit& audit, const std::vector<std::string>& object_ids,
                          const std::vector<std::vector<std::string>>& tokens,
                          TiePolicy tie_policy, bool normalize, const MetricReport* metrics) {
    nlohmann::ordered_json doc;
    doc["objects"] = object_ids;
    doc["reference_index"] = audit.reference_index;
    doc["tie_policy"] = tie_policy_name(tie_policy);
    doc["normalize"] = normalize;

    nlohmann::ordered_json parts = nlohmann::ordered_json::array();
    for (std::size_t j = 0; j < audit.base.size(); ++j) {
        const Partition& p = audit.base[j];
        nlohmann::ordered_json entry;
        entry["algorithm"] = p.provenance().algorithm;
        entry["run"] = p.provenance().run;
        entry["seed"] = p.provenance().seed;
        entry["k"] = p.k();
        entry["alpha"] = audit.weights[j].alpha;
        entry["beta"] = audit.weights[j].beta;
        entry["omega"] = audit.omega[j];
        entry["tokens"] = j < tokens.size() ? tokens[j] : std::vector<std::string>{};
        entry["alignment"] = {{"mapping", audit.alignments[j].mapping},
                              {"score", audit.alignments[j].score},
                              {"k_aligned", audit.alignments[j].k_aligned}};
        parts.push_back(std::move(entry));
    }
    doc["partitions"] = std::move(parts);

    const std::vector<std::string> ref_tokens =
        audit.reference_index < tokens.size() ? tokens[audit.reference_index]
                                              : std::vector<std::string>{};
    nlohmann::ordered_json consensus;
    consensus["k"] = audit.result.k;
    consensus["labels"] = audit.result.labels;
    {
        std::vector<std::string> rendered;
        rendered.reserve(audit.result.labels.size());
        for (Label l : audit.result.labels) rendered.push_back(label_token(l, ref_tokens));
        consensus["tokens"] = std::move(rendered);
    }
    consensus["margins"] = audit.result.margins;
    consensus["ties"] = audit.result.tie_flags;
    {
        nlohmann::ordered_json scores = nlohmann::ordered_json::array();
        for (const auto& row : audit.result.scores) {
            nlohmann::ordered_json obj = nlohmann::ordered_json::array();
            for (const auto& [label, weight] : row)
                obj.push_back(nlohmann::ordered_json::array({label, weight}));
            scores.push_back(std::move(obj));
        }
        consensus["scores"] = std::move(scores);
    }
    doc["consensus"] = std::move(consensus);

    if (metrics) {
        doc["metrics"] = {{"ari", metrics->ari},
                          {"nmi", metrics->nmi},
                          {"purity", metrics->purity},
                          {"agreement", metrics->agreement},
                          {"constraint_violations", metrics->constraint_violations}};
    }
    return doc.dump(2) + "\n";
}

std::string render_metrics(const MetricReport& metrics) {
    nlohmann::ordered_json doc = {{"ari", metrics.ari},
                                  {"nmi", metrics.nmi},
                                  {"purity", metrics.purity},
                                  {"agreement", metrics.agreement},
                                  {"constraint_violations", metrics.constraint_violations}};
    return doc.dump(2) + "\n";
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        fail(Errc::parse_error, "cannot open '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        fail(Errc::parse_error, "'" + path + "': " + e.what());
    }

    RunConfig cfg;
    try {
        cfg.dataset = doc.at("dataset").get<std::string>();
        if (doc.contains("seeds")) cfg.seeds = doc["seeds"].get<std::string>();
        if (doc.contains("constraints")) cfg.constraints = doc["constraints"].get<std::string>();
        if (doc.contains("truth")) cfg.truth = doc["truth"].get<std::string>();

        for (const auto& e : doc.at("entries")) {
            EnsembleEntry entry;
            entry.algorithm = algorithm_from_name(e.at("algorithm").get<std::string>());
            entry.config.k = e.at("k").get<Label>();
            entry.config.max_iters = e.value("max_iters", 100);
            entry.config.tol = e.value("tol", 1e-6);
            entry.config.rng_seed = e.value("seed", std::uint64_t{0});
            const std::string policy = e.value("empty_cluster_policy", "reseed-farthest");
            if (policy == "reseed-farthest")
                entry.config.empty_cluster_policy = EmptyClusterPolicy::kReseedFarthest;
            else if (policy == "drop")
                entry.config.empty_cluster_policy = EmptyClusterPolicy::kDrop;
            else
                fail(Errc::parse_error, "empty_cluster_policy '" + policy + "'");
            entry.alpha = e.value("alpha", 1.0);
            entry.beta = e.value("beta", 1.0);
            cfg.spec.entries.push_back(std::move(entry));
        }

        const auto& ref = doc.at("reference");
        const std::string policy = ref.at("policy").get<std::string>();
        if (policy == "user-index")
            cfg.spec.reference = ReferencePolicy::user_index(ref.at("index").get<std::size_t>());
        else if (policy == "random")
            cfg.spec.reference = ReferencePolicy::random(ref.at("seed").get<std::uint64_t>());
        else
            fail(Errc::parse_error, "reference policy '" + policy + "'");

        cfg.tie_policy = tie_policy_from_name(doc.value("tie_policy", "unresolved"));
        cfg.normalize = doc.value("normalize", false);
        if (doc.contains("out")) {
            const auto& out = doc["out"];
            cfg.out_partitions = out.value("partitions", cfg.out_partitions);
            cfg.out_weights = out.value("weights", cfg.out_weights);
            cfg.out_labels = out.value("labels", cfg.out_labels);
            cfg.out_report = out.value("report", cfg.out_report);
        }
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        fail(Errc::parse_error, "'" + path + "': " + e.what());
    }
    return cfg;
}

}  // namespace scev
