#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "json.hpp"

#include "scev/alignment.hpp"
#include "scev/io.hpp"
#include "scev/rng.hpp"

using namespace scev;

namespace {

struct TempFile {
    std::filesystem::path path;
    explicit TempFile(const std::string& name, const std::string& content = "") {
        path = std::filesystem::temp_directory_path() /
               ("scev_io_" + std::to_string(::getpid()) + "_" + name);
        if (!content.empty()) {
            std::ofstream out(path);
            out << content;
        }
    }
    ~TempFile() { std::filesystem::remove(path); }
    std::string str() const { return path.string(); }
};

const std::string kWorkedExample =
    "x1,1,A,alpha,Z\n"
    "x2,1,A,beta,Y\n"
    "x3,3,B,beta,?\n"
    "x4,2,C,alpha,Y\n"
    "x5,2,B,gamma,Z\n"
    "x6,3,C,?,Z\n"
    "x7,3,B,gamma,?\n";

}  // namespace

TEST_CASE("load_dataset parses plain and headered files") {
    const TempFile plain("plain.csv", "a,1.5,2\nb,-3,0.25\n");
    const Dataset d = load_dataset(plain.str());
    CHECK(d.size() == 2);
    CHECK(d.dim() == 2);
    CHECK(d.at(1, 0) == -3.0);
    CHECK(d.feature_names().empty());

    const TempFile headered("headered.csv", "id,height,width\na,1,2\nb,3,4\n");
    const Dataset h = load_dataset(headered.str());
    CHECK(h.size() == 2);
    CHECK(h.feature_names() == std::vector<std::string>{"height", "width"});
}

TEST_CASE("load_dataset error cases") {
    const TempFile dup("dup.csv", "a,1\na,2\n");
    try {
        load_dataset(dup.str());
        FAIL("expected DuplicateId");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::duplicate_id);
        CHECK(std::string(e.what()).find("'a'") != std::string::npos);
    }

    // Text in a feature cell of a non-header row names the cell.
    const TempFile text("text.csv", "a,1,2\nb,oops,4\n");
    try {
        load_dataset(text.str());
        FAIL("expected ParseError");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::parse_error);
        CHECK(std::string(e.what()).find("row 2, column 2") != std::string::npos);
    }

    // A first row mixing text and numbers is not a header.
    const TempFile mixed("mixed.csv", "a,oops,2\nb,3,4\n");
    CHECK_THROWS_AS(load_dataset(mixed.str()), Error);

    const TempFile ragged("ragged.csv", "a,1,2\nb,3\n");
    CHECK_THROWS_AS(load_dataset(ragged.str()), Error);

    const TempFile inf("inf.csv", "a,1,2\nb,inf,4\n");
    try {
        load_dataset(inf.str());
        FAIL("expected NonNumericFeature");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::non_numeric_feature);
    }

    CHECK_THROWS_AS(load_dataset("/nonexistent/file.csv"), Error);
}

TEST_CASE("load_partitions ingests the worked example") {
    const TempFile f("worked_example.csv", kWorkedExample);
    const LoadedPartitions loaded = load_partitions(f.str());
    CHECK(loaded.partitions.size() == 4);
    CHECK(loaded.object_ids.size() == 7);

    CHECK(loaded.partitions[0].k() == 3);
    CHECK(loaded.partitions[3].k() == 2);
    CHECK(loaded.tokens[0] == std::vector<std::string>{"1", "2", "3"});
    CHECK(loaded.tokens[3] == std::vector<std::string>{"Y", "Z"});

    // Missing assignments land exactly where the table says "?".
    CHECK(loaded.partitions[2].label(5) == kMissing);
    CHECK(loaded.partitions[3].label(2) == kMissing);
    CHECK(loaded.partitions[3].label(6) == kMissing);

    CHECK(loaded.partitions[0].labels() == std::vector<Label>{0, 0, 2, 1, 1, 2, 2});
    CHECK(loaded.partitions[3].labels() ==
          std::vector<Label>{1, 0, kMissing, 0, 1, 1, kMissing});
}

TEST_CASE("load_partitions error cases") {
    const TempFile single("single.csv", "a,0\nb,1\n");
    CHECK(load_partitions(single.str()).partitions.size() == 1);

    const TempFile empty_col("empty.csv", "a,0,?\nb,1,?\n");
    try {
        load_partitions(empty_col.str());
        FAIL("expected EmptyColumn");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::empty_column);
    }

    const TempFile ragged("ragged.csv", "a,0,1\nb,0\n");
    try {
        load_partitions(ragged.str());
        FAIL("expected RaggedRows");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::ragged_rows);
    }

    const TempFile dup("dup.csv", "a,0\na,1\n");
    CHECK_THROWS_AS(load_partitions(dup.str()), Error);
}

TEST_CASE("load_supervision parses seeds and constraints") {
    const Dataset d({0.0, 1.0, 2.0}, 3, 1, {"a", "b", "c"});

    CHECK(load_supervision(std::nullopt, std::nullopt, d).empty());

    const TempFile seeds("seeds.csv", "a,0\nb,2\n");
    const SupervisionBundle s = load_supervision(seeds.str(), std::nullopt, d);
    CHECK(s.seeds.at("a") == 0);
    CHECK(s.seeds.at("b") == 2);

    const TempFile constraints("cons.csv", "a,b,ML\nb,c,CL\n");
    const SupervisionBundle c = load_supervision(std::nullopt, constraints.str(), d);
    CHECK(c.must_link.count(SupervisionBundle::ordered("a", "b")) == 1);
    CHECK(c.cannot_link.count(SupervisionBundle::ordered("b", "c")) == 1);

    const TempFile conflict("conflict.csv", "a,b,ML\nb,c,ML\na,c,CL\n");
    try {
        load_supervision(std::nullopt, conflict.str(), d);
        FAIL("expected ConflictingConstraints");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::conflicting_constraints);
    }

    const TempFile badtag("badtag.csv", "a,b,XX\n");
    CHECK_THROWS_AS(load_supervision(std::nullopt, badtag.str(), d), Error);

    const TempFile ghost("ghost.csv", "zz,1\n");
    try {
        load_supervision(ghost.str(), std::nullopt, d);
        FAIL("expected UnknownObject");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::unknown_object);
    }
}

TEST_CASE("load_weights defaults and errors") {
    const TempFile f("weights.csv", "1,2,3\n");
    const auto w = load_weights(f.str(), 3);
    CHECK(w[0].alpha == 1.0);
    CHECK(w[0].beta == 1.0);
    CHECK(w[1].alpha == 2.0);
    CHECK(w[1].beta == 3.0);
    CHECK(w[2].alpha == 1.0);

    const TempFile oob("oob.csv", "5,1,1\n");
    try {
        load_weights(oob.str(), 3);
        FAIL("expected IndexOutOfRange");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::index_out_of_range);
    }

    const TempFile dup("dupw.csv", "0,1,1\n0,2,2\n");
    CHECK_THROWS_AS(load_weights(dup.str(), 2), Error);
}

TEST_CASE("make_gaussians is deterministic") {
    const GaussianMix exact = make_gaussians(3, {{1.0, 2.0}, {5.0, 6.0}}, 0.0, 9);
    CHECK(exact.data.size() == 6);
    CHECK(exact.data.at(0, 0) == 1.0);
    CHECK(exact.data.at(5, 1) == 6.0);
    CHECK(exact.truth.k() == 2);

    const GaussianMix a = make_gaussians(20, {{0, 0}, {10, 0}, {0, 10}}, 0.5, 11);
    const GaussianMix b = make_gaussians(20, {{0, 0}, {10, 0}, {0, 10}}, 0.5, 11);
    CHECK(a.data.size() == 60);
    CHECK(a.truth.k() == 3);
    for (std::size_t i = 0; i < a.data.size(); ++i)
        for (std::size_t j = 0; j < a.data.dim(); ++j)
            CHECK(a.data.at(i, j) == b.data.at(i, j));
}

TEST_CASE("partition round trip preserves labels and missing cells") {
    Rng rng(321);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n = 2 + rng.below(20);
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back("r" + std::to_string(i));
        std::vector<Partition> parts;
        const std::size_t m = 1 + rng.below(4);
        for (std::size_t j = 0; j < m; ++j) {
            const Label k = static_cast<Label>(1 + rng.below(8));
            std::vector<Label> labels(n, kMissing);
            labels[0] = 0;
            for (std::size_t i = 1; i < n; ++i)
                labels[i] = rng.uniform01() < 0.2
                                ? kMissing
                                : static_cast<Label>(rng.below(static_cast<std::uint64_t>(k)));
            parts.emplace_back(std::move(labels), k);
        }

        const TempFile f("roundtrip_" + std::to_string(trial) + ".csv");
        save_partitions(f.str(), ids, parts);
        const LoadedPartitions loaded = load_partitions(f.str());

        CHECK(loaded.object_ids == ids);
        REQUIRE(loaded.partitions.size() == m);
        for (std::size_t j = 0; j < m; ++j) {
            // Tokens are single digits here, so sorted order is numeric order
            // and the dense labels come back canonically compacted.
            for (std::size_t i = 0; i < n; ++i) {
                const Label orig = parts[j].label(i);
                const Label back = loaded.partitions[j].label(i);
                CHECK((orig == kMissing) == (back == kMissing));
                if (orig != kMissing)
                    CHECK(loaded.tokens[j][static_cast<std::size_t>(back)] ==
                          std::to_string(orig));
            }
        }
    }
}

TEST_CASE("token round trip through save with token tables") {
    const TempFile f("worked_example.csv", kWorkedExample);
    const LoadedPartitions first = load_partitions(f.str());

    const TempFile copy("worked_example_copy.csv");
    save_partitions(copy.str(), first.object_ids, first.partitions, &first.tokens);
    const LoadedPartitions second = load_partitions(copy.str());

    CHECK(second.tokens == first.tokens);
    for (std::size_t j = 0; j < first.partitions.size(); ++j)
        CHECK(second.partitions[j].labels() == first.partitions[j].labels());

    std::ifstream in(copy.str());
    std::string line;
    std::getline(in, line);
    CHECK(line == "x1,1,A,alpha,Z");
}

TEST_CASE("atomic_write leaves no temp file behind") {
    const TempFile f("atomic.txt");
    atomic_write(f.str(), "hello\n");
    std::ifstream in(f.str());
    std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(content == "hello\n");
    CHECK_FALSE(std::filesystem::exists(f.str() + ".tmp"));
}

TEST_CASE("label_token rendering") {
    const std::vector<std::string> ref = {"1", "2", "3"};
    CHECK(label_token(kUnresolved, ref) == "?");
    CHECK(label_token(0, ref) == "1");
    CHECK(label_token(3, ref) == "+0");
    CHECK(label_token(4, ref) == "+1");
}

TEST_CASE("report scores match the persisted partitions") {
    Rng rng(9090);
    const std::size_t n = 30;
    std::vector<std::string> ids;
    for (std::size_t i = 0; i < n; ++i) ids.push_back("p" + std::to_string(i));
    std::vector<Partition> parts;
    for (std::size_t j = 0; j < 3; ++j) {
        const Label k = static_cast<Label>(2 + rng.below(4));
        std::vector<Label> labels(n, kMissing);
        labels[0] = 0;
        for (std::size_t i = 1; i < n; ++i)
            labels[i] = rng.uniform01() < 0.15
                            ? kMissing
                            : static_cast<Label>(rng.below(static_cast<std::uint64_t>(k)));
        parts.emplace_back(std::move(labels), k);
    }
    const Ensemble e(parts, std::vector<PartitionWeights>(3), 0);
    const RunAudit audit = consensus_run(e, TiePolicy::kUnresolved, false);

    const TempFile saved("report_parts.csv");
    save_partitions(saved.str(), ids, e.partitions());
    const LoadedPartitions reloaded = load_partitions(saved.str());

    std::vector<std::vector<std::string>> tokens;
    for (const auto& p : e.partitions()) {
        std::vector<std::string> table;
        for (Label l = 0; l < p.k(); ++l) table.push_back(std::to_string(l));
        tokens.push_back(std::move(table));
    }
    const MetricReport metrics = evaluate(e.partition(1), e.partition(0));
    const std::string report =
        render_report(audit, ids, tokens, TiePolicy::kUnresolved, false, &metrics);

    const auto doc = nlohmann::json::parse(report);
    REQUIRE(doc["partitions"].size() == 3);
    for (std::size_t j = 0; j < 3; ++j) {
        const auto recomputed = optimal_alignment(
            contingency_table(reloaded.partitions[j], reloaded.partitions[0]));
        CHECK(doc["partitions"][j]["alignment"]["score"].get<double>() == recomputed.score);
    }
    CHECK(doc["metrics"]["ari"].get<double>() >= -1.0);
    CHECK(doc["metrics"]["ari"].get<double>() <= 1.0);
    CHECK(doc["metrics"]["nmi"].get<double>() >= 0.0);
    CHECK(doc["metrics"]["purity"].get<double>() <= 1.0);
    CHECK(doc["metrics"]["agreement"].get<double>() >= 0.0);
    CHECK(doc["metrics"].contains("constraint_violations"));
}

TEST_CASE("run config parsing") {
    const TempFile cfg("run.json", R"({
        "dataset": "data.csv",
        "entries": [
            {"algorithm": "kmeans", "k": 3, "seed": 7},
            {"algorithm": "cop", "k": 2, "alpha": 2.0, "beta": 0.5,
             "empty_cluster_policy": "drop"}
        ],
        "reference": {"policy": "user-index", "index": 1},
        "tie_policy": "lowest",
        "normalize": true,
        "out": {"labels": "fc.csv"}
    })");
    const RunConfig rc = load_run_config(cfg.str());
    CHECK(rc.dataset == "data.csv");
    CHECK(rc.spec.entries.size() == 2);
    CHECK(rc.spec.entries[0].config.rng_seed == 7);
    CHECK(rc.spec.entries[1].alpha == 2.0);
    CHECK(rc.spec.entries[1].config.empty_cluster_policy == EmptyClusterPolicy::kDrop);
    CHECK(rc.spec.reference.index == 1);
    CHECK(rc.tie_policy == TiePolicy::kLowest);
    CHECK(rc.normalize);
    CHECK(rc.out_labels == "fc.csv");
    CHECK(rc.out_report == "report.json");

    const TempFile bad("bad.json", R"({"dataset": "d.csv", "entries": [], "reference": 3})");
    CHECK_THROWS_AS(load_run_config(bad.str()), Error);
}
