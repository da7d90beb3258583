#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

const std::string kCli = SCEV_CLI_PATH;

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("scev_cli_" + std::to_string(::getpid()));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

int run(const std::string& args) {
    const std::string cmd = "\"" + kCli + "\" " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const std::string& path, const std::string& content) {
    std::ofstream out(path);
    out << content;
}

const std::string kWorkedExample =
    "x1,1,A,alpha,Z\n"
    "x2,1,A,beta,Y\n"
    "x3,3,B,beta,?\n"
    "x4,2,C,alpha,Y\n"
    "x5,2,B,gamma,Z\n"
    "x6,3,C,?,Z\n"
    "x7,3,B,gamma,?\n";

}  // namespace

TEST_CASE("consensus subcommand reproduces the worked example labels") {
    TempDir dir;
    write(dir.file("parts.csv"), kWorkedExample);
    const int rc = run("consensus --partitions " + dir.file("parts.csv") +
                       " --reference 0 --tie-policy unresolved --out " + dir.file("fc.csv") +
                       " --report " + dir.file("report.json"));
    REQUIRE(rc == 0);
    CHECK(slurp(dir.file("fc.csv")) == "x1,1\nx2,1\nx3,3\nx4,?\nx5,2\nx6,2\nx7,3\n");

    const auto report = nlohmann::json::parse(slurp(dir.file("report.json")));
    CHECK(report["consensus"]["ties"][3].get<bool>());
    CHECK(report["partitions"][1]["alignment"]["score"].get<double>() == 5.0);
}

TEST_CASE("eval of a file against itself reports perfect agreement") {
    TempDir dir;
    write(dir.file("p.csv"), "a,0\nb,0\nc,1\nd,1\n");
    const int rc =
        run("eval " + dir.file("p.csv") + " " + dir.file("p.csv") + " --out " + dir.file("m.json"));
    REQUIRE(rc == 0);
    const auto metrics = nlohmann::json::parse(slurp(dir.file("m.json")));
    CHECK(metrics["ari"].get<double>() == 1.0);
    CHECK(metrics["nmi"].get<double>() == 1.0);
    CHECK(metrics["purity"].get<double>() == 1.0);
    CHECK(metrics["agreement"].get<double>() == 1.0);
    CHECK(metrics["constraint_violations"].get<long long>() == 0);
}

TEST_CASE("synth then cluster round trips through files") {
    TempDir dir;
    REQUIRE(run("synth --n-per-cluster 10 --centers \"0,0;8,0\" --sigma 0.3 --seed 2 --out " +
                dir.file("d.csv") + " --truth-out " + dir.file("t.csv")) == 0);
    REQUIRE(run("cluster --data " + dir.file("d.csv") + " --algorithm kmeans --k 2 --seed 1" +
                " --out " + dir.file("p.csv")) == 0);
    REQUIRE(run("eval " + dir.file("p.csv") + " " + dir.file("t.csv") + " --out " +
                dir.file("m.json")) == 0);
    const auto metrics = nlohmann::json::parse(slurp(dir.file("m.json")));
    CHECK(metrics["ari"].get<double>() == 1.0);
}

TEST_CASE("failures exit nonzero") {
    TempDir dir;
    CHECK(run("consensus --partitions " + dir.file("absent.csv") + " --out " +
              dir.file("fc.csv")) != 0);
    CHECK(run("cluster --data nowhere.csv --k 2 --out x.csv") != 0);
    CHECK(run("nonsense") != 0);

    // Reference index outside the ensemble is refused.
    write(dir.file("p.csv"), "a,0\nb,1\n");
    CHECK(run("consensus --partitions " + dir.file("p.csv") + " --reference 5 --out " +
              dir.file("fc.csv")) != 0);
}
