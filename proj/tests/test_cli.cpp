#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("netdyn_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = scratch() / name;
    std::ofstream(p, std::ios::binary) << text;
    return p;
}

Result run(const std::string& args) {
    const fs::path out = scratch() / "stdout", err = scratch() / "stderr";
    const std::string cmd = "'" NETDYN_CLI "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string data(const std::string& name) { return "'" NETDYN_DATA "/" + name + "'"; }

} // namespace

TEST_CASE("pagerank on a 3-cycle") {
    const auto r = run("centrality " + data("cycle3.tsv") + " --measure pagerank --alpha 0.85");
    REQUIRE(r.code == 0);
    CHECK(r.out == "node,score,rank\n0,0.333333333333,1\n1,0.333333333333,2\n2,0.333333333333,3\n");
}

TEST_CASE("alpha sweep output carries the alpha column") {
    const auto r = run("centrality " + data("chain3.tsv") + " --measure alpha --alpha-sweep 0:0.5:0.5");
    REQUIRE(r.code == 0);
    CHECK(r.out == "alpha,node,score,rank\n0,0,0,3\n0,1,1,1\n0,2,1,2\n0.5,0,0,3\n0.5,1,1,2\n0.5,2,1.5,1\n");
}

TEST_CASE("spectral report on an acyclic graph") {
    const auto r = run("spectral " + data("chain3.tsv"));
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["lambda1"] == 0.0);
    CHECK(j["threshold"].is_null());
    CHECK(j["threshold_error"] == "no finite threshold (nilpotent adjacency)");

    const auto cyc = nlohmann::json::parse(run("spectral " + data("cycle3.tsv")).out);
    CHECK(cyc["lambda1"].get<double>() == doctest::Approx(1.0));
    CHECK(cyc["threshold"].get<double>() == doctest::Approx(1.0));
}

TEST_CASE("string labels get a mapping sidecar") {
    const auto edges = write("labels.tsv", "# comment\nalice\tbob\nbob\tcarol\ncarol\talice\n");
    const auto r = run("centrality '" + edges.string() + "' --measure indegree");
    REQUIRE(r.code == 0);
    CHECK(r.out == "node,score,rank\nalice,1,1\nbob,1,2\ncarol,1,3\n");
    CHECK(slurp(edges.string() + ".map.tsv") == "alice\t0\nbob\t1\ncarol\t2\n");

    const auto custom = scratch() / "custom.map";
    REQUIRE(run("centrality '" + edges.string() + "' --mapping-out '" + custom.string() + "'").code == 0);
    CHECK(fs::exists(custom));
}

TEST_CASE("simulate reports norms and vectors") {
    auto r = run("simulate " + data("cycle3.tsv") + " --process nonconservative --alpha 0.5 --steps 2 --report norms");
    REQUIRE(r.code == 0);
    // accumulated weight 1 + 0.5 + 0.25
    CHECK(r.out == "step,l1_norm\n0,1\n1,1.5\n2,1.75\n");

    r = run("simulate " + data("cycle3.tsv") + " --process conservative --steps inf --format json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["states"].size() == 1);
    CHECK(j["states"][0]["step"] == "inf");
}

TEST_CASE("threshold sweep is a table per grid point") {
    const auto r = run("threshold " + data("cycle3.tsv") + " --grid 0:1:0.5 --trials 200");
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("transmissibility,mean_fraction,stderr\n0,", 0) == 0);
    CHECK(r.out.find("\n1,1,0\n") != std::string::npos);
}

TEST_CASE("exit codes and error lines") {
    auto r = run("centrality " + data("cycle3.tsv") + " --measure alpha --alpha 2");
    CHECK(r.code == 4);
    const auto err = nlohmann::json::parse(r.err.substr(0, r.err.find('\n')));
    CHECK(err["error"] == "numerical");

    const auto bad = write("bad.tsv", "0\t1\n1\n");
    r = run("spectral '" + bad.string() + "'");
    CHECK(r.code == 3);
    CHECK(r.err.find("bad.tsv:2") != std::string::npos);

    CHECK(run("spectral " + data("cycle3.tsv") + " --bogus").code == 2);
    CHECK(run("spectral /nonexistent/graph.tsv").code == 2);
    CHECK(run("centrality " + data("cycle3.tsv") + " --measure betweenness").code == 2);
    CHECK(run("simulate " + data("cycle3.tsv") + " --process sis --steps inf").code == 2);
}

TEST_CASE("influence and correlate on the bundled fixture") {
    const std::string common = data("follower_graph.tsv") + " --events " + data("events.csv");
    auto r = run("influence " + common);
    REQUIRE(r.code == 0);
    CHECK(r.out.rfind("user,n_items,followers,local,global,significance_p\n", 0) == 0);

    r = run("correlate " + common + " --measures nalpha,pagerank --alpha-sweep 0:0.95:0.05 --influence local");
    REQUIRE(r.code == 0);
    CHECK(r.out == slurp(NETDYN_DATA "/correlate_local_golden.csv"));
}
