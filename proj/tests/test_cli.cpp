#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <regex>
#include <sstream>
#include <string>
#include <sys/wait.h>

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
};

std::string cli_path() {
    if (const char* p = std::getenv("HINFORGE_CLI_PATH")) return p;
#ifdef HINFORGE_CLI_PATH
    return HINFORGE_CLI_PATH;
#else
    FAIL("HINFORGE_CLI_PATH must point at the CLI binary");
    return "";
#endif
}

RunResult run(const std::string& args) {
    std::string cmd = cli_path() + " " + args + " 2>&1";
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    RunResult r;
    char buf[4096];
    while (size_t got = fread(buf, 1, sizeof buf, pipe)) r.out.append(buf, got);
    int status = pclose(pipe);
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

// Dataset + output dirs for one scenario, plus the shared tiny train flags.
struct Scenario {
    fs::path root;
    fs::path data;
    explicit Scenario(const std::string& tag) : root(testutil::fresh_dir(tag)) {
        data = root / "data";
        RunResult r = run("synth --out " + data.string() +
                          " --k 2 --types 2 --per-type 6 --p-in 0.6 --p-out 0.05 --f 6 --seed 3");
        REQUIRE_MESSAGE(r.code == 0, r.out);
    }
    std::string train_flags(const std::string& outdir) const {
        return "train --data " + data.string() + " --out " + outdir +
               " --metapath A-B-A --dim 4 --k 2 --per-node 2 --epochs1 5 --epochs2 5 "
               "--epochs3 10 --lr 0.01 --seed 9";
    }
};

std::string strip_wall_clock(const std::string& text) {
    std::istringstream in(text);
    std::string out, line;
    while (std::getline(in, line))
        if (line.find("wall_clock_seconds") == std::string::npos) out += line + "\n";
    return out;
}

}  // namespace

TEST_CASE("argument errors exit 2, help exits 0") {
    CHECK(run("").code == 2);               // a subcommand is required
    CHECK(run("--help").code == 0);
    CHECK(run("train --help").code == 0);
    CHECK(run("frobnicate").code == 2);     // unknown subcommand
    CHECK(run("synth").code == 2);          // missing required --out
    RunResult r = run("train --data x --out y --bogus-flag");
    CHECK(r.code == 2);
}

TEST_CASE("synth writes a loadable dataset") {
    Scenario sc("cli-synth");
    CHECK(fs::exists(sc.data / "nodes.tsv"));
    CHECK(fs::exists(sc.data / "edges.tsv"));
    CHECK(fs::exists(sc.data / "features.csv"));
    CHECK(fs::exists(sc.data / "labels.tsv"));
    std::string nodes = testutil::slurp(sc.data / "nodes.tsv");
    CHECK(nodes.substr(0, 5) == "A0\tA\n");
    int lines = 0;
    for (char c : nodes) lines += c == '\n';
    CHECK(lines == 24);
}

TEST_CASE("sample-paths emits schema-tagged walks") {
    Scenario sc("cli-paths");
    fs::path out = sc.root / "walks.tsv";
    RunResult r = run("sample-paths --data " + sc.data.string() +
                      " --metapath A-B-A --out " + out.string() + " --per-node 3 --seed 5");
    REQUIRE_MESSAGE(r.code == 0, r.out);
    CHECK(r.out.find("walks") != std::string::npos);
    std::istringstream in(testutil::slurp(out));
    std::string line;
    int count = 0;
    std::regex shape("^A-B-A\t[0-9]+-[0-9]+-[0-9]+$");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        CHECK(std::regex_match(line, shape));
        count++;
    }
    CHECK(count > 0);
    CHECK(count <= 12 * 3);
}

TEST_CASE("train produces the five outputs and a sane report") {
    Scenario sc("cli-train");
    fs::path out = sc.root / "run1";
    RunResult r = run(sc.train_flags(out.string()));
    REQUIRE_MESSAGE(r.code == 0, r.out);
    CHECK(r.out.find("nmi_joint=") != std::string::npos);
    for (const char* f :
         {"report.json", "embeddings.csv", "clusters.csv", "losses.csv", "model.ckpt"})
        CHECK_MESSAGE(fs::exists(out / f), f);

    json rep = json::parse(testutil::slurp(out / "report.json"));
    CHECK(rep["dataset"]["nodes"] == 24);
    CHECK(rep["config"]["dim"] == 4);
    CHECK(rep["config"]["seed"] == 9);
    CHECK(rep["metrics"]["has_labels"] == true);
    CHECK(rep["metrics"]["nmi_joint"].is_number());
    CHECK(rep["stage_done"] == 3);

    // Embeddings: header plus one row per node.
    std::istringstream emb(testutil::slurp(out / "embeddings.csv"));
    std::string line;
    std::getline(emb, line);
    CHECK(line == "node,z0,z1,z2,z3");
    int rows = 0;
    while (std::getline(emb, line)) rows += !line.empty();
    CHECK(rows == 24);
}

TEST_CASE("identical invocations produce byte-identical reports") {
    Scenario sc("cli-det");
    fs::path o1 = sc.root / "r1", o2 = sc.root / "r2";
    REQUIRE(run(sc.train_flags(o1.string())).code == 0);
    REQUIRE(run(sc.train_flags(o2.string())).code == 0);
    std::string a = strip_wall_clock(testutil::slurp(o1 / "report.json"));
    std::string b = strip_wall_clock(testutil::slurp(o2 / "report.json"));
    CHECK(a == b);
    CHECK(testutil::slurp(o1 / "embeddings.csv") == testutil::slurp(o2 / "embeddings.csv"));
    CHECK(testutil::slurp(o1 / "losses.csv") == testutil::slurp(o2 / "losses.csv"));
    CHECK(testutil::slurp(o1 / "model.ckpt") == testutil::slurp(o2 / "model.ckpt"));
}

TEST_CASE("the ablation arm is flagged in the report") {
    Scenario sc("cli-noc");
    fs::path out = sc.root / "noc";
    RunResult r = run(sc.train_flags(out.string()) + " --no-contrastive");
    REQUIRE_MESSAGE(r.code == 0, r.out);
    json rep = json::parse(testutil::slurp(out / "report.json"));
    CHECK(rep["config"]["use_contrastive"] == false);
    bool noted = false;
    for (const auto& n : rep["notes"])
        noted |= n.get<std::string>().find("contrastive loss disabled") != std::string::npos;
    CHECK(noted);
    // Every per-path loss column is exactly zero in the ablation arm.
    for (auto& [name, val] : rep["final_losses"]["per_path"].items())
        CHECK(val.get<double>() == 0.0);
}

TEST_CASE("eval reproduces the metrics stored in the report") {
    Scenario sc("cli-eval");
    fs::path out = sc.root / "run";
    REQUIRE(run(sc.train_flags(out.string())).code == 0);
    json rep = json::parse(testutil::slurp(out / "report.json"));
    RunResult r = run("eval --data " + sc.data.string() + " --model " +
                      (out / "model.ckpt").string());
    REQUIRE_MESSAGE(r.code == 0, r.out);
    json ev = json::parse(r.out);
    CHECK(ev["nmi_joint"] == rep["metrics"]["nmi_joint"]);
    CHECK(ev["nmi_kmeans"] == rep["metrics"]["nmi_kmeans"]);
    CHECK(ev["f1_micro"] == rep["metrics"]["f1_micro"]);
    CHECK(ev["f1_macro"] == rep["metrics"]["f1_macro"]);

    fs::path mfile = sc.root / "metrics.json";
    RunResult r2 = run("eval --data " + sc.data.string() + " --model " +
                       (out / "model.ckpt").string() + " --out " + mfile.string());
    REQUIRE(r2.code == 0);
    CHECK(json::parse(testutil::slurp(mfile)) == ev);
}

TEST_CASE("export writes node and cluster embeddings") {
    Scenario sc("cli-export");
    fs::path out = sc.root / "run";
    REQUIRE(run(sc.train_flags(out.string())).code == 0);
    fs::path exp = sc.root / "exported";
    RunResult r = run("export --data " + sc.data.string() + " --model " +
                      (out / "model.ckpt").string() + " --out " + exp.string());
    REQUIRE_MESSAGE(r.code == 0, r.out);
    std::string emb = testutil::slurp(exp / "embeddings.csv");
    CHECK(emb == testutil::slurp(out / "embeddings.csv"));
    std::istringstream g(testutil::slurp(exp / "cluster_embeddings.csv"));
    std::string line;
    std::getline(g, line);
    CHECK(line == "cluster,g0,g1,g2,g3");
    int rows = 0;
    while (std::getline(g, line)) rows += !line.empty();
    CHECK(rows == 2);
}

TEST_CASE("runtime failures exit 1 with a prefixed message") {
    RunResult r = run("train --data /nonexistent-dataset-dir --out /tmp/hinforge-cli-x");
    CHECK(r.code == 1);
    CHECK(r.out.find("hinforge:") != std::string::npos);

    Scenario sc("cli-badcfg");
    testutil::write_file(sc.root / "bad.json", R"({"dim": -3})");
    RunResult r2 = run("train --data " + sc.data.string() + " --out " +
                       (sc.root / "o").string() + " --config " + (sc.root / "bad.json").string());
    CHECK(r2.code == 1);
}

TEST_CASE("resume rejects conflicting flags and reproduces a finished run") {
    Scenario sc("cli-resume");
    fs::path out = sc.root / "run";
    REQUIRE(run(sc.train_flags(out.string())).code == 0);

    RunResult bad = run("train --data " + sc.data.string() + " --out " +
                        (sc.root / "o2").string() + " --resume " +
                        (out / "model.ckpt").string() + " --seed 4");
    CHECK(bad.code == 2);

    fs::path out2 = sc.root / "resumed";
    RunResult r = run("train --data " + sc.data.string() + " --out " + out2.string() +
                      " --resume " + (out / "model.ckpt").string());
    REQUIRE_MESSAGE(r.code == 0, r.out);
    json a = json::parse(testutil::slurp(out / "report.json"));
    json b = json::parse(testutil::slurp(out2 / "report.json"));
    CHECK(a["metrics"] == b["metrics"]);
    CHECK(b["stage_done"] == 3);
    CHECK(testutil::slurp(out / "model.ckpt") == testutil::slurp(out2 / "model.ckpt"));
}
