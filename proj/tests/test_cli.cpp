#include "doctest.h"

#include "json.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    std::string path;
    TempDir() {
        std::string tmpl = (fs::temp_directory_path() / "jpa_cli_XXXXXX").string();
        REQUIRE(mkdtemp(tmpl.data()) != nullptr);
        path = tmpl;
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (fs::path(path) / name).string(); }
};

RunResult run(const std::string& args) {
    static int counter = 0;
    const std::string tag = (fs::temp_directory_path() /
                             ("jpa_cli_run_" + std::to_string(++counter))).string();
    const std::string cmd =
        std::string(JPA_CLI_PATH) + " " + args + " >" + tag + ".out 2>" + tag + ".err";
    const int rc = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    r.out = slurp(tag + ".out");
    r.err = slurp(tag + ".err");
    fs::remove(tag + ".out");
    fs::remove(tag + ".err");
    return r;
}

int count_lines(const std::string& s) {
    int n = 0;
    for (char c : s) n += c == '\n' ? 1 : 0;
    return n;
}

// One shared pipeline run: a few clean scenes and a model trained on them.
struct Workspace {
    TempDir dir;
    std::string scenes;
    std::string model;
    Workspace() {
        scenes = dir.file("scenes");
        model = dir.file("model.json");
        REQUIRE(run("synth --out " + scenes + " --count 3 --preset clean --seed 5").code == 0);
        REQUIRE(run("train --scenes " + scenes + " --out " + model).code == 0);
    }
};

const Workspace& workspace() {
    static const Workspace w;
    return w;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with code 2") {
    CHECK(run("").code == 2);
    CHECK(run("conjure").code == 2);
    CHECK(run("--help").code == 0);
    CHECK(run("solve --scenes x").code == 2);  // missing required --out
}

TEST_CASE("config errors exit with code 2 and can be machine-readable") {
    TempDir dir;
    CHECK(run("synth --out " + dir.file("s") + " --preset bogus").code == 2);

    const RunResult r = run("--json synth --out " + dir.file("s") + " --preset bogus");
    CHECK(r.code == 2);
    const auto err = nlohmann::json::parse(r.err);
    CHECK(err.at("error").at("type") == "config");
    CHECK_FALSE(err.at("error").at("message").get<std::string>().empty());
}

TEST_CASE("scene generation is deterministic and writes a manifest") {
    TempDir dir;
    const std::string a = dir.file("a");
    const std::string b = dir.file("b");
    const RunResult ra = run("synth --out " + a + " --count 3 --preset clean --seed 9");
    CHECK(ra.code == 0);
    CHECK(ra.out.find("config_hash") != std::string::npos);
    CHECK(run("synth --out " + b + " --count 3 --preset clean --seed 9").code == 0);

    for (const char* name : {"scene_00000.json", "scene_00001.json", "scene_00002.json",
                             "manifest.json"}) {
        CAPTURE(name);
        REQUIRE(fs::exists(fs::path(a) / name));
        CHECK(slurp((fs::path(a) / name).string()) == slurp((fs::path(b) / name).string()));
    }
    CHECK_FALSE(fs::exists(fs::path(a) / "scene_00003.json"));
}

TEST_CASE("training reports every type pair and rejects a missing directory") {
    const Workspace& w = workspace();
    CHECK(run("train --scenes " + w.dir.file("nowhere") + " --out " + w.dir.file("x.json"))
              .code == 2);

    const RunResult r = run("train --scenes " + w.scenes + " --out " + w.dir.file("m2.json"));
    CHECK(r.code == 0);
    CHECK(count_lines(r.out) == 106);  // header plus one row per type pair
    CHECK(r.out.find("holdout_acc") != std::string::npos);
    CHECK(r.out.find("l_ankle/l_ankle") != std::string::npos);

    const auto model = nlohmann::json::parse(slurp(w.model));
    CHECK(model.at("format") == "jpa-model/1");
    CHECK(model.at("pairs").size() == 105);
}

TEST_CASE("solving needs a model except in argmax mode") {
    const Workspace& w = workspace();
    CHECK(run("solve --scenes " + w.scenes + " --out " + w.dir.file("p.json") + " --mode ljpa")
              .code == 2);
    CHECK(run("solve --scenes " + w.scenes + " --out " + w.dir.file("p.json") +
              " --mode argmax").code == 0);
    CHECK(run("solve --scenes " + w.scenes + " --out " + w.dir.file("p.json") +
              " --mode warp --model " + w.model).code == 2);
}

TEST_CASE("solving writes timing-free predictions plus a stats sidecar") {
    const Workspace& w = workspace();
    const std::string pred = w.dir.file("pred.json");
    const RunResult r = run("solve --scenes " + w.scenes + " --model " + w.model + " --out " +
                            pred + " --workers 2");
    CHECK(r.code == 0);
    CHECK(r.out.find("median") != std::string::npos);

    const auto p = nlohmann::json::parse(slurp(pred));
    CHECK(p.at("format") == "jpa-pred/1");
    CHECK(p.at("mode") == "ljpa");
    CHECK(p.at("tau") == 0.2);
    CHECK(p.at("n_candidates") == 5);
    CHECK(p.at("scenes").size() == 3);
    CHECK(slurp(pred).find("median") == std::string::npos);

    const auto stats = nlohmann::json::parse(slurp(pred + ".stats.json"));
    CHECK(stats.at("format") == "jpa-stats/1");
    CHECK(stats.at("median_solve_ms").get<double>() >= 0.0);
    CHECK(stats.at("per_person_ms").size() == 3);  // one person per clean scene
}

TEST_CASE("association solving on clean scenes reproduces the argmax poses") {
    const Workspace& w = workspace();
    const std::string pl = w.dir.file("pl.json");
    const std::string pa = w.dir.file("pa.json");
    REQUIRE(run("solve --scenes " + w.scenes + " --model " + w.model + " --out " + pl).code == 0);
    REQUIRE(run("solve --scenes " + w.scenes + " --out " + pa + " --mode argmax").code == 0);
    const auto jl = nlohmann::json::parse(slurp(pl));
    const auto ja = nlohmann::json::parse(slurp(pa));
    CHECK(jl.at("scenes") == ja.at("scenes"));
}

TEST_CASE("evaluation prints the pinned table and writes CSV on request") {
    const Workspace& w = workspace();
    const std::string pred = w.dir.file("pe.json");
    REQUIRE(run("solve --scenes " + w.scenes + " --model " + w.model + " --out " + pred)
                .code == 0);
    const std::string csv = w.dir.file("report.csv");
    const RunResult r = run("eval --scenes " + w.scenes + " --pred " + pred + " --out " + csv);
    CHECK(r.code == 0);
    CHECK(r.out.find("setting,head,shoulder,elbow,wrist,hip,knee,ankle,total,median_solve_ms") !=
          std::string::npos);
    CHECK(r.out.find("total") != std::string::npos);
    // Clean scenes solve perfectly.
    CHECK(r.out.find("ljpa,1.000000") != std::string::npos);

    const std::string file_csv = slurp(csv);
    CHECK(count_lines(file_csv) == 2);
    CHECK(file_csv.find("ljpa,") != std::string::npos);

    // A custom row label flows into the table.
    const RunResult named = run("eval --scenes " + w.scenes + " --pred " + pred +
                                " --setting tuned");
    CHECK(named.out.find("tuned,") != std::string::npos);
}

TEST_CASE("malformed inputs exit with code 3") {
    const Workspace& w = workspace();
    std::ofstream(w.dir.file("garbage.json")) << "{}";
    const RunResult r = run("--json eval --scenes " + w.scenes + " --pred " +
                            w.dir.file("garbage.json"));
    CHECK(r.code == 3);
    CHECK(nlohmann::json::parse(r.err).at("error").at("type") == "data");

    // Tampered model version.
    auto model = nlohmann::json::parse(slurp(w.model));
    model["format"] = "jpa-model/2";
    std::ofstream(w.dir.file("stale.json")) << model.dump();
    CHECK(run("solve --scenes " + w.scenes + " --model " + w.dir.file("stale.json") +
              " --out " + w.dir.file("px.json")).code == 3);
}

TEST_CASE("sweeps emit one row per grid value") {
    const Workspace& w = workspace();
    const RunResult tau = run("sweep --scenes " + w.scenes + " --model " + w.model +
                              " --param tau --grid 0,0.2,0.4");
    CHECK(tau.code == 0);
    CHECK(tau.out.rfind("param,mAP,median_ms\n", 0) == 0);
    CHECK(count_lines(tau.out) == 4);

    const RunResult n = run("sweep --scenes " + w.scenes + " --model " + w.model +
                            " --param n --grid 1,3,5");
    CHECK(n.code == 0);
    CHECK(count_lines(n.out) == 4);
    CHECK(n.out.find("\n1,") != std::string::npos);
    CHECK(n.out.find("\n5,") != std::string::npos);

    CHECK(run("sweep --scenes " + w.scenes + " --model " + w.model + " --param sigma")
              .code == 2);
    CHECK(run("sweep --scenes " + w.scenes + " --model " + w.model +
              " --param n --grid 1.5").code == 2);
}

TEST_CASE("the solver benchmark emits two rows per size") {
    const Workspace& w = workspace();
    const std::string csv = w.dir.file("bench.csv");
    const RunResult r = run("bench --model " + w.model + " --sizes 4,6 --trials 1 --out " + csv);
    CHECK(r.code == 0);
    CHECK(r.out.rfind("size,solver,median_ms,trials\n", 0) == 0);
    CHECK(count_lines(r.out) == 5);
    CHECK(r.out.find("4,local,") != std::string::npos);
    CHECK(r.out.find("4,global,") != std::string::npos);
    CHECK(r.out.find("6,global,") != std::string::npos);
    CHECK(slurp(csv) == r.out);

    CHECK(run("bench --model " + w.model + " --sizes 0").code == 2);
}

}  // TEST_SUITE
