#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "jpa/eval.hpp"
#include "jpa/io.hpp"
#include "jpa/pipeline.hpp"
#include "jpa/synth.hpp"

namespace fs = std::filesystem;
using namespace jpa;

namespace {

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t h) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

/// Config files are user input; a malformed one is a usage problem, not a
/// data problem.
Json read_config_file(const std::string& path) {
    try {
        return load_json_file(path);
    } catch (const DataError& e) {
        throw ConfigError(e.what());
    }
}

std::vector<double> parse_grid(const std::string& spec) {
    std::vector<double> grid;
    std::size_t pos = 0;
    while (pos <= spec.size()) {
        const std::size_t comma = spec.find(',', pos);
        const std::string item =
            spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (!item.empty()) {
            try {
                std::size_t used = 0;
                grid.push_back(std::stod(item, &used));
                if (used != item.size()) throw std::invalid_argument(item);
            } catch (const std::exception&) {
                throw ConfigError("bad grid value \"" + item + "\"");
            }
        }
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return grid;
}

void apply_synth_overrides(SynthConfig& cfg, const Json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "width") cfg.width = value.get<int>();
        else if (key == "height") cfg.height = value.get<int>();
        else if (key == "persons_min") cfg.persons_min = value.get<int>();
        else if (key == "persons_max") cfg.persons_max = value.get<int>();
        else if (key == "overlap") cfg.overlap = value.get<double>();
        else if (key == "sigma") cfg.sigma = value.get<double>();
        else if (key == "attenuation") cfg.attenuation = value.get<double>();
        else if (key == "noise_amplitude") cfg.noise_amplitude = value.get<double>();
        else if (key == "dropout") cfg.dropout = value.get<double>();
        else if (key == "region_margin") cfg.region_margin = value.get<double>();
        else if (key == "region_jitter") cfg.region_jitter = value.get<double>();
        else if (key == "height_min") cfg.height_min = value.get<double>();
        else if (key == "height_max") cfg.height_max = value.get<double>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else throw ConfigError("unknown synth config key \"" + key + "\"");
    }
}

void apply_training_overrides(TrainingConfig& cfg, const Json& j) {
    for (const auto& [key, value] : j.items()) {
        if (key == "n_candidates") cfg.n_candidates = value.get<int>();
        else if (key == "nms_radius") cfg.nms_radius = value.get<double>();
        else if (key == "match_fraction") cfg.match_fraction = value.get<double>();
        else if (key == "holdout_fraction") cfg.holdout_fraction = value.get<double>();
        else if (key == "max_pairs_per_class") cfg.max_pairs_per_class = value.get<std::size_t>();
        else if (key == "balance_classes") cfg.balance_classes = value.get<bool>();
        else if (key == "classifier") cfg.classifier = value.get<std::string>();
        else if (key == "logistic_lambda") cfg.logistic_lambda = value.get<double>();
        else if (key == "svm_c") cfg.svm_c = value.get<double>();
        else if (key == "svm_gamma") cfg.svm_gamma = value.get<double>();
        else if (key == "svm_max_samples") cfg.svm_max_samples = value.get<std::size_t>();
        else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
        else throw ConfigError("unknown training config key \"" + key + "\"");
    }
}

Json synth_config_json(const SynthConfig& cfg) {
    Json j;
    j["width"] = cfg.width;
    j["height"] = cfg.height;
    j["persons_min"] = cfg.persons_min;
    j["persons_max"] = cfg.persons_max;
    j["overlap"] = cfg.overlap;
    j["sigma"] = cfg.sigma;
    j["attenuation"] = cfg.attenuation;
    j["noise_amplitude"] = cfg.noise_amplitude;
    j["dropout"] = cfg.dropout;
    j["region_margin"] = cfg.region_margin;
    j["region_jitter"] = cfg.region_jitter;
    j["height_min"] = cfg.height_min;
    j["height_max"] = cfg.height_max;
    j["seed"] = cfg.seed;
    return j;
}

struct SynthArgs {
    std::string out;
    std::string preset = "occluded";
    std::string config;
    int count = 200;
    std::uint64_t seed = 0;
    bool seed_set = false;
    bool include_maps = false;
};

void run_synth(const SynthArgs& a) {
    SynthConfig cfg = preset_config(a.preset);
    if (!a.config.empty()) apply_synth_overrides(cfg, read_config_file(a.config));
    if (a.seed_set) cfg.seed = a.seed;
    cfg.check();
    if (a.count < 1) throw ConfigError("count must be at least 1");

    std::error_code ec;
    fs::create_directories(a.out, ec);
    if (ec) throw ConfigError("cannot create directory " + a.out + ": " + ec.message());

    for (int i = 0; i < a.count; ++i) {
        const Scene scene = generate_scene(cfg, i);
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%05d.json", i);
        write_scene(scene, (fs::path(a.out) / name).string(), a.include_maps);
    }

    Json manifest;
    manifest["format"] = "jpa-manifest/1";
    manifest["count"] = a.count;
    manifest["preset"] = a.preset;
    manifest["config"] = synth_config_json(cfg);
    manifest["config_hash"] = hex64(fnv1a(manifest["config"].dump()));
    save_json_file((fs::path(a.out) / "manifest.json").string(), manifest);
    std::cout << manifest.dump(2) << "\n";
}

struct TrainArgs {
    std::string scenes;
    std::string out;
    std::string config;
    std::string classifier;
    std::uint64_t seed = 0;
    bool seed_set = false;
};

void run_train(const TrainArgs& a) {
    TrainingConfig cfg;
    if (!a.config.empty()) apply_training_overrides(cfg, read_config_file(a.config));
    if (!a.classifier.empty()) cfg.classifier = a.classifier;
    if (a.seed_set) cfg.seed = a.seed;

    const std::vector<Scene> scenes = read_scene_dir(a.scenes);
    const PairwiseModel model = train_pairwise(scenes, cfg);
    write_model(model, a.out);

    std::printf("%-24s %8s %8s %12s\n", "pair", "pos", "neg", "holdout_acc");
    for (int b = 0; b < kJointCount; ++b) {
        for (int c = b; c < kJointCount; ++c) {
            const PairModel& pm = *model.models[type_pair_index(b, c)];
            const std::string name = std::string(joint_name(JointId(b))) + "/" +
                                     std::string(joint_name(JointId(c)));
            std::printf("%-24s %8d %8d %12.4f\n", name.c_str(), pm.positives, pm.negatives,
                        pm.holdout_accuracy);
        }
    }
}

struct SolveArgs {
    std::string scenes;
    std::string model;
    std::string out;
    SolveOptions opt;
};

void run_solve(const SolveArgs& a) {
    a.opt.check();
    if (a.opt.mode != "argmax" && a.model.empty())
        throw ConfigError("mode " + a.opt.mode + " requires --model");

    const std::vector<Scene> scenes = read_scene_dir(a.scenes);
    PairwiseModel model;
    const bool has_model = !a.model.empty();
    if (has_model) model = read_model(a.model);

    const SolveResult result = solve_scenes(scenes, has_model ? &model : nullptr, a.opt);

    Predictions pred;
    pred.mode = a.opt.mode;
    pred.tau = a.opt.tau;
    pred.n_candidates = a.opt.n_candidates;
    pred.nms_radius = a.opt.nms_radius;
    pred.seed = a.opt.seed;
    pred.skipped_regions = result.stats.skipped_regions;
    pred.poses = result.poses;
    write_predictions(pred, a.out);

    Json stats;
    stats["format"] = "jpa-stats/1";
    stats["median_solve_ms"] = result.stats.median_ms();
    stats["skipped_regions"] = result.stats.skipped_regions;
    Json per = Json::array();
    for (double ms : result.stats.per_person_ms) per.push_back(ms);
    stats["per_person_ms"] = std::move(per);
    save_json_file(a.out + ".stats.json", stats);

    std::printf("solved %zu scenes, %zu persons, median %.3f ms, %d region(s) skipped\n",
                scenes.size(), result.stats.per_person_ms.size(), result.stats.median_ms(),
                result.stats.skipped_regions);
}

struct EvalArgs {
    std::string scenes;
    std::string pred;
    std::string out;
    std::string setting;
};

void run_eval(const EvalArgs& a) {
    const std::vector<Scene> scenes = read_scene_dir(a.scenes);
    const Predictions pred = read_predictions(a.pred);

    Report report = map_report(match_and_score(scenes, pred.poses, EvalConfig{}));
    report.setting = a.setting.empty() ? pred.mode : a.setting;
    if (fs::exists(a.pred + ".stats.json")) {
        const Json stats = load_json_file(a.pred + ".stats.json");
        check_format(stats, "jpa-stats");
        report.median_solve_ms = stats.at("median_solve_ms").get<double>();
    }

    const std::string csv = report_csv({report});
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f) throw ConfigError("cannot write " + a.out);
        f << csv;
    }
    std::cout << report_pretty(report) << csv;
}

struct SweepArgs {
    std::string scenes;
    std::string model;
    std::string out;
    std::string param = "tau";
    std::string grid;
    SolveOptions opt;
};

void run_sweep(const SweepArgs& a) {
    const std::vector<Scene> scenes = read_scene_dir(a.scenes);
    const PairwiseModel model = read_model(a.model);

    std::vector<double> grid;
    if (!a.grid.empty()) {
        grid = parse_grid(a.grid);
    } else if (a.param == "tau") {
        for (int i = 0; i < 10; ++i) grid.push_back(0.1 * i);
    } else {
        grid = {1, 3, 5};
    }

    const std::vector<SweepRow> rows =
        sweep_parameter(scenes, model, a.param, grid, a.opt, EvalConfig{});
    const std::string csv = sweep_csv(rows);
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f) throw ConfigError("cannot write " + a.out);
        f << csv;
    }
    std::cout << csv;
}

struct BenchArgs {
    std::string model;
    std::string out;
    std::string sizes = "4,6,8,10";
    int trials = 5;
    std::uint64_t seed = 1;
};

void run_bench(const BenchArgs& a) {
    const PairwiseModel model = read_model(a.model);
    std::vector<int> sizes;
    for (double v : parse_grid(a.sizes)) {
        if (v < 1 || v != std::floor(v)) throw ConfigError("sizes must be positive integers");
        sizes.push_back(int(v));
    }
    if (sizes.empty()) throw ConfigError("empty size list");

    const std::vector<BenchRow> rows = benchmark_local_vs_global(model, sizes, a.trials, a.seed);
    const std::string csv = bench_csv(rows);
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f) throw ConfigError("cannot write " + a.out);
        f << csv;
    }
    std::cout << csv;
}

int report_error(const std::string& type, const std::string& message, bool json, int code) {
    if (json) {
        Json err;
        err["error"] = Json{{"type", type}, {"message", message}};
        std::cerr << err.dump() << "\n";
    } else {
        std::cerr << "error: " << message << "\n";
    }
    return code;
}

}  // namespace

int main(int argc, char** argv) {
    bool json_errors = false;
    for (int i = 1; i < argc; ++i)
        if (std::string(argv[i]) == "--json") json_errors = true;

    CLI::App app{"multi-person pose estimation by local joint-to-person association"};
    app.require_subcommand(1);
    app.add_flag("--json", json_errors, "machine-readable errors on stderr");

    SynthArgs synth;
    CLI::App* synth_cmd = app.add_subcommand("synth", "generate synthetic scene files");
    synth_cmd->fallthrough();
    synth_cmd->add_option("--out", synth.out, "output directory")->required();
    synth_cmd->add_option("--count", synth.count, "number of scenes");
    synth_cmd->add_option("--preset", synth.preset, "clean, occluded, or crowded");
    synth_cmd->add_option("--config", synth.config, "JSON config overriding the preset");
    synth_cmd->add_option("--seed", synth.seed, "base seed")->each([&](const std::string&) {
        synth.seed_set = true;
    });
    synth_cmd->add_flag("--include-maps", synth.include_maps,
                        "store rendered maps in scene files");
    synth_cmd->callback([&] { run_synth(synth); });

    TrainArgs train;
    CLI::App* train_cmd = app.add_subcommand("train", "train the pairwise model");
    train_cmd->fallthrough();
    train_cmd->add_option("--scenes", train.scenes, "scene directory")->required();
    train_cmd->add_option("--out", train.out, "model output file")->required();
    train_cmd->add_option("--config", train.config, "JSON training config");
    train_cmd->add_option("--classifier", train.classifier, "logistic or rbf_svm")
        ->check(CLI::IsMember({"logistic", "rbf_svm"}));
    train_cmd->add_option("--seed", train.seed, "training seed")->each([&](const std::string&) {
        train.seed_set = true;
    });
    train_cmd->callback([&] { run_train(train); });

    SolveArgs solve;
    CLI::App* solve_cmd = app.add_subcommand("solve", "predict poses for every region");
    solve_cmd->fallthrough();
    solve_cmd->add_option("--scenes", solve.scenes, "scene directory")->required();
    solve_cmd->add_option("--model", solve.model, "trained model file");
    solve_cmd->add_option("--out", solve.out, "predictions output file")->required();
    solve_cmd->add_option("--mode", solve.opt.mode, "argmax, ljpa, or global")
        ->check(CLI::IsMember({"argmax", "ljpa", "global"}));
    solve_cmd->add_option("--tau", solve.opt.tau, "confidence gate threshold");
    solve_cmd->add_option("--n-candidates", solve.opt.n_candidates, "candidates per joint map");
    solve_cmd->add_option("--nms-radius", solve.opt.nms_radius, "candidate suppression radius");
    solve_cmd->add_option("--workers", solve.opt.workers, "worker threads");
    solve_cmd->add_option("--seed", solve.opt.seed, "seed echoed into outputs");
    solve_cmd->callback([&] { run_solve(solve); });

    EvalArgs eval;
    CLI::App* eval_cmd = app.add_subcommand("eval", "score predictions against ground truth");
    eval_cmd->fallthrough();
    eval_cmd->add_option("--scenes", eval.scenes, "scene directory")->required();
    eval_cmd->add_option("--pred", eval.pred, "predictions file")->required();
    eval_cmd->add_option("--out", eval.out, "report CSV output file");
    eval_cmd->add_option("--setting", eval.setting, "row label in the report");
    eval_cmd->callback([&] { run_eval(eval); });

    SweepArgs sweep;
    CLI::App* sweep_cmd = app.add_subcommand("sweep", "re-solve across a parameter grid");
    sweep_cmd->fallthrough();
    sweep_cmd->add_option("--scenes", sweep.scenes, "scene directory")->required();
    sweep_cmd->add_option("--model", sweep.model, "trained model file")->required();
    sweep_cmd->add_option("--param", sweep.param, "tau or n")
        ->check(CLI::IsMember({"tau", "n"}));
    sweep_cmd->add_option("--grid", sweep.grid, "comma-separated grid values");
    sweep_cmd->add_option("--out", sweep.out, "sweep CSV output file");
    sweep_cmd->add_option("--mode", sweep.opt.mode, "solver mode")
        ->check(CLI::IsMember({"argmax", "ljpa", "global"}));
    sweep_cmd->add_option("--tau", sweep.opt.tau, "base threshold when sweeping n");
    sweep_cmd->add_option("--n-candidates", sweep.opt.n_candidates,
                          "base candidate count when sweeping tau");
    sweep_cmd->add_option("--nms-radius", sweep.opt.nms_radius, "candidate suppression radius");
    sweep_cmd->add_option("--workers", sweep.opt.workers, "worker threads");
    sweep_cmd->add_option("--seed", sweep.opt.seed, "seed echoed into outputs");
    sweep_cmd->callback([&] { run_sweep(sweep); });

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "time the local solver vs the global one");
    bench_cmd->fallthrough();
    bench_cmd->add_option("--model", bench.model, "trained model file")->required();
    bench_cmd->add_option("--sizes", bench.sizes, "comma-separated instance sizes");
    bench_cmd->add_option("--trials", bench.trials, "trials per size");
    bench_cmd->add_option("--seed", bench.seed, "scene seed");
    bench_cmd->add_option("--out", bench.out, "benchmark CSV output file");
    bench_cmd->callback([&] { run_bench(bench); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        if (json_errors) return report_error("config", e.what(), true, 2);
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        return report_error("config", e.what(), json_errors, 2);
    } catch (const DataError& e) {
        return report_error("data", e.what(), json_errors, 3);
    } catch (const std::exception& e) {
        return report_error("data", e.what(), json_errors, 3);
    }
    return 0;
}
