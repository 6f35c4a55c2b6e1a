#include "jpa/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <thread>

#include "jpa/global_solver.hpp"
#include "jpa/ljpa.hpp"
#include "jpa/rng.hpp"
#include "jpa/synth.hpp"

namespace jpa {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

double median_of(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

/// Typed candidates of one region after the confidence gate, ids dense.
std::vector<Detection> gated_candidates(const RegionMaps& maps, const SolveOptions& opt) {
    std::vector<Detection> dets;
    for (int j = 0; j < kJointCount; ++j) {
        for (const Detection& c : sample_candidates(maps[j], opt.n_candidates, opt.nms_radius)) {
            const double conf = threshold_confidence(c.confidence, opt.tau);
            if (conf <= 0.0) continue;
            Detection d = c;
            d.id = int(dets.size());
            d.confidence = conf;
            dets.push_back(d);
        }
    }
    return dets;
}

struct GlobalBuild {
    GlobalInstance inst;
    std::vector<JointId> classes;  // class index -> joint type
    Mat confidence;                // per (proposal, class) thresholded map read
};

/// Assembles an untyped labeling-and-grouping instance over the given
/// detections, with one class per joint type present among them. Label
/// probabilities are gated map reads per class; conditional pair
/// probabilities come from the trained model with the detections retyped
/// to the class pair being priced.
GlobalBuild build_global_from_detections(const std::vector<Detection>& dets,
                                         const PairwiseModel& model, const RegionMaps& maps,
                                         const Box& region, double tau, bool single_person) {
    GlobalBuild out;
    std::vector<bool> present(kJointCount, false);
    for (const Detection& d : dets) present[joint_index(d.joint)] = true;
    for (int j = 0; j < kJointCount; ++j)
        if (present[j]) out.classes.push_back(JointId(j));

    const int n = int(dets.size());
    const int t = int(out.classes.size());
    out.confidence.resize(n, t);
    for (int d = 0; d < n; ++d)
        for (int c = 0; c < t; ++c)
            out.confidence(d, c) =
                threshold_confidence(maps[joint_index(out.classes[c])].at(dets[d].location), tau);

    std::vector<Point2> locations;
    for (const Detection& d : dets) locations.push_back(d.location);

    PairTable<Mat> p_pair(n, Mat());
    for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
            Mat block(t, t);
            for (int ca = 0; ca < t; ++ca) {
                Detection da = dets[a];
                da.joint = out.classes[ca];
                for (int cb = 0; cb < t; ++cb) {
                    Detection db = dets[b];
                    db.joint = out.classes[cb];
                    block(ca, cb) = pairwise_probability(model, da, db, maps, region);
                }
            }
            p_pair(a, b) = std::move(block);
        }
    }
    out.inst = build_global_instance(locations, out.confidence, p_pair, single_person);
    return out;
}

PersonPose pose_from_global(const std::vector<Detection>& dets, const GlobalBuild& build,
                            const GlobalSolution& sol, const Box& region) {
    PersonPose pose;
    const int t = int(build.classes.size());
    for (int c = 0; c < t; ++c) {
        int best = -1;
        for (int d = 0; d < int(dets.size()); ++d) {
            if (sol.label_of(d, t) != c) continue;
            if (best < 0 || build.confidence(d, c) > build.confidence(best, c)) best = d;
        }
        if (best < 0) continue;
        const Point2 loc = dets[best].location + Point2(region.x0, region.y0);
        pose.set(build.classes[c], loc, build.confidence(best, c));
    }
    return pose;
}

struct RegionOutcome {
    PersonPose pose;
    double solve_ms = 0.0;
    bool skipped = false;
};

RegionOutcome solve_region(const RegionMaps& maps, const Box& region, const PairwiseModel* model,
                           const SolveOptions& opt) {
    RegionOutcome out;
    if (opt.mode == "argmax") {
        const auto start = Clock::now();
        out.pose = argmax_baseline(maps, region);
        out.solve_ms = elapsed_ms(start);
        return out;
    }
    const std::vector<Detection> dets = gated_candidates(maps, opt);
    if (opt.mode == "ljpa") {
        const AssociationInstance inst = build_instance(dets, *model, maps, region);
        const auto start = Clock::now();
        const AssociationSolution sol = solve_exact(inst);
        out.solve_ms = elapsed_ms(start);
        out.pose = extract_pose(inst, sol, region);
        return out;
    }
    // global: admissible only under the reference solver's caps.
    int types = 0;
    {
        std::vector<bool> present(kJointCount, false);
        for (const Detection& d : dets)
            if (!present[joint_index(d.joint)]) {
                present[joint_index(d.joint)] = true;
                ++types;
            }
    }
    if (int(dets.size()) > kGlobalProposalCap || types > kGlobalClassCap) {
        out.skipped = true;
        return out;
    }
    const GlobalBuild build =
        build_global_from_detections(dets, *model, maps, region, opt.tau, true);
    const auto start = Clock::now();
    const GlobalSolution sol = solve_global_exact(build.inst);
    out.solve_ms = elapsed_ms(start);
    out.pose = pose_from_global(dets, build, sol, region);
    return out;
}

}  // namespace

void SolveOptions::check() const {
    if (mode != "argmax" && mode != "ljpa" && mode != "global")
        throw ConfigError("unknown mode \"" + mode + "\" (argmax, ljpa, global)");
    if (n_candidates < 1) throw ConfigError("n-candidates must be at least 1");
    if (nms_radius < 0.0) throw ConfigError("nms radius must be nonnegative");
    if (workers < 1) throw ConfigError("workers must be at least 1");
}

double SolveStats::median_ms() const { return median_of(per_person_ms); }

SolveResult solve_scenes(const std::vector<Scene>& scenes, const PairwiseModel* model,
                         const SolveOptions& opt) {
    opt.check();
    if (opt.mode != "argmax" && model == nullptr)
        throw ConfigError("mode " + opt.mode + " requires a trained model");

    struct Task {
        int scene;
        int region;
    };
    std::vector<Task> tasks;
    SolveResult result;
    result.poses.resize(scenes.size());
    for (std::size_t s = 0; s < scenes.size(); ++s) {
        if (scenes[s].maps.size() != scenes[s].regions.size())
            throw DataError("scene " + std::to_string(s) + " has no rendered maps");
        result.poses[s].resize(scenes[s].regions.size());
        for (std::size_t r = 0; r < scenes[s].regions.size(); ++r)
            tasks.push_back({int(s), int(r)});
    }
    std::vector<RegionOutcome> outcomes(tasks.size());

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;
    auto work = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= tasks.size()) break;
            try {
                const Scene& scene = scenes[std::size_t(tasks[k].scene)];
                outcomes[k] = solve_region(scene.maps[std::size_t(tasks[k].region)],
                                           scene.regions[std::size_t(tasks[k].region)], model, opt);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };

    const int workers = std::min(opt.workers, std::max(1, int(tasks.size())));
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (std::thread& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (std::size_t k = 0; k < tasks.size(); ++k) {
        result.poses[std::size_t(tasks[k].scene)][std::size_t(tasks[k].region)] =
            outcomes[k].pose;
        result.stats.per_person_ms.push_back(outcomes[k].solve_ms);
        if (outcomes[k].skipped) ++result.stats.skipped_regions;
    }
    return result;
}

std::vector<SweepRow> sweep_parameter(const std::vector<Scene>& scenes,
                                      const PairwiseModel& model, const std::string& parameter,
                                      const std::vector<double>& grid, const SolveOptions& base,
                                      const EvalConfig& eval_cfg) {
    if (parameter != "tau" && parameter != "n")
        throw ConfigError("unknown sweep parameter \"" + parameter + "\" (tau, n)");
    if (grid.empty()) throw ConfigError("empty sweep grid");

    std::vector<SweepRow> rows;
    for (double value : grid) {
        SolveOptions opt = base;
        if (parameter == "tau") {
            opt.tau = value;
        } else {
            if (value < 1.0 || value != std::floor(value))
                throw ConfigError("n grid values must be positive integers");
            opt.n_candidates = int(value);
        }
        const SolveResult solved = solve_scenes(scenes, &model, opt);
        const Report report = map_report(match_and_score(scenes, solved.poses, eval_cfg));
        SweepRow row;
        row.value = value;
        row.map = report.total.value_or(0.0);
        row.median_ms = solved.stats.median_ms();
        rows.push_back(row);
    }
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string out = "param,mAP,median_ms\n";
    char buf[128];
    for (const SweepRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%g,%.6f,%.3f\n", r.value, r.map, r.median_ms);
        out += buf;
    }
    return out;
}

std::vector<BenchRow> benchmark_local_vs_global(const PairwiseModel& model,
                                                const std::vector<int>& sizes, int trials,
                                                std::uint64_t seed) {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    const std::array<JointId, 4> bench_types = {JointId::head, JointId::neck,
                                                JointId::r_shoulder, JointId::l_shoulder};
    std::vector<BenchRow> rows;
    for (int size : sizes) {
        if (size < 1 || size > kGlobalProposalCap)
            throw ConfigError("bench sizes must lie in [1, " +
                              std::to_string(kGlobalProposalCap) + "]");
        std::vector<double> local_ms, global_ms;
        for (int t = 0; t < trials; ++t) {
            SynthConfig cfg = preset_config("occluded");
            cfg.seed = mix_seed(seed, std::uint64_t(size) * 1024 + std::uint64_t(t));
            const Scene scene = generate_scene(cfg, t);
            const RegionMaps& maps = scene.maps[0];
            const Box& region = scene.regions[0];

            std::vector<Detection> pool;
            for (JointId j : bench_types)
                for (const Detection& d : sample_candidates(maps[joint_index(j)], size, 1.5))
                    pool.push_back(d);
            std::sort(pool.begin(), pool.end(), [](const Detection& a, const Detection& b) {
                if (a.confidence != b.confidence) return a.confidence > b.confidence;
                if (a.joint != b.joint) return a.joint < b.joint;
                return a.id < b.id;
            });
            if (int(pool.size()) > size) pool.resize(std::size_t(size));
            for (std::size_t i = 0; i < pool.size(); ++i) pool[i].id = int(i);

            const AssociationInstance local = build_instance(pool, model, maps, region);
            auto start = Clock::now();
            solve_exact(local);
            local_ms.push_back(elapsed_ms(start));

            const GlobalBuild build =
                build_global_from_detections(pool, model, maps, region, 0.0, false);
            start = Clock::now();
            solve_global_exact(build.inst);
            global_ms.push_back(elapsed_ms(start));
        }
        rows.push_back({size, "local", median_of(local_ms), trials});
        rows.push_back({size, "global", median_of(global_ms), trials});
    }
    return rows;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
    std::string out = "size,solver,median_ms,trials\n";
    char buf[128];
    for (const BenchRow& r : rows) {
        std::snprintf(buf, sizeof(buf), "%d,%s,%.4f,%d\n", r.size, r.solver.c_str(),
                      r.median_ms, r.trials);
        out += buf;
    }
    return out;
}

}  // namespace jpa
