#pragma once

#include <string>
#include <vector>

#include "jpa/affinity.hpp"
#include "jpa/eval.hpp"
#include "jpa/model.hpp"

namespace jpa {

struct SolveOptions {
    std::string mode = "ljpa";  // argmax | ljpa | global
    int n_candidates = 5;
    double tau = 0.2;
    double nms_radius = 1.5;
    int workers = 1;
    std::uint64_t seed = 1;  // echoed into outputs; solving itself is deterministic

    void check() const;
};

struct SolveStats {
    std::vector<double> per_person_ms;  // canonical (scene, region) order
    int skipped_regions = 0;

    double median_ms() const;
};

struct SolveResult {
    std::vector<std::vector<PersonPose>> poses;  // poses[scene][region]
    SolveStats stats;
};

/// Runs the chosen solver over every region of every scene: candidate
/// sampling, confidence gate, instance build, solve, pose extraction.
/// Regions are distributed over a worker pool; results and stats keep
/// canonical (scene, region) order no matter the completion order. The
/// model may be null only for mode=argmax. Global-mode regions whose
/// instance exceeds the solver caps are skipped (empty pose) and counted.
SolveResult solve_scenes(const std::vector<Scene>& scenes, const PairwiseModel* model,
                         const SolveOptions& opt);

/// One grid point of a parameter sweep.
struct SweepRow {
    double value = 0.0;
    double map = 0.0;
    double median_ms = 0.0;
};

/// Re-solves and re-scores the scenes at every grid value of "tau" or "n".
std::vector<SweepRow> sweep_parameter(const std::vector<Scene>& scenes,
                                      const PairwiseModel& model, const std::string& parameter,
                                      const std::vector<double>& grid, const SolveOptions& base,
                                      const EvalConfig& eval_cfg);

std::string sweep_csv(const std::vector<SweepRow>& rows);

struct BenchRow {
    int size = 0;
    std::string solver;
    double median_ms = 0.0;
    int trials = 0;
};

/// Times the exact local solver against the exact global solver on the
/// same detections, in the regime where the global solver is admissible:
/// a reduced four-type joint set with `size` pooled proposals per
/// instance. Detections come from freshly rendered occluded scenes, so
/// instances carry realistic trained costs. Two rows per size.
std::vector<BenchRow> benchmark_local_vs_global(const PairwiseModel& model,
                                                const std::vector<int>& sizes, int trials,
                                                std::uint64_t seed);

std::string bench_csv(const std::vector<BenchRow>& rows);

}  // namespace jpa
