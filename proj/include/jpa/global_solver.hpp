#pragma once

#include "jpa/global_model.hpp"

namespace jpa {

/// Hard caps for the exact global solver. The problem is NP-hard and this
/// implementation exists as a small-scale reference, not a scalable solver.
inline constexpr int kGlobalProposalCap = 10;
inline constexpr int kGlobalClassCap = 4;

/// Converts probabilities to log-odds costs. Label probabilities come as a
/// D x J matrix, conditional pair probabilities as per-pair J x J blocks;
/// everything is clamped to [kProbEpsilon, 1 - kProbEpsilon] first.
GlobalInstance build_global_instance(const std::vector<Point2>& proposals, const Mat& p_label,
                                     const PairTable<Mat>& p_pair, bool single_person);

/// Exact minimizer of <alpha, x> + <beta, z> over the labeling-and-grouping
/// polytope by branch-and-bound: depth-first over proposals, each choosing
/// suppress, or a class plus a cluster (an existing one or a fresh one).
/// Restricted-growth cluster choices enumerate every partition exactly once;
/// an admissible bound prunes. Ties resolve to the lexicographically
/// smallest (x, y) bit string. Throws InstanceTooLargeError above the caps.
GlobalSolution solve_global_exact(const GlobalInstance& inst);

}  // namespace jpa
