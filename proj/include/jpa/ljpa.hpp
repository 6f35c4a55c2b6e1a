#pragma once

#include "jpa/association.hpp"
#include "jpa/model.hpp"

namespace jpa {

/// Hard size limit for solve_exact. Roughly 14 joints times 14 candidates;
/// larger instances signal misconfigured sampling upstream.
inline constexpr int kLocalSolverCap = 200;

/// Quadratic form over selection bits only: sum_d linear_d x_d +
/// sum_{d<d'} quadratic_{dd'} x_d x_{d'}.
struct QuboForm {
    Vec linear;
    PairTable<double> quadratic;
};

/// Eliminates the pairing layer. The coupling constraints force
/// y = x AND x on every feasible point: y <= x (both sides) caps y from
/// above, x_d + x_d' - 1 <= y forces it from below, and transitivity is
/// then automatic since x_d x_d' * x_d' x_d'' <= x_d x_d''. So the full
/// objective collapses to a quadratic form with a = alpha, b = beta, and
/// the D + C(D,2) original variables reduce to D selection bits.
QuboForm reduce_to_qubo(const AssociationInstance& inst);

/// Objective of a selection under the reduced form, accumulated in
/// canonical order (matches assoc_objective on the expanded solution
/// bit for bit).
double selection_objective(const AssociationInstance& inst, const std::vector<std::uint8_t>& x);

/// Exhaustive 2^D enumeration. Oracle for solve_exact; refuses D > 20.
/// Ties in the optimum resolve to the lexicographically smallest x.
AssociationSolution solve_bruteforce(const AssociationInstance& inst);

/// Branch-and-bound minimizer of the reduced form.
///
/// Depth-first over selection bits ordered by descending |alpha|; a node's
/// lower bound is the cost of fixed bits plus, for every free bit, the best
/// case min(0, alpha_d + sum of beta to bits fixed on) plus min(0, beta)
/// over free pairs. The bound is admissible, so pruning only discards
/// provably suboptimal subtrees. Incumbent is seeded by a greedy pass plus
/// single-flip descent. Same tie rule as solve_bruteforce.
AssociationSolution solve_exact(const AssociationInstance& inst);

/// Reads the primary person's pose out of a solution: per joint type the
/// selected detection with maximal confidence (ties to the smallest id),
/// mapped from region frame into image frame. Joint types with no selected
/// detection stay absent.
PersonPose extract_pose(const AssociationInstance& inst, const AssociationSolution& sol,
                        const Box& region);

}  // namespace jpa
