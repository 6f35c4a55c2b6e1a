#pragma once

#include <string>
#include <vector>

#include "jpa/model.hpp"
#include "jpa/types.hpp"

namespace jpa {

/// One per-person association problem over D typed candidates.
///
/// Binary variable x_d selects candidate d for this person; y_{dd'} marks
/// both ends of a pair as selected. Costs are log odds, so negative values
/// attract. The feasible set couples the two layers:
///
///   y_{dd'} <= x_d,  y_{dd'} <= x_d'          (selection dominates pairing)
///   y_{dd'} + y_{d'd''} - 1 <= y_{dd''}       (pairing is transitive)
///   x_d + x_d' - 1 <= y_{dd'}                 (co-selection forces pairing)
///
/// Together these pin y = x AND x, which is what reduce_to_selection exploits.
struct AssociationInstance {
    std::vector<Detection> detections;
    Vec unary;                   // alpha, size D
    PairTable<double> pairwise;  // beta over unordered pairs

    int size() const { return static_cast<int>(detections.size()); }
    void check() const;  // throws DataError on shape mismatch
};

struct AssociationSolution {
    std::vector<std::uint8_t> x;  // selection indicators, size D
    std::vector<std::uint8_t> y;  // pairing indicators, packed pair order
    double objective = 0.0;
};

/// One violated constraint, reported by name with the offending indices.
struct Violation {
    std::string constraint;
    std::vector<int> indices;
};

/// Checks a candidate solution against every coupling constraint.
/// Empty result means feasible. Shape errors throw DataError.
std::vector<Violation> validate_association_solution(const AssociationInstance& inst,
                                                     const AssociationSolution& sol);

/// Objective <alpha, x> + <beta, y>, accumulated in canonical order
/// (detections ascending, then packed pair index ascending) so equal
/// solutions produce bit-identical sums.
double assoc_objective(const AssociationInstance& inst, const AssociationSolution& sol);

/// Expands a selection vector to a full solution via y = x AND x, with the
/// objective filled in. The result is always feasible.
AssociationSolution solution_from_selection(const AssociationInstance& inst,
                                            const std::vector<std::uint8_t>& x);

}  // namespace jpa
