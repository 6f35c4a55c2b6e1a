#pragma once

#include <vector>

#include "jpa/association.hpp"
#include "jpa/model.hpp"
#include "jpa/types.hpp"

namespace jpa {

/// Joint labeling-and-grouping problem over D untyped proposals and J part
/// classes.
///
/// x_{dj} assigns class j to proposal d (at most one class per proposal),
/// y_{dd'} groups two proposals into the same person, and the interaction
/// term z_{dd'jj'} prices a grouped, labeled pair.
///
/// Feasibility:
///   sum_j x_{dj} <= 1                          (at most one class)
///   y_{dd'} <= sum_j x_{dj}, same for d'       (grouping needs labels)
///   y_{dd'} + y_{d'd''} - 1 <= y_{dd''}        (grouping is transitive)
///   x_{dj} + x_{d'j'} + y_{dd'} - 2 <= z       (z forced on)
///   z <= x_{dj}, z <= x_{d'j'}, z <= y_{dd'}   (z forced off)
/// which together pin z = x * x * y. With single_person set, every labeled
/// pair must also be grouped:
///   sum_j x_{dj} + sum_j x_{d'j'} - 1 <= y_{dd'}
struct GlobalInstance {
    int num_proposals = 0;
    int num_classes = 0;
    std::vector<Point2> locations;  // one per proposal, informational
    Mat unary;                      // D x J label costs (log odds)
    PairTable<Mat> pairwise;        // per proposal pair, J x J class-pair costs
    bool single_person = false;

    void check() const;  // throws DataError on shape mismatch
};

/// Packed index of z_{dd'jj'}: pairs in canonical packed order, the first
/// class index belonging to the lower proposal id.
inline std::size_t z_index(int num_proposals, int num_classes, int d, int d2, int j, int j2) {
    if (d > d2) {
        std::swap(d, d2);
        std::swap(j, j2);
    }
    const std::size_t pair = pair_index(num_proposals, d, d2);
    return (pair * num_classes + j) * num_classes + j2;
}

struct GlobalSolution {
    std::vector<std::uint8_t> x;  // D x J row-major label indicators
    std::vector<std::uint8_t> y;  // packed pair grouping indicators
    std::vector<std::uint8_t> z;  // packed pair x class x class interactions
    double objective = 0.0;
    std::vector<std::vector<int>> clusters;  // labeled proposals grouped by y

    int label_of(int proposal, int num_classes) const;  // -1 when unlabeled
};

std::vector<Violation> validate_global_solution(const GlobalInstance& inst,
                                                const GlobalSolution& sol);

/// sum alpha x + sum beta z, accumulated in canonical order (proposals
/// ascending, classes ascending, packed pairs ascending).
double global_objective(const GlobalInstance& inst, const GlobalSolution& sol);

/// Builds the full solution from per-proposal labels (-1 = suppressed) and
/// a grouping relation given as packed pair indicators: z is derived as
/// z = x * x * y, the objective is filled in, and clusters are the
/// connected components of y restricted to labeled proposals, each sorted
/// ascending and ordered by smallest member.
GlobalSolution global_solution_from(const GlobalInstance& inst, const std::vector<int>& labels,
                                    const std::vector<std::uint8_t>& grouping);

}  // namespace jpa
