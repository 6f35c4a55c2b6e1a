#include "jpa/association.hpp"

namespace jpa {

void AssociationInstance::check() const {
    const int d = size();
    if (unary.size() != d)
        throw DataError("unary cost vector has " + std::to_string(unary.size()) +
                        " entries for " + std::to_string(d) + " detections");
    if (pairwise.size() != d)
        throw DataError("pairwise table sized for " + std::to_string(pairwise.size()) +
                        " detections, expected " + std::to_string(d));
}

std::vector<Violation> validate_association_solution(const AssociationInstance& inst,
                                                     const AssociationSolution& sol) {
    inst.check();
    const int d = inst.size();
    if (static_cast<int>(sol.x.size()) != d)
        throw DataError("selection vector has " + std::to_string(sol.x.size()) +
                        " entries for " + std::to_string(d) + " detections");
    if (sol.y.size() != pair_count(d))
        throw DataError("pairing vector has " + std::to_string(sol.y.size()) +
                        " entries, expected " + std::to_string(pair_count(d)));

    for (std::uint8_t v : sol.x)
        if (v > 1) throw DataError("selection indicator outside {0,1}");
    for (std::uint8_t v : sol.y)
        if (v > 1) throw DataError("pairing indicator outside {0,1}");

    std::vector<Violation> out;
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            const std::uint8_t yij = sol.y[pair_index(d, i, j)];
            if (yij > sol.x[i]) out.push_back({"pairing_without_selection", {i, j, i}});
            if (yij > sol.x[j]) out.push_back({"pairing_without_selection", {i, j, j}});
            if (sol.x[i] + sol.x[j] - 1 > static_cast<int>(yij))
                out.push_back({"coselection_without_pairing", {i, j}});
        }
    }
    // Transitivity over ordered triples; with symmetric y it is enough to
    // check each unordered triple in its three pivot forms.
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            for (int k = j + 1; k < d; ++k) {
                const int yij = sol.y[pair_index(d, i, j)];
                const int yjk = sol.y[pair_index(d, j, k)];
                const int yik = sol.y[pair_index(d, i, k)];
                if (yij + yjk - 1 > yik) out.push_back({"pairing_not_transitive", {i, j, k}});
                if (yij + yik - 1 > yjk) out.push_back({"pairing_not_transitive", {j, i, k}});
                if (yik + yjk - 1 > yij) out.push_back({"pairing_not_transitive", {i, k, j}});
            }
        }
    }
    return out;
}

double assoc_objective(const AssociationInstance& inst, const AssociationSolution& sol) {
    inst.check();
    const int d = inst.size();
    if (static_cast<int>(sol.x.size()) != d || sol.y.size() != pair_count(d))
        throw DataError("solution shape does not match instance");
    double obj = 0.0;
    for (int i = 0; i < d; ++i)
        if (sol.x[i]) obj += inst.unary(i);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (sol.y[pair_index(d, i, j)]) obj += inst.pairwise(i, j);
    return obj;
}

AssociationSolution solution_from_selection(const AssociationInstance& inst,
                                            const std::vector<std::uint8_t>& x) {
    inst.check();
    const int d = inst.size();
    if (static_cast<int>(x.size()) != d)
        throw DataError("selection vector has " + std::to_string(x.size()) +
                        " entries for " + std::to_string(d) + " detections");
    AssociationSolution sol;
    sol.x = x;
    sol.y.assign(pair_count(d), 0);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            sol.y[pair_index(d, i, j)] = static_cast<std::uint8_t>(x[i] & x[j] & 1);
    sol.objective = assoc_objective(inst, sol);
    return sol;
}

}  // namespace jpa
