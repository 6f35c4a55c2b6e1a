#include "jpa/global_model.hpp"

#include <numeric>

namespace jpa {

void GlobalInstance::check() const {
    if (num_proposals < 0 || num_classes <= 0)
        throw DataError("instance needs a positive class count and non-negative proposal count");
    if (unary.rows() != num_proposals || unary.cols() != num_classes)
        throw DataError("label cost matrix is " + std::to_string(unary.rows()) + "x" +
                        std::to_string(unary.cols()) + ", expected " +
                        std::to_string(num_proposals) + "x" + std::to_string(num_classes));
    if (pairwise.size() != num_proposals)
        throw DataError("pairwise table sized for " + std::to_string(pairwise.size()) +
                        " proposals, expected " + std::to_string(num_proposals));
    if (!locations.empty() && static_cast<int>(locations.size()) != num_proposals)
        throw DataError("location list does not match proposal count");
    for (int i = 0; i < num_proposals; ++i)
        for (int j = i + 1; j < num_proposals; ++j) {
            const Mat& b = pairwise(i, j);
            if (b.rows() != num_classes || b.cols() != num_classes)
                throw DataError("pairwise block (" + std::to_string(i) + "," + std::to_string(j) +
                                ") is not " + std::to_string(num_classes) + "x" +
                                std::to_string(num_classes));
        }
}

int GlobalSolution::label_of(int proposal, int num_classes) const {
    for (int j = 0; j < num_classes; ++j)
        if (x[static_cast<std::size_t>(proposal) * num_classes + j]) return j;
    return -1;
}

namespace {

void check_shapes(const GlobalInstance& inst, const GlobalSolution& sol) {
    inst.check();
    const auto d = static_cast<std::size_t>(inst.num_proposals);
    const auto cls = static_cast<std::size_t>(inst.num_classes);
    if (sol.x.size() != d * cls)
        throw DataError("label vector has " + std::to_string(sol.x.size()) + " entries, expected " +
                        std::to_string(d * cls));
    if (sol.y.size() != pair_count(inst.num_proposals))
        throw DataError("grouping vector has " + std::to_string(sol.y.size()) +
                        " entries, expected " + std::to_string(pair_count(inst.num_proposals)));
    if (sol.z.size() != pair_count(inst.num_proposals) * cls * cls)
        throw DataError("interaction vector has " + std::to_string(sol.z.size()) +
                        " entries, expected " +
                        std::to_string(pair_count(inst.num_proposals) * cls * cls));
    for (std::uint8_t v : sol.x)
        if (v > 1) throw DataError("label indicator outside {0,1}");
    for (std::uint8_t v : sol.y)
        if (v > 1) throw DataError("grouping indicator outside {0,1}");
    for (std::uint8_t v : sol.z)
        if (v > 1) throw DataError("interaction indicator outside {0,1}");
}

}  // namespace

std::vector<Violation> validate_global_solution(const GlobalInstance& inst,
                                                const GlobalSolution& sol) {
    check_shapes(inst, sol);
    const int d = inst.num_proposals;
    const int cls = inst.num_classes;

    std::vector<int> labels(d, 0);  // label count per proposal
    for (int i = 0; i < d; ++i) {
        int n = 0;
        for (int j = 0; j < cls; ++j) n += sol.x[static_cast<std::size_t>(i) * cls + j];
        labels[i] = n;
    }

    std::vector<Violation> out;
    for (int i = 0; i < d; ++i)
        if (labels[i] > 1) out.push_back({"multiple_labels", {i}});

    for (int i = 0; i < d; ++i) {
        for (int k = i + 1; k < d; ++k) {
            const std::uint8_t yik = sol.y[pair_index(d, i, k)];
            if (yik > std::min(labels[i], 1)) out.push_back({"grouping_without_label", {i, k, i}});
            if (yik > std::min(labels[k], 1)) out.push_back({"grouping_without_label", {i, k, k}});
            if (inst.single_person &&
                std::min(labels[i], 1) + std::min(labels[k], 1) - 1 > static_cast<int>(yik))
                out.push_back({"labeled_pair_not_grouped", {i, k}});
            for (int j = 0; j < cls; ++j) {
                for (int j2 = 0; j2 < cls; ++j2) {
                    const int xi = sol.x[static_cast<std::size_t>(i) * cls + j];
                    const int xk = sol.x[static_cast<std::size_t>(k) * cls + j2];
                    const int zv = sol.z[z_index(d, cls, i, k, j, j2)];
                    if (xi + xk + yik - 2 > zv)
                        out.push_back({"interaction_forced_off", {i, k, j, j2}});
                    if (zv > std::min({xi, xk, static_cast<int>(yik)}))
                        out.push_back({"interaction_without_support", {i, k, j, j2}});
                }
            }
        }
    }
    for (int i = 0; i < d; ++i) {
        for (int j = i + 1; j < d; ++j) {
            for (int k = j + 1; k < d; ++k) {
                const int yij = sol.y[pair_index(d, i, j)];
                const int yjk = sol.y[pair_index(d, j, k)];
                const int yik = sol.y[pair_index(d, i, k)];
                if (yij + yjk - 1 > yik) out.push_back({"grouping_not_transitive", {i, j, k}});
                if (yij + yik - 1 > yjk) out.push_back({"grouping_not_transitive", {j, i, k}});
                if (yik + yjk - 1 > yij) out.push_back({"grouping_not_transitive", {i, k, j}});
            }
        }
    }
    return out;
}

double global_objective(const GlobalInstance& inst, const GlobalSolution& sol) {
    check_shapes(inst, sol);
    const int d = inst.num_proposals;
    const int cls = inst.num_classes;
    double obj = 0.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < cls; ++j)
            if (sol.x[static_cast<std::size_t>(i) * cls + j]) obj += inst.unary(i, j);
    for (int i = 0; i < d; ++i)
        for (int k = i + 1; k < d; ++k)
            for (int j = 0; j < cls; ++j)
                for (int j2 = 0; j2 < cls; ++j2)
                    if (sol.z[z_index(d, cls, i, k, j, j2)]) obj += inst.pairwise(i, k)(j, j2);
    return obj;
}

GlobalSolution global_solution_from(const GlobalInstance& inst, const std::vector<int>& labels,
                                    const std::vector<std::uint8_t>& grouping) {
    inst.check();
    const int d = inst.num_proposals;
    const int cls = inst.num_classes;
    if (static_cast<int>(labels.size()) != d)
        throw DataError("label list has " + std::to_string(labels.size()) + " entries for " +
                        std::to_string(d) + " proposals");
    if (grouping.size() != pair_count(d))
        throw DataError("grouping vector has " + std::to_string(grouping.size()) +
                        " entries, expected " + std::to_string(pair_count(d)));

    GlobalSolution sol;
    sol.x.assign(static_cast<std::size_t>(d) * cls, 0);
    for (int i = 0; i < d; ++i) {
        if (labels[i] < -1 || labels[i] >= cls)
            throw DataError("label " + std::to_string(labels[i]) + " outside [-1, " +
                            std::to_string(cls - 1) + "]");
        if (labels[i] >= 0) sol.x[static_cast<std::size_t>(i) * cls + labels[i]] = 1;
    }
    sol.y = grouping;
    sol.z.assign(pair_count(d) * static_cast<std::size_t>(cls) * cls, 0);
    for (int i = 0; i < d; ++i)
        for (int k = i + 1; k < d; ++k)
            if (sol.y[pair_index(d, i, k)] && labels[i] >= 0 && labels[k] >= 0)
                sol.z[z_index(d, cls, i, k, labels[i], labels[k])] = 1;
    sol.objective = global_objective(inst, sol);

    std::vector<int> parent(d);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int a) {
        while (parent[a] != a) a = parent[a] = parent[parent[a]];
        return a;
    };
    for (int i = 0; i < d; ++i)
        for (int k = i + 1; k < d; ++k)
            if (sol.y[pair_index(d, i, k)]) {
                const int ra = find(i);
                const int rb = find(k);
                if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
            }
    std::vector<int> root_slot(d, -1);
    for (int i = 0; i < d; ++i) {
        if (labels[i] < 0) continue;
        const int r = find(i);
        if (root_slot[r] < 0) {
            root_slot[r] = static_cast<int>(sol.clusters.size());
            sol.clusters.emplace_back();
        }
        sol.clusters[root_slot[r]].push_back(i);
    }
    return sol;
}

}  // namespace jpa
