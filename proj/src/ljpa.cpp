#include "jpa/ljpa.hpp"

#include <algorithm>
#include <numeric>

namespace jpa {

QuboForm reduce_to_qubo(const AssociationInstance& inst) {
    inst.check();
    return QuboForm{inst.unary, inst.pairwise};
}

double selection_objective(const AssociationInstance& inst, const std::vector<std::uint8_t>& x) {
    const int d = inst.size();
    double obj = 0.0;
    for (int i = 0; i < d; ++i)
        if (x[i]) obj += inst.unary(i);
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j)
            if (x[i] && x[j]) obj += inst.pairwise(i, j);
    return obj;
}

AssociationSolution solve_bruteforce(const AssociationInstance& inst) {
    inst.check();
    const int d = inst.size();
    if (d > 20)
        throw InstanceTooLargeError("brute force refuses " + std::to_string(d) +
                                    " detections (limit 20)");

    std::vector<std::uint8_t> best(d, 0), cur(d, 0);
    double best_obj = 0.0;  // all-zeros selection
    // Masks ascend with bit 0 = detection 0; lexicographic comparison on the
    // x vector (detection 0 most significant) picks ties deterministically.
    for (std::uint64_t mask = 1; mask < (1ULL << d); ++mask) {
        for (int i = 0; i < d; ++i) cur[i] = (mask >> i) & 1;
        const double obj = selection_objective(inst, cur);
        if (obj < best_obj || (obj == best_obj && cur < best)) {
            best_obj = obj;
            best = cur;
        }
    }
    return solution_from_selection(inst, best);
}

namespace {

/// Shared state of one branch-and-bound run over the reduced form.
///
/// Incremental per-detection state, both indexed by detection id:
///   on_cost[d] = alpha_d plus beta to every bit already fixed on
///   half[d]    = half of min(0, beta) summed over the other free bits
/// A completion S of the free set costs sum_{d in S} on_cost[d] plus the
/// beta of pairs inside S; each such pair splits evenly onto its two
/// endpoints, and half[d] lower-bounds any endpoint's share. Hence
///   fixed_cost + sum_{d free} min(0, on_cost[d] + half[d])
/// is admissible. Splitting per endpoint (rather than one floor per pair)
/// is what keeps weak candidates prunable: a bit with positive on_cost and
/// no strongly negative partners contributes exactly nothing.
struct BnB {
    const AssociationInstance& inst;
    int d;
    std::vector<int> order;  // branch order, position -> detection
    std::vector<std::uint8_t> assign;  // by detection index
    std::vector<std::uint8_t> best;
    std::vector<double> on_cost;
    std::vector<double> half;
    double best_obj;
    double slack;  // absorbs float drift in incremental bounds

    explicit BnB(const AssociationInstance& in) : inst(in), d(in.size()) {}

    void init_costs() {
        on_cost.resize(d);
        half.assign(d, 0.0);
        for (int i = 0; i < d; ++i) on_cost[i] = inst.unary(i);
        for (int i = 0; i < d; ++i)
            for (int j = i + 1; j < d; ++j) {
                const double floor = 0.5 * std::min(0.0, inst.pairwise(i, j));
                half[i] += floor;
                half[j] += floor;
            }
    }

    void dfs(int pos, double fixed_cost) {
        if (pos == d) {
            // Exact canonical recomputation, so mathematical ties compare
            // equal regardless of incremental drift.
            const double obj = selection_objective(inst, assign);
            if (obj < best_obj || (obj == best_obj && assign < best)) {
                best_obj = obj;
                best = assign;
            }
            return;
        }
        double bound = fixed_cost;
        for (int q = pos; q < d; ++q) {
            const int det = order[q];
            bound += std::min(0.0, on_cost[det] + half[det]);
        }
        if (bound > best_obj + slack) return;

        const int det = order[pos];
        for (int q = pos + 1; q < d; ++q) {
            const int o = order[q];
            half[o] -= 0.5 * std::min(0.0, inst.pairwise(det, o));
        }
        const double det_on = on_cost[det];

        // Try the cheaper branch first so the incumbent tightens early.
        const std::uint8_t first = det_on < 0.0 ? 1 : 0;
        for (const std::uint8_t v : {first, static_cast<std::uint8_t>(1 - first)}) {
            assign[det] = v;
            if (v) {
                for (int q = pos + 1; q < d; ++q)
                    on_cost[order[q]] += inst.pairwise(det, order[q]);
                dfs(pos + 1, fixed_cost + det_on);
                for (int q = pos + 1; q < d; ++q)
                    on_cost[order[q]] -= inst.pairwise(det, order[q]);
            } else {
                dfs(pos + 1, fixed_cost);
            }
        }
        assign[det] = 0;
        for (int q = pos + 1; q < d; ++q) {
            const int o = order[q];
            half[o] += 0.5 * std::min(0.0, inst.pairwise(det, o));
        }
    }
};

}  // namespace

AssociationSolution solve_exact(const AssociationInstance& inst) {
    inst.check();
    const int d = inst.size();
    if (d > kLocalSolverCap)
        throw InstanceTooLargeError("association instance has " + std::to_string(d) +
                                    " detections (limit " + std::to_string(kLocalSolverCap) +
                                    "); lower the candidate count or raise the threshold");
    if (d == 0) return solution_from_selection(inst, {});

    BnB state(inst);
    state.order.resize(d);
    std::iota(state.order.begin(), state.order.end(), 0);
    std::stable_sort(state.order.begin(), state.order.end(), [&](int a, int b) {
        return std::abs(inst.unary(a)) > std::abs(inst.unary(b));
    });
    state.init_costs();

    // Greedy seed in branch order, then single-flip descent.
    std::vector<std::uint8_t> seed(d, 0);
    for (int pos = 0; pos < d; ++pos) {
        const int det = state.order[pos];
        double marginal = inst.unary(det);
        for (int other = 0; other < d; ++other)
            if (other != det && seed[other]) marginal += inst.pairwise(det, other);
        if (marginal < 0.0) seed[det] = 1;
    }
    bool improved = true;
    double seed_obj = selection_objective(inst, seed);
    while (improved) {
        improved = false;
        for (int i = 0; i < d; ++i) {
            seed[i] ^= 1;
            const double obj = selection_objective(inst, seed);
            if (obj < seed_obj) {
                seed_obj = obj;
                improved = true;
            } else {
                seed[i] ^= 1;
            }
        }
    }

    state.assign.assign(d, 0);
    state.best = seed;
    state.best_obj = seed_obj;
    double scale = 1.0;
    for (int i = 0; i < d; ++i) scale = std::max(scale, std::abs(inst.unary(i)));
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) scale = std::max(scale, std::abs(inst.pairwise(i, j)));
    state.slack = 1e-12 * scale * d;
    state.dfs(0, 0.0);

    return solution_from_selection(inst, state.best);
}

PersonPose extract_pose(const AssociationInstance& inst, const AssociationSolution& sol,
                        const Box& region) {
    inst.check();
    if (static_cast<int>(sol.x.size()) != inst.size())
        throw DataError("solution does not match instance");
    PersonPose pose;
    std::array<int, kJointCount> pick;
    pick.fill(-1);
    for (int i = 0; i < inst.size(); ++i) {
        if (!sol.x[i]) continue;
        const Detection& det = inst.detections[i];
        const int j = joint_index(det.joint);
        if (pick[j] < 0) {
            pick[j] = i;
            continue;
        }
        const Detection& cur = inst.detections[pick[j]];
        if (det.confidence > cur.confidence ||
            (det.confidence == cur.confidence && det.id < cur.id))
            pick[j] = i;
    }
    for (int j = 0; j < kJointCount; ++j) {
        if (pick[j] < 0) continue;
        const Detection& det = inst.detections[pick[j]];
        pose.set(joint_from_index(j),
                 det.location + Point2(static_cast<double>(region.x0), static_cast<double>(region.y0)),
                 det.confidence);
    }
    return pose;
}

}  // namespace jpa
