#include "jpa/global_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace jpa {

namespace {

double log_odds(double p) {
    p = std::clamp(p, kProbEpsilon, 1.0 - kProbEpsilon);
    return std::log((1.0 - p) / p);
}

}  // namespace

GlobalInstance build_global_instance(const std::vector<Point2>& proposals, const Mat& p_label,
                                     const PairTable<Mat>& p_pair, bool single_person) {
    GlobalInstance inst;
    inst.num_proposals = static_cast<int>(proposals.size());
    inst.num_classes = static_cast<int>(p_label.cols());
    inst.locations = proposals;
    inst.single_person = single_person;
    inst.unary = p_label.unaryExpr([](double p) { return log_odds(p); });
    inst.pairwise = PairTable<Mat>(inst.num_proposals);
    for (int i = 0; i < inst.num_proposals; ++i)
        for (int k = i + 1; k < inst.num_proposals; ++k)
            inst.pairwise(i, k) = p_pair(i, k).unaryExpr([](double p) { return log_odds(p); });
    inst.check();
    return inst;
}

namespace {

/// Optimal labeling of one cluster: every member must take a class, every
/// inside pair pays its cost. Holds the minimum and the tie-broken labels.
struct ClusterCost {
    double cost = 0.0;
    std::vector<int> labels;  // by member position, ascending proposal id
};

/// Rank of a proposal's one-hot label row in lexicographic row order:
/// the unlabeled all-zeros row is smallest, then rows by descending class
/// index (a lower class sets an earlier bit, making the row larger).
int row_rank(int label, int num_classes) {
    return label < 0 ? 0 : num_classes - label;
}

/// Lex order over cluster labelings in one-hot row semantics: prefer the
/// higher class index at the first differing member.
bool labels_lex_less(const std::vector<int>& a, const std::vector<int>& b) {
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] != b[i]) return a[i] > b[i];
    return false;
}

class ClusterLabeler {
  public:
    ClusterLabeler(const GlobalInstance& inst, double slack) : inst_(inst), slack_(slack) {
        pair_floor_ = PairTable<double>(std::max(inst.num_proposals, 2));
        for (int i = 0; i < inst.num_proposals; ++i)
            for (int k = i + 1; k < inst.num_proposals; ++k)
                pair_floor_(i, k) = inst.pairwise(i, k).minCoeff();
    }

    ClusterCost solve(const std::vector<int>& members) {
        members_ = &members;
        labels_.assign(members.size(), 0);
        best_.cost = std::numeric_limits<double>::infinity();
        best_.labels.clear();
        dfs(0, 0.0);
        return best_;
    }

  private:
    void dfs(int pos, double partial) {
        const auto& m = *members_;
        const int n = static_cast<int>(m.size());
        if (pos == n) {
            if (partial < best_.cost ||
                (partial == best_.cost && labels_lex_less(labels_, best_.labels))) {
                best_.cost = partial;
                best_.labels = labels_;
            }
            return;
        }
        // Every free member must take a class and pay all pairs to fixed
        // members; free pairs pay at least their floor.
        double bound = partial;
        for (int q = pos; q < n; ++q) {
            double member_best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < inst_.num_classes; ++j) {
                double c = inst_.unary(m[q], j);
                for (int p = 0; p < pos; ++p) c += inst_.pairwise(m[p], m[q])(labels_[p], j);
                member_best = std::min(member_best, c);
            }
            bound += member_best;
            for (int r = pos; r < q; ++r) bound += pair_floor_(m[r], m[q]);
        }
        if (bound > best_.cost + slack_) return;

        for (int j = 0; j < inst_.num_classes; ++j) {
            double c = inst_.unary(m[pos], j);
            for (int p = 0; p < pos; ++p) c += inst_.pairwise(m[p], m[pos])(labels_[p], j);
            labels_[pos] = j;
            dfs(pos + 1, partial + c);
        }
        labels_[pos] = 0;
    }

    const GlobalInstance& inst_;
    double slack_;
    PairTable<double> pair_floor_;
    const std::vector<int>* members_ = nullptr;
    std::vector<int> labels_;
    ClusterCost best_;
};

}  // namespace

GlobalSolution solve_global_exact(const GlobalInstance& inst) {
    inst.check();
    const int d = inst.num_proposals;
    const int cls = inst.num_classes;
    if (d > kGlobalProposalCap || cls > kGlobalClassCap)
        throw InstanceTooLargeError("global instance " + std::to_string(d) + " proposals x " +
                                    std::to_string(cls) + " classes exceeds the exact-solver cap " +
                                    std::to_string(kGlobalProposalCap) + "x" +
                                    std::to_string(kGlobalClassCap));

    double scale = 1.0;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < cls; ++j) scale = std::max(scale, std::abs(inst.unary(i, j)));
    for (int i = 0; i < d; ++i)
        for (int k = i + 1; k < d; ++k)
            scale = std::max(scale, inst.pairwise(i, k).cwiseAbs().maxCoeff());
    const double slack = 1e-12 * scale * std::max(1, d);

    // Cluster costs depend only on the member set, so they are shared by
    // every partition containing the cluster; memoize per member mask.
    ClusterLabeler labeler(inst, slack);
    std::vector<ClusterCost> cluster_cost(std::size_t(1) << d);
    std::vector<std::uint8_t> cluster_done(std::size_t(1) << d, 0);
    auto cluster = [&](std::uint32_t mask) -> const ClusterCost& {
        if (!cluster_done[mask]) {
            std::vector<int> members;
            for (int i = 0; i < d; ++i)
                if (mask & (1u << i)) members.push_back(i);
            cluster_cost[mask] = labeler.solve(members);
            cluster_done[mask] = 1;
        }
        return cluster_cost[mask];
    };

    // Incumbent. The empty solution (everything suppressed) costs 0, is
    // feasible, and is the lexicographic minimum, so it seeds the search.
    std::vector<int> best_labels(d, -1);
    std::vector<std::uint8_t> best_grouping(pair_count(d), 0);
    double best_obj = 0.0;

    std::vector<std::uint32_t> blocks;  // cluster masks of the current partition
    std::vector<int> member_list;
    std::vector<std::uint32_t> sorted_blocks;

    // Leaf objective accumulated over block masks in ascending order, so
    // the same partition always produces the same float.
    auto leaf_objective = [&]() {
        sorted_blocks = blocks;
        std::sort(sorted_blocks.begin(), sorted_blocks.end());
        double obj = 0.0;
        for (const std::uint32_t mask : sorted_blocks) obj += cluster(mask).cost;
        return obj;
    };

    auto consider = [&]() {
        const double obj = leaf_objective();
        if (obj > best_obj) return;
        // Materialize labels and grouping for the current partition.
        std::vector<int> labels(d, -1);
        std::vector<std::uint8_t> grouping(pair_count(d), 0);
        for (const std::uint32_t mask : blocks) {
            const ClusterCost& cc = cluster(mask);
            int pos = 0;
            for (int i = 0; i < d; ++i)
                if (mask & (1u << i)) labels[i] = cc.labels[pos++];
        }
        for (const std::uint32_t mask : blocks)
            for (int i = 0; i < d; ++i)
                for (int k = i + 1; k < d; ++k)
                    if ((mask & (1u << i)) && (mask & (1u << k)))
                        grouping[pair_index(d, i, k)] = 1;
        bool better = obj < best_obj;
        if (!better) {  // exact tie: lexicographic on x rows, then on y
            for (int i = 0; i < d; ++i) {
                const int a = row_rank(labels[i], cls);
                const int b = row_rank(best_labels[i], cls);
                if (a == b) continue;
                if (a < b) better = true;
                break;
            }
            if (!better && labels == best_labels && grouping < best_grouping) better = true;
        }
        if (better) {
            best_obj = obj;
            best_labels = std::move(labels);
            best_grouping = std::move(grouping);
        }
    };

    // Partition the members of each labeled subset by restricted growth:
    // every member joins an existing block or opens a new one, so each set
    // partition appears exactly once.
    auto partitions = [&](auto&& self, std::size_t pos) -> void {
        if (pos == member_list.size()) {
            consider();
            return;
        }
        const std::uint32_t bit = 1u << member_list[pos];
        if (inst.single_person && !blocks.empty()) {
            blocks[0] |= bit;  // everything labeled shares the one block
            self(self, pos + 1);
            blocks[0] &= ~bit;
            return;
        }
        for (std::size_t b = 0; b < blocks.size(); ++b) {
            blocks[b] |= bit;
            self(self, pos + 1);
            blocks[b] &= ~bit;
        }
        blocks.push_back(bit);
        self(self, pos + 1);
        blocks.pop_back();
    };

    // Enumerate labeled subsets, cheapest-possible first is unnecessary at
    // this scale; a static admissible bound discards hopeless subsets.
    for (std::uint32_t subset = 0; subset < (1u << d); ++subset) {
        member_list.clear();
        for (int i = 0; i < d; ++i)
            if (subset & (1u << i)) member_list.push_back(i);
        double floor = 0.0;
        for (std::size_t a = 0; a < member_list.size(); ++a) {
            floor += inst.unary.row(member_list[a]).minCoeff();
            for (std::size_t b = 0; b < a; ++b)
                floor +=
                    std::min(0.0, inst.pairwise(member_list[b], member_list[a]).minCoeff());
        }
        if (floor > best_obj + slack) continue;
        blocks.clear();
        partitions(partitions, 0);
    }

    return global_solution_from(inst, best_labels, best_grouping);
}

}  // namespace jpa
