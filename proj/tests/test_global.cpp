#include "doctest.h"

#include "jpa/global_solver.hpp"
#include "jpa/ljpa.hpp"
#include "jpa/rng.hpp"

#include <cmath>
#include <functional>
#include <random>

using namespace jpa;

namespace {

GlobalInstance direct_instance(int d, int cls, double alpha, double beta,
                               bool single_person = false) {
    GlobalInstance inst;
    inst.num_proposals = d;
    inst.num_classes = cls;
    inst.locations.assign(d, Point2::Zero());
    inst.unary = Mat::Constant(d, cls, alpha);
    inst.pairwise = PairTable<Mat>(d, Mat::Constant(cls, cls, beta));
    inst.single_person = single_person;
    return inst;
}

GlobalInstance random_probability_instance(int d, int cls, std::uint64_t seed,
                                           bool single_person) {
    std::mt19937_64 rng(seed);
    std::vector<Point2> locations(d);
    for (Point2& p : locations) p = Point2(uniform(rng, 0, 64), uniform(rng, 0, 64));
    Mat p_label(d, cls);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < cls; ++j) p_label(i, j) = uniform(rng, 0.05, 0.95);
    PairTable<Mat> p_pair(d, Mat::Zero(cls, cls));
    for (int i = 0; i < d; ++i)
        for (int k = i + 1; k < d; ++k)
            for (int j = 0; j < cls; ++j)
                for (int j2 = 0; j2 < cls; ++j2) p_pair(i, k)(j, j2) = uniform(rng, 0.05, 0.95);
    return build_global_instance(locations, p_label, p_pair, single_person);
}

// Reference optimum: every label assignment crossed with every partition of
// the labeled proposals, each expanded to a full solution and validated.
double enumerate_optimum(const GlobalInstance& inst) {
    const int d = inst.num_proposals;
    const int base = inst.num_classes + 1;
    std::size_t total = 1;
    for (int i = 0; i < d; ++i) total *= base;

    double best = 0.0;
    for (std::size_t it = 0; it < total; ++it) {
        std::size_t v = it;
        std::vector<int> labels(d);
        std::vector<int> labeled;
        for (int i = 0; i < d; ++i) {
            labels[i] = static_cast<int>(v % base) - 1;
            v /= base;
            if (labels[i] >= 0) labeled.push_back(i);
        }
        std::vector<int> block(labeled.size(), 0);
        std::function<void(std::size_t, int)> rec = [&](std::size_t pos, int nblocks) {
            if (pos == labeled.size()) {
                std::vector<std::uint8_t> y(pair_count(d), 0);
                for (std::size_t a = 0; a < labeled.size(); ++a)
                    for (std::size_t b = a + 1; b < labeled.size(); ++b)
                        if (block[a] == block[b]) y[pair_index(d, labeled[a], labeled[b])] = 1;
                const GlobalSolution sol = global_solution_from(inst, labels, y);
                if (!validate_global_solution(inst, sol).empty()) return;
                best = std::min(best, sol.objective);
                return;
            }
            for (int b = 0; b <= nblocks; ++b) {
                block[pos] = b;
                rec(pos + 1, std::max(nblocks, b + 1));
            }
        };
        rec(0, 0);
    }
    return best;
}

bool has_violation(const std::vector<Violation>& vs, const std::string& name) {
    for (const Violation& v : vs)
        if (v.constraint == name) return true;
    return false;
}

void check_z_consistency(const GlobalInstance& inst, const GlobalSolution& sol) {
    const int d = inst.num_proposals;
    const int cls = inst.num_classes;
    for (int i = 0; i < d; ++i)
        for (int k = i + 1; k < d; ++k)
            for (int j = 0; j < cls; ++j)
                for (int j2 = 0; j2 < cls; ++j2) {
                    const int xi = sol.x[static_cast<std::size_t>(i) * cls + j];
                    const int xk = sol.x[static_cast<std::size_t>(k) * cls + j2];
                    const int y = sol.y[pair_index(d, i, k)];
                    CHECK(static_cast<int>(sol.z[z_index(d, cls, i, k, j, j2)]) == xi * xk * y);
                }
}

}  // namespace

TEST_SUITE("global") {

TEST_CASE("instance shape checks") {
    GlobalInstance inst = direct_instance(3, 2, 0.0, 0.0);
    CHECK_NOTHROW(inst.check());
    inst.unary = Mat::Zero(3, 3);
    CHECK_THROWS_AS(inst.check(), DataError);
    inst = direct_instance(3, 2, 0.0, 0.0);
    inst.locations.pop_back();
    CHECK_THROWS_AS(inst.check(), DataError);
    inst = direct_instance(3, 2, 0.0, 0.0);
    inst.pairwise(0, 1) = Mat::Zero(1, 2);
    CHECK_THROWS_AS(inst.check(), DataError);
}

TEST_CASE("interaction index packs pair-major, lower proposal first") {
    const int d = 3, cls = 2;
    CHECK(z_index(d, cls, 0, 1, 0, 0) == 0);
    CHECK(z_index(d, cls, 0, 1, 0, 1) == 1);
    CHECK(z_index(d, cls, 0, 1, 1, 0) == 2);
    CHECK(z_index(d, cls, 0, 2, 0, 0) == static_cast<std::size_t>(cls) * cls);
    // Swapped presentation addresses the same slot with classes swapped.
    CHECK(z_index(d, cls, 1, 0, 0, 1) == z_index(d, cls, 0, 1, 1, 0));
}

TEST_CASE("validator accepts the empty solution") {
    const GlobalInstance inst = direct_instance(3, 2, 1.0, 1.0);
    GlobalSolution sol;
    sol.x.assign(3 * 2, 0);
    sol.y.assign(pair_count(3), 0);
    sol.z.assign(pair_count(3) * 4, 0);
    CHECK(validate_global_solution(inst, sol).empty());
}

TEST_CASE("validator flags two labels on one proposal") {
    const GlobalInstance inst = direct_instance(2, 2, 0.0, 0.0);
    GlobalSolution sol;
    sol.x = {1, 1, 0, 0};
    sol.y.assign(1, 0);
    sol.z.assign(4, 0);
    CHECK(has_violation(validate_global_solution(inst, sol), "multiple_labels"));
}

TEST_CASE("validator flags an interaction without grouping support") {
    const GlobalInstance inst = direct_instance(2, 1, 0.0, 0.0);
    GlobalSolution sol;
    sol.x = {1, 1};
    sol.y = {0};
    sol.z = {1};  // claims a priced pair the grouping does not back
    const auto vs = validate_global_solution(inst, sol);
    CHECK(has_violation(vs, "interaction_without_support"));
}

TEST_CASE("validator flags a missing forced interaction") {
    const GlobalInstance inst = direct_instance(2, 1, 0.0, 0.0);
    GlobalSolution sol;
    sol.x = {1, 1};
    sol.y = {1};
    sol.z = {0};  // labeled and grouped, so the interaction must be on
    CHECK(has_violation(validate_global_solution(inst, sol), "interaction_forced_off"));
}

TEST_CASE("validator flags grouping of unlabeled proposals and intransitive grouping") {
    const GlobalInstance inst = direct_instance(3, 1, 0.0, 0.0);
    GlobalSolution sol;
    sol.x = {0, 1, 1};
    sol.y.assign(3, 0);
    sol.y[pair_index(3, 0, 1)] = 1;
    sol.z.assign(3, 0);
    CHECK(has_violation(validate_global_solution(inst, sol), "grouping_without_label"));

    sol.x = {1, 1, 1};
    sol.y = {1, 0, 1};  // (0,1) and (1,2) grouped, (0,2) not
    sol.z = {1, 0, 1};
    CHECK(has_violation(validate_global_solution(inst, sol), "grouping_not_transitive"));
}

TEST_CASE("cost conversion is the clamped log-odds") {
    std::vector<Point2> locs(1, Point2::Zero());
    Mat p(1, 1);
    p(0, 0) = 0.5;
    GlobalInstance inst = build_global_instance(locs, p, PairTable<Mat>(1), false);
    CHECK(inst.unary(0, 0) == 0.0);

    p(0, 0) = 0.9;
    inst = build_global_instance(locs, p, PairTable<Mat>(1), false);
    CHECK(inst.unary(0, 0) == doctest::Approx(-2.1972245773362196).epsilon(1e-15));

    // Complementary pair probabilities negate the pair costs.
    std::vector<Point2> locs2(2, Point2::Zero());
    const Mat labels = Mat::Constant(2, 1, 0.5);
    PairTable<Mat> p_pair(2, Mat::Constant(1, 1, 0.8));
    PairTable<Mat> p_comp(2, Mat::Constant(1, 1, 0.2));
    const GlobalInstance a = build_global_instance(locs2, labels, p_pair, false);
    const GlobalInstance b = build_global_instance(locs2, labels, p_comp, false);
    CHECK(a.pairwise(0, 1)(0, 0) == doctest::Approx(-b.pairwise(0, 1)(0, 0)).epsilon(1e-15));

    // Extreme probabilities stay finite through the clamp.
    Mat extreme(1, 1);
    extreme(0, 0) = 1.0;
    const GlobalInstance c = build_global_instance(locs, extreme, PairTable<Mat>(1), false);
    CHECK(std::isfinite(c.unary(0, 0)));
}

TEST_CASE("solution assembly derives interactions and clusters from labels") {
    const GlobalInstance inst = direct_instance(4, 2, -1.0, -0.5);
    const std::vector<int> labels = {1, -1, 0, 0};
    std::vector<std::uint8_t> y(pair_count(4), 0);
    y[pair_index(4, 2, 3)] = 1;
    const GlobalSolution sol = global_solution_from(inst, labels, y);

    CHECK(validate_global_solution(inst, sol).empty());
    check_z_consistency(inst, sol);
    CHECK(sol.label_of(0, 2) == 1);
    CHECK(sol.label_of(1, 2) == -1);
    CHECK(sol.label_of(2, 2) == 0);
    REQUIRE(sol.clusters.size() == 2);
    CHECK(sol.clusters[0] == std::vector<int>{0});
    CHECK(sol.clusters[1] == std::vector<int>{2, 3});
    // alpha(0,1) + alpha(2,0) + alpha(3,0) + beta(2,3)(0,0)
    CHECK(sol.objective == doctest::Approx(-3.5).epsilon(1e-12));
}

TEST_CASE("all-costly instance suppresses everything") {
    const GlobalInstance inst = direct_instance(4, 2, 1.0, 1.0);
    const GlobalSolution sol = solve_global_exact(inst);
    CHECK(sol.objective == 0.0);
    CHECK(sol.clusters.empty());
    for (std::uint8_t v : sol.x) CHECK(v == 0);
}

TEST_CASE("two attractive proposals under a one-person constraint form one cluster") {
    const GlobalInstance inst = direct_instance(2, 1, -1.0, -1.0, true);
    const GlobalSolution sol = solve_global_exact(inst);
    CHECK(sol.objective == doctest::Approx(-3.0).epsilon(1e-12));
    CHECK(sol.x == std::vector<std::uint8_t>{1, 1});
    CHECK(sol.y == std::vector<std::uint8_t>{1});
    CHECK(sol.z == std::vector<std::uint8_t>{1});
    REQUIRE(sol.clusters.size() == 1);
    CHECK(sol.clusters[0] == std::vector<int>{0, 1});
}

TEST_CASE("repulsive pair costs split clusters when multiple persons are allowed") {
    GlobalInstance inst = direct_instance(2, 1, -1.0, 5.0, false);
    GlobalSolution sol = solve_global_exact(inst);
    CHECK(sol.objective == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(sol.clusters.size() == 2);

    inst = direct_instance(2, 1, -1.0, -5.0, false);
    sol = solve_global_exact(inst);
    CHECK(sol.objective == doctest::Approx(-7.0).epsilon(1e-12));
    CHECK(sol.clusters.size() == 1);
}

TEST_CASE("solver matches full constrained enumeration") {
    for (int rep = 0; rep < 8; ++rep) {
        const int d = 2 + rep % 4;           // up to 5 proposals
        const int cls = 1 + rep % 2;         // up to 2 classes
        const bool single = rep % 3 == 0;
        const GlobalInstance inst = random_probability_instance(d, cls, mix_seed(17, rep), single);
        const GlobalSolution sol = solve_global_exact(inst);
        CHECK(validate_global_solution(inst, sol).empty());
        check_z_consistency(inst, sol);
        CHECK(std::abs(sol.objective - enumerate_optimum(inst)) <= 1e-9);
        CHECK(sol.objective == doctest::Approx(global_objective(inst, sol)).epsilon(1e-12));
    }
}

TEST_CASE("pre-typed one-person instances match the per-person solver") {
    for (int rep = 0; rep < 6; ++rep) {
        std::mt19937_64 rng(mix_seed(23, rep));
        const int d = 3 + rep % 4;  // up to 6 proposals
        const int cls = 1 + rep % 3;

        AssociationInstance local;
        local.detections.resize(d);
        local.unary = Vec(d);
        local.pairwise = PairTable<double>(d);
        Mat p_label = Mat::Constant(d, cls, kProbEpsilon);
        PairTable<Mat> p_pair(d, Mat::Constant(cls, cls, kProbEpsilon));
        std::vector<Point2> locs(d, Point2::Zero());
        std::vector<int> type(d);
        for (int i = 0; i < d; ++i) {
            type[i] = static_cast<int>(uniform01(rng) * cls) % cls;
            const double conf = uniform(rng, 0.05, 0.95);
            local.detections[i] = {i, joint_from_index(type[i]), Point2::Zero(), conf};
            local.unary(i) = std::log((1.0 - conf) / conf);
            p_label(i, type[i]) = conf;
        }
        for (int i = 0; i < d; ++i) {
            for (int k = i + 1; k < d; ++k) {
                const double p = uniform(rng, 0.05, 0.95);
                local.pairwise(i, k) = std::log((1.0 - p) / p);
                p_pair(i, k)(type[i], type[k]) = p;
            }
        }

        const GlobalInstance global = build_global_instance(locs, p_label, p_pair, true);
        const double got = solve_global_exact(global).objective;
        const double want = solve_exact(local).objective;
        CHECK(std::abs(got - want) <= 1e-9);
    }
}

TEST_CASE("size caps are enforced") {
    CHECK_THROWS_AS(solve_global_exact(direct_instance(kGlobalProposalCap + 1, 2, -1.0, 0.0)),
                    InstanceTooLargeError);
    CHECK_THROWS_AS(solve_global_exact(direct_instance(2, kGlobalClassCap + 1, -1.0, 0.0)),
                    InstanceTooLargeError);
}

}  // TEST_SUITE
