#include "ccop/experiments.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ccop;
using testutil::vec;

namespace {
const Tolerances kTol = Tolerances::uniform(1e-8);
}

TEST(Perturb, ObjectiveIsShifted) {
    const Problem p = testutil::load("instability.toml");
    const Expr e = perturbed_objective(p, vec({-2, -2}), 0.1);
    EXPECT_NEAR(e.evaluate(vec({1, 2})), 5 - 0.2 - 0.4, 1e-15);
    const Expr s = perturbed_objective(p, vec({-2, -2}), 0.1, 2.0);
    EXPECT_NEAR(s.evaluate(vec({1, 2})), 5 - 0.6 + 0.02, 1e-15);
}

TEST(Perturb, InstabilityBifurcates) {
    const Problem p = testutil::load("instability.toml");
    PerturbConfig pc;
    pc.linear = vec({-2, -2});
    pc.epsilons = {0.1};
    const PerturbReport r = perturb_experiment(p, pc, {}, kTol);
    ASSERT_EQ(r.reference.size(), 1u);
    EXPECT_EQ(r.reference_nondegenerate, 0);
    ASSERT_EQ(r.rows.size(), 1u);
    const PerturbRow& row = r.rows[0];
    ASSERT_EQ(row.points.size(), 3u);
    for (const Eigen::VectorXd& w : {vec({0.1, 0}), vec({0, 0.1}), vec({0, 0})}) {
        bool hit = false;
        for (const auto& q : row.points) hit |= (q.x - w).norm() <= 1e-8;
        EXPECT_TRUE(hit) << w.transpose();
    }
    EXPECT_EQ(row.near_reference, (std::vector<int>{3}));
    EXPECT_EQ(row.nondegenerate_count, 3);
    EXPECT_TRUE(row.bifurcation);
}

TEST(Perturb, ZeroEpsilonReproducesReference) {
    const Problem p = testutil::load("stability.toml");
    PerturbConfig pc;
    pc.linear = vec({1, -1});
    pc.epsilons = {0.0};
    const PerturbReport r = perturb_experiment(p, pc, {}, kTol);
    ASSERT_EQ(r.rows[0].points.size(), r.reference.size());
    for (std::size_t i = 0; i < r.reference.size(); ++i)
        EXPECT_EQ(r.rows[0].points[i].x, r.reference[i].x);
    EXPECT_FALSE(r.rows[0].bifurcation);
}

TEST(Probe, InstabilityIsGenericallyNondegenerate) {
    const Problem p = testutil::load("instability.toml");
    const ProbeReport r = genericity_probe(p, 20, 1e-2, 7, {}, kTol);
    EXPECT_EQ(r.trials, 20);
    EXPECT_EQ(r.nondegenerate_trials, 20);
    EXPECT_DOUBLE_EQ(r.nondegenerate_fraction, 1.0);
    EXPECT_EQ(r.empty_trials, 0);
}

TEST(Probe, ReproducibleForSeed) {
    const Problem p = testutil::load("so_ss.toml");
    const ProbeReport a = genericity_probe(p, 5, 1e-2, 3, {}, kTol);
    const ProbeReport b = genericity_probe(p, 5, 1e-2, 3, {}, kTol);
    EXPECT_EQ(a.points_total, b.points_total);
    EXPECT_EQ(a.nondegenerate_trials, b.nondegenerate_trials);
}
