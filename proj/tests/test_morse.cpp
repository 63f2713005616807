#include "ccop/error.hpp"
#include "ccop/morse.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ccop;
using testutil::vec;

namespace {

const Tolerances kTol = Tolerances::uniform(1e-8);

struct Solved {
    std::vector<MStationaryPair> points;
    std::vector<Classification> classes;
};

Solved solve(const Problem& p) {
    Solved s;
    s.points = solve_all(p, {}, kTol).points;
    for (const auto& pt : s.points) s.classes.push_back(classify(p, pt, kTol));
    return s;
}

}  // namespace

TEST(Morse, Binomial) {
    EXPECT_EQ(binomial(5, 2), 10);
    EXPECT_EQ(binomial(4, 0), 1);
    EXPECT_EQ(binomial(3, 4), 0);
    EXPECT_EQ(binomial(0, 0), 1);
}

TEST(Morse, ComponentsOfStabilityCompact) {
    const Problem p = testutil::load("stability_compact.toml");
    EXPECT_EQ(lower_level_components(p, 0.5, 201, kTol).components, 0);
    EXPECT_EQ(lower_level_components(p, 1.5, 201, kTol).components, 2);
    EXPECT_EQ(lower_level_components(p, 2.5, 201, kTol).components, 1);
}

TEST(Morse, RequiresCompactFlag) {
    const Problem p = testutil::load("stability.toml");
    EXPECT_THROW(lower_level_components(p, 1.0, 51, kTol), PreconditionError);
    EXPECT_THROW(mountain_pass_check(p, {}), PreconditionError);
}

TEST(Morse, PredictedDeltas) {
    const Problem p = testutil::load("stability_compact.toml");
    const Solved s = solve(p);
    ASSERT_EQ(s.points.size(), 3u);
    std::string rule;
    EXPECT_EQ(predicted_deltas(p, s.classes[0].nd, &rule), (std::vector<int>{-1, 0}));
    EXPECT_EQ(rule, "index 1 with k = s-1");
    EXPECT_EQ(predicted_deltas(p, s.classes[1].nd, &rule), (std::vector<int>{1}));
    EXPECT_EQ(rule, "minimizer");
}

TEST(Morse, AttachedCells) {
    const Problem p = testutil::load("stability_compact.toml");
    const Solved s = solve(p);
    const CellAttachment origin = attached_cells(p, s.classes[0].nd);
    EXPECT_EQ(origin.count, 1);  // binom(n-k-1, s-k) = binom(1, 1)
    EXPECT_EQ(origin.dim, 1);
    const CellAttachment minimum = attached_cells(p, s.classes[1].nd);
    EXPECT_EQ(minimum.count, 1);
    EXPECT_EQ(minimum.dim, 0);
    const Problem eq = testutil::load("equality.toml");
    for (const auto& c : solve(eq).classes) {
        const CellAttachment a = attached_cells(eq, c.nd);
        EXPECT_GE(a.count, 1);
        EXPECT_EQ(static_cast<long long>(a.count), binomial(eq.n() - c.nd.k - 1, eq.s() - c.nd.k));
        EXPECT_EQ(a.dim, *c.nd.m_index);
    }
}

TEST(Morse, LevelSweepOnExplicitLevels) {
    const Problem p = testutil::load("stability_compact.toml");
    const Solved s = solve(p);
    const LevelSweepReport r =
        level_sweep(p, s.points, s.classes, 201, kTol, std::vector<double>{0.5, 1.5, 2.5});
    EXPECT_EQ(r.beta0, (std::vector<int>{0, 2, 1}));
    EXPECT_FALSE(r.violations);
    EXPECT_TRUE(r.deformation_ok);
    ASSERT_EQ(r.crossings.size(), 2u);
    EXPECT_EQ(r.crossings[0].observed, 2);
    EXPECT_TRUE(r.crossings[0].indeterminate);  // both minima sit at f = 1
    EXPECT_TRUE(r.crossings[0].ok);
    EXPECT_EQ(r.crossings[1].observed, -1);
    EXPECT_TRUE(r.crossings[1].ok);
    EXPECT_FALSE(r.crossings[1].indeterminate);
}

TEST(Morse, AutoLevelsBracketEveryValue) {
    const Problem p = testutil::load("instability_perturbed_compact.toml");
    const Solved s = solve(p);
    ASSERT_EQ(s.points.size(), 3u);
    const LevelSweepReport r = level_sweep(p, s.points, s.classes, 201, kTol);
    EXPECT_TRUE(r.unbracketed.empty());
    EXPECT_TRUE(r.deformation_ok);
    EXPECT_FALSE(r.violations);
    for (const auto& c : r.crossings) EXPECT_TRUE(c.ok) << c.value;
}

TEST(Morse, MountainPass) {
    const Problem p = testutil::load("stability_compact.toml");
    const MountainPass mp = mountain_pass_check(p, solve(p).classes);
    EXPECT_EQ(mp.r, 2);
    EXPECT_EQ(mp.r1, 0);
    EXPECT_EQ(mp.r2, 1);
    EXPECT_EQ(mp.lhs, 1);
    EXPECT_EQ(mp.rhs, 1);
    EXPECT_TRUE(mp.holds);
    const Problem q = testutil::load("instability_perturbed_compact.toml");
    const MountainPass mq = mountain_pass_check(q, solve(q).classes);
    EXPECT_EQ(mq.r, 2);
    EXPECT_EQ(mq.r2, 1);
    EXPECT_TRUE(mq.holds);
}

TEST(Morse, DegeneratePointRefused) {
    const Problem p = parse_problem(
        "n = 2\ns = 1\nobjective = \"x1^2 + x2^2\"\ninequalities = [\"4 - x1^2 - x2^2\"]\n"
        "box = [[-3, 3], [-3, 3]]\ncompact_feasible = true\n");
    EXPECT_THROW(mountain_pass_check(p, solve(p).classes), PreconditionError);
}

TEST(Morse, GridRefinementKeepsCounts) {
    const Problem p = testutil::load("instability_perturbed_compact.toml");
    for (double level : {-0.005, 0.005, 0.5, 2.0})
        EXPECT_EQ(lower_level_components(p, level, 201, kTol).components,
                  lower_level_components(p, level, 401, kTol).components)
            << level;
}
