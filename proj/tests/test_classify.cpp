#include "ccop/classify.hpp"
#include "ccop/error.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ccop;
using testutil::vec;

namespace {

const Tolerances kTol = Tolerances::uniform(1e-8);

MStationaryPair point_at(const Problem& p, const Eigen::VectorXd& x) {
    const StationarityVerdict v = check_m_stationarity(p, x, kTol);
    EXPECT_TRUE(v.yes) << v.reason;
    return *v.pair;
}

}  // namespace

TEST(Tri, Band) {
    EXPECT_EQ(decide_positive(1.0, 1e-8), Tri::holds);
    EXPECT_EQ(decide_positive(1e-9, 1e-8), Tri::fails);
    EXPECT_EQ(decide_positive(-1.0, 1e-8), Tri::fails);
    EXPECT_EQ(decide_positive(5e-8, 1e-8), Tri::indeterminate);
    EXPECT_EQ(tri_and({Tri::holds, Tri::indeterminate}), Tri::indeterminate);
    EXPECT_EQ(tri_and({Tri::indeterminate, Tri::fails}), Tri::fails);
    EXPECT_EQ(tri_and({Tri::holds, Tri::holds}), Tri::holds);
    EXPECT_EQ(to_string(Tri::indeterminate), "indeterminate");
}

TEST(Nondegeneracy, InstabilityOriginFailsNd3) {
    const Problem p = testutil::load("instability.toml");
    const MStationaryPair pair = point_at(p, vec({0, 0}));
    const Nondegeneracy nd = check_nondegeneracy(p, pair, kTol);
    EXPECT_EQ(nd.nd1, Tri::holds);
    EXPECT_EQ(nd.nd3, Tri::fails);
    EXPECT_EQ(nd.nondegenerate, Tri::fails);
    EXPECT_FALSE(nd.m_index.has_value());
    EXPECT_THROW(is_local_min_nd(p, pair, kTol), PreconditionError);
}

TEST(Nondegeneracy, StabilityPoints) {
    const Problem p = testutil::load("stability.toml");
    const Nondegeneracy o = check_nondegeneracy(p, point_at(p, vec({0, 0})), kTol);
    EXPECT_EQ(o.nondegenerate, Tri::holds);
    EXPECT_EQ(o.k, 0);
    EXPECT_EQ(o.qi, 0);
    EXPECT_EQ(o.m_index, 1);
    const MStationaryPair m = point_at(p, vec({1, 0}));
    const Nondegeneracy a = check_nondegeneracy(p, m, kTol);
    EXPECT_EQ(a.m_index, 0);
    EXPECT_EQ(a.tangent_dim, 1);
    EXPECT_EQ(a.tangent_inertia, (Inertia{1, 0, 0}));
    EXPECT_TRUE(is_local_min_nd(p, m, kTol));
    EXPECT_FALSE(is_local_min_nd(p, point_at(p, vec({0, 0})), kTol));
}

TEST(Nondegeneracy, SoSsFailsStrictComplementarity) {
    const Problem p = testutil::load("so_ss.toml");
    const MStationaryPair pair = point_at(p, vec({1, 1, 0}));
    const Nondegeneracy nd = check_nondegeneracy(p, pair, kTol);
    EXPECT_EQ(nd.nd1, Tri::holds);
    EXPECT_EQ(nd.nd2, Tri::fails);
    EXPECT_EQ(nd.nondegenerate, Tri::fails);
    EXPECT_TRUE(positive_multipliers(p, pair, kTol).empty());
}

TEST(Nondegeneracy, SaddleWithinSupportHasQuadraticIndex) {
    const Problem p = parse_problem(
        "n = 3\ns = 2\nobjective = \"x1^2 - x2^2 + x3^2 + x1 + x2 + x3\"\nbox = [[-3, 3], [-3, 3], [-3, 3]]\n");
    const MStationaryPair pair = point_at(p, vec({-0.5, 0.5, 0}));
    const Nondegeneracy nd = check_nondegeneracy(p, pair, kTol);
    EXPECT_EQ(nd.nondegenerate, Tri::holds);
    EXPECT_EQ(nd.qi, 1);
    EXPECT_EQ(nd.m_index, 1);
}

TEST(StrongStability, SoSsWitness) {
    const Problem p = testutil::load("so_ss.toml");
    const MStationaryPair pair = point_at(p, vec({1, 1, 0}));
    const Eigen::MatrixXd H = lagrangian_hessian(p, pair);
    Eigen::MatrixXd want(3, 3);
    want << 2, 3, 0,  //
        3, 2, 0,      //
        0, 0, 2;
    EXPECT_EQ(H, want);
    const StrongStability ss = check_strong_stability(p, pair, kTol);
    EXPECT_EQ(ss.status, Status::fails);
    ASSERT_TRUE(ss.witness.has_value());
    EXPECT_TRUE(ss.witness->first.empty());
    EXPECT_TRUE(ss.witness->second == std::vector<int>{0} || ss.witness->second == std::vector<int>{1});
    ASSERT_EQ(ss.family.size(), 4u);
    EXPECT_EQ(ss.family[0].dim, 2);
    EXPECT_EQ(ss.family[0].inertia, (Inertia{1, 1, 0}));
    EXPECT_EQ(ss.family[0].det_sign, -1);
    EXPECT_EQ(ss.family[1].det_sign, 1);
    EXPECT_EQ(check_ss_minimizer(p, pair, kTol).status, Status::precondition_unmet);
}

TEST(StrongStability, StabilityFixture) {
    const Problem p = testutil::load("stability.toml");
    const MStationaryPair o = point_at(p, vec({0, 0}));
    EXPECT_EQ(check_strong_stability(p, o, kTol).status, Status::holds);
    EXPECT_EQ(check_ss_minimizer(p, o, kTol).status, Status::fails);
    const MStationaryPair m = point_at(p, vec({0, 1}));
    EXPECT_EQ(check_strong_stability(p, m, kTol).status, Status::holds);
    EXPECT_EQ(check_ss_minimizer(p, m, kTol).status, Status::holds);
}

TEST(StrongStability, InstabilityFailsThroughNd3) {
    const Problem p = testutil::load("instability.toml");
    const StrongStability ss = check_strong_stability(p, point_at(p, vec({0, 0})), kTol);
    EXPECT_EQ(ss.status, Status::fails);
    EXPECT_FALSE(ss.witness.has_value());
}

TEST(StrongStability, LicqFailureIsHypothesisUnmet) {
    const Problem p = parse_problem(
        "n = 2\ns = 1\nobjective = \"(x1 - 1)^2 + x2^2\"\ninequalities = [\"x1\", \"2*x1\"]\n"
        "box = [[-3, 3], [-3, 3]]\n");
    const MStationaryPair pair = point_at(p, vec({1, 0}));
    EXPECT_EQ(check_strong_stability(p, pair, kTol).status, Status::holds);
    const Problem q = parse_problem(
        "n = 2\ns = 1\nobjective = \"(x1 + 1)^2 + x2^2\"\ninequalities = [\"x1\", \"2*x1\"]\n"
        "box = [[-3, 3], [-3, 3]]\n");
    const StationarityVerdict v = check_m_stationarity(q, vec({0, 0}), kTol);
    ASSERT_TRUE(v.yes) << v.reason;
    EXPECT_EQ(check_strong_stability(q, *v.pair, kTol).status, Status::hypothesis_unmet);
}

TEST(Cones, CardinalityPieces) {
    EXPECT_EQ(cardinality_pieces(3, 2, {0}), (std::vector<std::vector<int>>{{0, 1}, {0, 2}}));
    EXPECT_EQ(cardinality_pieces(3, 2, {0, 2}), (std::vector<std::vector<int>>{{0, 2}}));
    EXPECT_EQ(cardinality_pieces(3, 1, {}), (std::vector<std::vector<int>>{{0}, {1}, {2}}));
}

TEST(Cones, StabilityOriginCriticalCone) {
    const Problem p = testutil::load("stability.toml");
    const MStationaryPair pair = point_at(p, vec({0, 0}));
    const ConeDescription C = critical_cone(p, pair, kTol);
    EXPECT_TRUE(C.contains(vec({1, 0}), 1e-10));
    EXPECT_TRUE(C.contains(vec({0, 2}), 1e-10));
    EXPECT_FALSE(C.contains(vec({-1, 0}), 1e-10));
    EXPECT_FALSE(C.contains(vec({1, 1}), 1e-10));
    EXPECT_TRUE(critical_cone_member(p, pair, vec({0, 3}), kTol));
    EXPECT_FALSE(critical_cone_member(p, pair, vec({1, 1}), kTol));
    EXPECT_THROW(critical_cone_acc(p, pair, kTol), PreconditionError);
}

TEST(Cones, SoSsUnderAcc) {
    const Problem p = testutil::load("so_ss.toml");
    const MStationaryPair pair = point_at(p, vec({1, 1, 0}));
    const ConeDescription acc = critical_cone_acc(p, pair, kTol);
    const ConeDescription pan = pan_cone(p, pair, kTol);
    for (const Eigen::VectorXd& xi :
         {vec({1, 2, 0}), vec({-1, 2, 0}), vec({1, 0, 0}), vec({1, 1, 1}), vec({0, 0, 1})}) {
        const bool want = xi(0) >= 0 && xi(1) >= 0 && xi(2) == 0;
        EXPECT_EQ(acc.contains(xi, 1e-10), want) << xi.transpose();
        EXPECT_EQ(critical_cone_member(p, pair, xi, kTol), want) << xi.transpose();
    }
    // No positive multipliers: both active rows stay inequalities.
    EXPECT_TRUE(pan.contains(vec({0, 2, 0}), 1e-10));
    EXPECT_FALSE(pan.contains(vec({-1, 2, 0}), 1e-10));
    EXPECT_FALSE(pan.contains(vec({1, 1, 1}), 1e-10));
    const ConeDescription bouligand = tangent_cone_bouligand(p, pair, kTol);
    EXPECT_TRUE(bouligand.contains(vec({-4, 5, 0}), 1e-10));
    EXPECT_FALSE(bouligand.contains(vec({0, 1, 1}), 1e-10));
}

TEST(Sosc, FindsNegativeDirection) {
    Eigen::MatrixXd H(2, 2);
    H << 1, 0,  //
        0, -1;
    ConeDescription cone;
    cone.ambient_dim = 2;
    const SoscVerdict v = check_sosc(H, cone, 1e-8);
    EXPECT_EQ(v.status, SoscStatus::fails_with_witness);
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_NEAR(v.witness->norm(), 1.0, 1e-12);
    EXPECT_LE(v.witness->dot(H * *v.witness), 0.0);
}

TEST(Sosc, ConeExcludesNegativeDirection) {
    // Form x^2 - y^2 + 3xy restricted to y = 0: positive.
    Eigen::MatrixXd H(2, 2);
    H << 2, 3,  //
        3, -2;
    ConeDescription cone;
    cone.ambient_dim = 2;
    cone.zero_coords = {1};
    EXPECT_EQ(check_sosc(H, cone, 1e-8).status, SoscStatus::holds_exact);
    // Half-plane x >= 0, y >= 0 with a negative direction on the boundary y-axis.
    ConeDescription quad;
    quad.ambient_dim = 2;
    quad.inequalities = Eigen::MatrixXd::Identity(2, 2);
    const SoscVerdict v = check_sosc(H, quad, 1e-8);
    EXPECT_EQ(v.status, SoscStatus::fails_with_witness);
    ASSERT_TRUE(v.witness.has_value());
    EXPECT_TRUE(quad.contains(*v.witness, 1e-10));
}

TEST(Sosc, ZeroFormFails) {
    ConeDescription cone;
    cone.ambient_dim = 2;
    EXPECT_EQ(check_sosc(Eigen::MatrixXd::Zero(2, 2), cone, 1e-8).status,
              SoscStatus::fails_with_witness);
}

TEST(Sosc, FixtureVerdicts) {
    const Problem inst = testutil::load("instability.toml");
    const MStationaryPair o = point_at(inst, vec({0, 0}));
    EXPECT_EQ(check_sosc_bs(inst, o, kTol).status, SoscStatus::holds_exact);
    EXPECT_EQ(check_sosc_pan(inst, o, kTol).status, SoscStatus::holds_exact);
    const Problem so = testutil::load("so_ss.toml");
    const MStationaryPair m = point_at(so, vec({1, 1, 0}));
    const SoscVerdict bs = check_sosc_bs(so, m, kTol);
    EXPECT_NE(bs.status, SoscStatus::fails_with_witness);
    ASSERT_TRUE(bs.min_value.has_value());
    EXPECT_NEAR(*bs.min_value, 2.0, 1e-9);
    EXPECT_NE(check_sosc_pan(so, m, kTol).status, SoscStatus::fails_with_witness);
}

TEST(Sosc, DeterministicForSeed) {
    const Problem so = testutil::load("so_ss.toml");
    const MStationaryPair m = point_at(so, vec({1, 1, 0}));
    const SoscVerdict a = check_sosc_bs(so, m, kTol), b = check_sosc_bs(so, m, kTol);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.min_value, b.min_value);
}

TEST(FormRange, StabilityOrigin) {
    const Problem p = testutil::load("stability.toml");
    const MStationaryPair pair = point_at(p, vec({0, 0}));
    const auto r = form_range(lagrangian_hessian(p, pair), critical_cone(p, pair, kTol), 1e-8);
    ASSERT_TRUE(r.has_value());
    EXPECT_NEAR(r->min, 2.0, 1e-9);
    EXPECT_NEAR(r->max, 2.0, 1e-9);
}

TEST(Classify, NotesAndFlags) {
    const Problem p = testutil::load("stability.toml");
    const Classification c = classify(p, point_at(p, vec({0, 0})), kTol);
    EXPECT_FALSE(c.acc);
    EXPECT_TRUE(c.sc);
    EXPECT_EQ(c.local_minimizer, false);
    EXPECT_FALSE(c.has_indeterminate());
    bool range_note = false;
    for (const auto& n : c.notes) range_note |= n.find("ranges over [2, 2]") != std::string::npos;
    EXPECT_TRUE(range_note);

    const Problem so = testutil::load("so_ss.toml");
    const Classification d = classify(so, point_at(so, vec({1, 1, 0})), kTol);
    EXPECT_TRUE(d.acc);
    EXPECT_FALSE(d.local_minimizer.has_value());
    bool ss_note = false;
    for (const auto& n : d.notes) ss_note |= n.find("not strongly stable") != std::string::npos;
    EXPECT_TRUE(ss_note);
}
