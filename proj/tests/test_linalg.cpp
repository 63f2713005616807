#include "ccop/linalg.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace ccop;

TEST(Linalg, NullspaceOfRows) {
    Eigen::MatrixXd A(2, 4);
    A << 1, 0, 0, 0,  //
        0, 1, 1, 0;
    const Subspace N = nullspace(A, 1e-10);
    EXPECT_EQ(N.dim(), 2);
    EXPECT_EQ(N.ambient_dim(), 4);
    EXPECT_NEAR((A * N.basis()).norm(), 0.0, 1e-14);
    EXPECT_NEAR((N.basis().transpose() * N.basis() - Eigen::MatrixXd::Identity(2, 2)).norm(), 0.0,
                1e-14);
    EXPECT_TRUE(N.contains(testutil::vec({0, 1, -1, 0}), 1e-12));
    EXPECT_TRUE(N.contains(testutil::vec({0, 0, 0, 5}), 1e-12));
    EXPECT_FALSE(N.contains(testutil::vec({1, 0, 0, 0}), 1e-12));
}

TEST(Linalg, NullspaceWithoutRowsIsEverything) {
    const Subspace N = nullspace(Eigen::MatrixXd(0, 3), 1e-10, 3);
    EXPECT_EQ(N.dim(), 3);
    EXPECT_EQ(Subspace::zero(3).dim(), 0);
    EXPECT_EQ(Subspace::full(3).dim(), 3);
}

TEST(Linalg, RankUsesRelativeThreshold) {
    Eigen::MatrixXd A(2, 2);
    A << 1, 1,  //
        1, 1 + 1e-13;
    EXPECT_EQ(rank(A, 1e-8), 1);
    EXPECT_EQ(rank(A, 1e-15), 2);
}

TEST(Linalg, InertiaAndDeterminantSign) {
    Eigen::MatrixXd A(3, 3);
    A << 2, 3, 0,  //
        3, 2, 0,   //
        0, 0, 2;
    const SpectralSummary s = inertia_and_detsign(A, 1e-8);
    EXPECT_EQ(s.inertia, (Inertia{2, 1, 0}));
    EXPECT_EQ(s.det_sign, -1);
    EXPECT_NEAR(s.eigenvalues(0), -1.0, 1e-12);
    EXPECT_NEAR(s.eigenvalues(2), 5.0, 1e-12);
    EXPECT_DOUBLE_EQ(s.scale, 5.0);
}

TEST(Linalg, SingularMatrixHasZeroSign) {
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2, 2);
    A(0, 0) = 1.0;
    const SpectralSummary s = inertia_and_detsign(A, 1e-8);
    EXPECT_EQ(s.inertia, (Inertia{1, 0, 1}));
    EXPECT_EQ(s.det_sign, 0);
}

TEST(Linalg, EmptyMatrix) {
    const SpectralSummary s = inertia_and_detsign(Eigen::MatrixXd(0, 0), 1e-8);
    EXPECT_EQ(s.inertia, (Inertia{0, 0, 0}));
    EXPECT_EQ(s.det_sign, 1);
}

TEST(Linalg, RestrictForm) {
    Eigen::MatrixXd H(3, 3);
    H << 2, 3, 0,  //
        3, 2, 0,   //
        0, 0, 2;
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2);
    B(0, 0) = 1;
    B(1, 1) = 1;
    const Eigen::MatrixXd R = restrict_form(H, Subspace::from_orthonormal(B));
    EXPECT_EQ(inertia_and_detsign(R, 1e-8).inertia, (Inertia{1, 1, 0}));
}
