#include "ccop/linalg.hpp"

#include "ccop/error.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace ccop {

Subspace Subspace::full(int ambient_dim) {
    return Subspace(Eigen::MatrixXd::Identity(ambient_dim, ambient_dim));
}

Subspace Subspace::zero(int ambient_dim) { return Subspace(Eigen::MatrixXd(ambient_dim, 0)); }

Subspace Subspace::from_orthonormal(Eigen::MatrixXd basis) { return Subspace(std::move(basis)); }

bool Subspace::contains(const Eigen::VectorXd& v, double tol) const {
    if (v.size() != ambient_dim()) throw DimensionError("vector dimension does not match subspace");
    const Eigen::VectorXd residual = v - basis_ * (basis_.transpose() * v);
    return residual.norm() <= tol * std::max(1.0, v.norm());
}

namespace {

struct Svd {
    Eigen::VectorXd singular_values;
    Eigen::MatrixXd v;
    int rank = 0;
};

Svd svd(const Eigen::MatrixXd& rows, double tol) {
    Svd out;
    Eigen::JacobiSVD<Eigen::MatrixXd> solver(rows, Eigen::ComputeFullV);
    out.singular_values = solver.singularValues();
    out.v = solver.matrixV();
    const double smax = out.singular_values.size() > 0 ? out.singular_values[0] : 0.0;
    for (Eigen::Index i = 0; i < out.singular_values.size(); ++i)
        if (smax > 0.0 && out.singular_values[i] > tol * smax) ++out.rank;
    return out;
}

}  // namespace

Subspace nullspace(const Eigen::MatrixXd& rows, double tol, int ambient_dim) {
    if (tol <= 0.0) throw PreconditionError("nullspace tolerance must be positive");
    if (rows.rows() == 0) return Subspace::full(ambient_dim);
    if (rows.cols() != ambient_dim) throw DimensionError("row length does not match ambient dimension");
    const Svd s = svd(rows, tol);
    const int n = ambient_dim;
    return Subspace::from_orthonormal(s.v.rightCols(n - s.rank));
}

Subspace nullspace(const Eigen::MatrixXd& rows, double tol) {
    return nullspace(rows, tol, static_cast<int>(rows.cols()));
}

int rank(const Eigen::MatrixXd& rows, double tol) {
    if (rows.rows() == 0 || rows.cols() == 0) return 0;
    return svd(rows, tol).rank;
}

Eigen::MatrixXd restrict_form(const Eigen::MatrixXd& H, const Subspace& S) {
    if (H.rows() != H.cols() || H.rows() != S.ambient_dim())
        throw DimensionError("form dimension does not match subspace ambient dimension");
    const Eigen::MatrixXd& B = S.basis();
    Eigen::MatrixXd R = B.transpose() * H * B;
    // B^T H B is symmetric in exact arithmetic; make it so in floating point
    return 0.5 * (R + R.transpose());
}

SpectralSummary inertia_and_detsign(const Eigen::MatrixXd& A, double tol) {
    if (A.rows() != A.cols()) throw DimensionError("matrix must be square");
    SpectralSummary out;
    const Eigen::Index d = A.rows();
    if (d == 0) {
        out.eigenvalues.resize(0);
        out.eigenvectors.resize(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
    out.eigenvalues = solver.eigenvalues();
    out.eigenvectors = solver.eigenvectors();
    out.scale = std::max(1.0, out.eigenvalues.cwiseAbs().maxCoeff());
    for (Eigen::Index i = 0; i < d; ++i) {
        const double lambda = out.eigenvalues[i];
        if (std::abs(lambda) < tol * out.scale)
            ++out.inertia.n_zero;
        else if (lambda > 0.0)
            ++out.inertia.n_pos;
        else
            ++out.inertia.n_neg;
    }
    if (out.inertia.n_zero > 0)
        out.det_sign = 0;
    else
        out.det_sign = out.inertia.n_neg % 2 == 0 ? 1 : -1;
    return out;
}

}  // namespace ccop
