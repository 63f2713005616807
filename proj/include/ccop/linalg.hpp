#pragma once

// Small dense linear algebra for ambient dimensions up to ~16.

#include <Eigen/Core>

namespace ccop {

inline constexpr double kDefaultTol = 1e-8;

/// Linear subspace of R^n held as an orthonormal basis (n x d).
class Subspace {
public:
    Subspace() = default;
    static Subspace full(int ambient_dim);
    static Subspace zero(int ambient_dim);
    /// Takes ownership of a basis whose columns are already orthonormal.
    static Subspace from_orthonormal(Eigen::MatrixXd basis);

    int ambient_dim() const { return static_cast<int>(basis_.rows()); }
    int dim() const { return static_cast<int>(basis_.cols()); }
    const Eigen::MatrixXd& basis() const { return basis_; }

    bool contains(const Eigen::VectorXd& v, double tol) const;

private:
    explicit Subspace(Eigen::MatrixXd basis) : basis_(std::move(basis)) {}
    Eigen::MatrixXd basis_;
};

struct Inertia {
    int n_pos = 0;
    int n_neg = 0;
    int n_zero = 0;

    bool operator==(const Inertia&) const = default;
};

struct SpectralSummary {
    Inertia inertia;
    int det_sign = 1;              // 0 iff inertia.n_zero > 0
    Eigen::VectorXd eigenvalues;   // ascending
    Eigen::MatrixXd eigenvectors;  // columns, matching eigenvalues
    double scale = 1.0;            // max(1, max |eigenvalue|)
};

/// {xi : rows * xi = 0}; singular values below tol * sigma_max count as zero.
Subspace nullspace(const Eigen::MatrixXd& rows, double tol, int ambient_dim);
Subspace nullspace(const Eigen::MatrixXd& rows, double tol);

/// Numerical rank of `rows` with the same threshold as nullspace().
int rank(const Eigen::MatrixXd& rows, double tol);

/// B^T H B for the stored orthonormal basis B.
Eigen::MatrixXd restrict_form(const Eigen::MatrixXd& H, const Subspace& S);

/// Eigenvalues with |lambda| < tol * max(1, max|lambda|) count as zero. An
/// empty matrix has inertia (0,0,0) and sign +1.
SpectralSummary inertia_and_detsign(const Eigen::MatrixXd& A, double tol);

}  // namespace ccop
