#pragma once

// Constraint qualification, multiplier recovery, M-stationarity and the
// enumerative search for all M-stationary points in the box.

#include "ccop/problem.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace ccop {

struct CCLicqReport {
    bool holds = false;
    /// Rows: Dh_p (p in P), Dg_q (q in Q0), e_i^T (i in I0).
    Eigen::MatrixXd gradient_matrix;
    /// Smallest of the min(rows, n) singular values, or 0 with more rows
    /// than n. Empty when there are no rows.
    std::optional<double> min_singular_value;
    double max_singular_value = 0.0;
    /// min_singular_value / max(1, max_singular_value); +inf without rows.
    double relative_margin = 0.0;
};

CCLicqReport check_cc_licq(const Problem& p, const Eigen::VectorXd& x, const Tolerances& t);

struct NoCertificate {
    double residual = 0.0;
};

using MultiplierResult = std::variant<MStationaryPair, NoCertificate>;

/// Least-squares solve of Df = sum lambda Dh + sum mu Dg + sum gamma e_i over
/// the columns for P, Q0(x), I0(x) (orthogonal factorization). mu >= 0 is
/// not enforced here.
MultiplierResult multipliers(const Problem& p, const Eigen::VectorXd& x, const Tolerances& t);

/// Same least-squares problem solved through the normal equations. Exists
/// as an independent route for cross-checking multiplier uniqueness.
MStationaryPair multipliers_normal_equations(const Problem& p, const Eigen::VectorXd& x,
                                             const Tolerances& t);

struct StationarityVerdict {
    bool yes = false;
    std::optional<MStationaryPair> pair;
    std::string reason;  // empty when yes
};

StationarityVerdict check_m_stationarity(const Problem& p, const Eigen::VectorXd& x,
                                         const Tolerances& t);

struct SolveConfig {
    int seeds_per_system = 64;
    int max_newton_iters = 100;
    double newton_tol = 1e-10;
    double cluster_radius = 1e-6;
    std::uint64_t rng_seed = 0;
    /// Worker threads for the per-system loop. Results do not depend on it.
    int threads = 1;
};

struct SystemStats {
    std::vector<int> support;     // I1 of the system
    std::vector<int> active_set;  // inequalities treated as equalities
    int seeds = 0;
    int converged = 0;
    int accepted = 0;
};

struct SolveResult {
    std::vector<MStationaryPair> points;
    std::vector<SystemStats> systems;
};

/// Enumerates supports |I1| <= s and active sets A of Q, runs damped Newton
/// on each square system from low-discrepancy seeds, keeps roots that pass
/// check_m_stationarity, clusters them and sorts by (|I1|, I1, x).
SolveResult solve_all(const Problem& p, const SolveConfig& cfg, const Tolerances& t);

/// Sort key used by solve_all.
bool stationary_order(const MStationaryPair& a, const MStationaryPair& b, double tol_zero);

}  // namespace ccop
