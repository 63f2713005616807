#pragma once

// Cardinality-constrained problem instances:
//   minimize f(x)  s.t.  h(x) = 0, g(x) >= 0, ||x||_0 <= s,  x in box.
// Index sets are 0-based in the API and 1-based in files and reports.

#include "ccop/expr.hpp"
#include "ccop/linalg.hpp"

#include <Eigen/Core>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace ccop {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double v, double slack = 0.0) const { return v >= lo - slack && v <= hi + slack; }
};

/// Tolerances for the three kinds of near-zero decisions. Kept separate so a
/// badly scaled constraint does not misclassify a support.
struct Tolerances {
    double tol = kDefaultTol;     // residuals, multiplier signs, spectra
    double zero = kDefaultTol;    // |x_i| <= zero  =>  i in I0
    double active = kDefaultTol;  // |g_q| <= active  =>  q in Q0

    static Tolerances uniform(double t) { return {t, t, t}; }
};

class Problem {
public:
    Problem(int n, int s, Expr objective, std::vector<Expr> equalities,
            std::vector<Expr> inequalities, std::vector<Interval> box,
            bool compact_feasible_asserted = false);

    int n() const { return n_; }
    int s() const { return s_; }
    const SmoothFunction& objective() const { return objective_; }
    const std::vector<SmoothFunction>& equalities() const { return equalities_; }
    const std::vector<SmoothFunction>& inequalities() const { return inequalities_; }
    int num_equalities() const { return static_cast<int>(equalities_.size()); }
    int num_inequalities() const { return static_cast<int>(inequalities_.size()); }
    const std::vector<Interval>& box() const { return box_; }
    bool compact_feasible_asserted() const { return compact_; }

    /// Same constraints, different objective.
    Problem with_objective(Expr objective) const;

    bool in_box(const Eigen::VectorXd& x, double slack = 0.0) const;

    /// Problem-file text with canonical expressions; parse_problem() of it
    /// reproduces this problem.
    std::string canonical_text() const;

private:
    int n_;
    int s_;
    SmoothFunction objective_;
    std::vector<SmoothFunction> equalities_;
    std::vector<SmoothFunction> inequalities_;
    std::vector<Interval> box_;
    bool compact_;
};

/// Parses the problem-file format. Throws ParseError with line/column.
Problem parse_problem(std::string_view text);
Problem load_problem(const std::filesystem::path& path);

struct ActiveData {
    Eigen::VectorXd x;
    std::vector<int> I0;  // zero coordinates, ascending
    std::vector<int> I1;  // nonzero coordinates, ascending
    std::vector<int> Q0;  // active inequalities, ascending
    int k = 0;            // |I1|
    int m = 0;            // |P| + |Q0|
    int ell = 0;          // m + |I0|
};

ActiveData active_data(const Problem& p, const Eigen::VectorXd& x, double tol_zero,
                       double tol_act);
inline ActiveData active_data(const Problem& p, const Eigen::VectorXd& x, const Tolerances& t) {
    return active_data(p, x, t.zero, t.active);
}

/// Number of coordinates with |x_i| > tol_zero.
int cardinality(const Eigen::VectorXd& x, double tol_zero);

/// max(|h|, max(0, -g)).
double feasibility_residual(const Problem& p, const Eigen::VectorXd& x);

bool feasible(const Problem& p, const Eigen::VectorXd& x, const Tolerances& t);
inline bool feasible(const Problem& p, const Eigen::VectorXd& x, double tol) {
    return feasible(p, x, Tolerances::uniform(tol));
}

struct MStationaryPair {
    Eigen::VectorXd x;
    Eigen::VectorXd lambda;  // over P
    Eigen::VectorXd mu;      // over Q, zero off Q0
    Eigen::VectorXd gamma;   // over 1..n, zero off I0
    double stationarity_residual = 0.0;
    double feasibility_residual = 0.0;
};

/// grad f - sum lambda grad h - sum mu grad g - gamma.
Eigen::VectorXd stationarity_vector(const Problem& p, const MStationaryPair& pair);

/// L(y) = f(y) - sum lambda h(y) - sum mu g(y) - gamma^T y, whose gradient
/// vanishes exactly when the multiplier equation holds.
double lagrangian_value(const Problem& p, const MStationaryPair& pair, const Eigen::VectorXd& y);

/// D^2 f - sum lambda D^2 h - sum mu D^2 g at pair.x.
Eigen::MatrixXd lagrangian_hessian(const Problem& p, const MStationaryPair& pair);

/// Rows {Dh_p, p in P} u {Dg_q, q in constraint_subset} u {e_i^T, i in I0}.
Eigen::MatrixXd tangent_rows(const Problem& p, const ActiveData& ad,
                             const std::vector<int>& constraint_subset);

struct TangentFamily {
    ActiveData base;
    std::vector<int> Qstar;
    Subspace space;
};

TangentFamily tangent_space(const Problem& p, const ActiveData& ad, std::vector<int> Qstar,
                            double tol);

}  // namespace ccop
