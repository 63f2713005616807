#include "ccop/problem.hpp"

#include "ccop/error.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ccop {

namespace {

std::vector<SmoothFunction> compile_all(const std::vector<Expr>& exprs, int n) {
    std::vector<SmoothFunction> out;
    out.reserve(exprs.size());
    for (const auto& e : exprs) out.emplace_back(e, n);
    return out;
}

std::vector<Expr> exprs_of(const std::vector<SmoothFunction>& fs) {
    std::vector<Expr> out;
    out.reserve(fs.size());
    for (const auto& f : fs) out.push_back(f.expr());
    return out;
}

}  // namespace

Problem::Problem(int n, int s, Expr objective, std::vector<Expr> equalities,
                 std::vector<Expr> inequalities, std::vector<Interval> box,
                 bool compact_feasible_asserted)
    : n_(n), s_(s), box_(std::move(box)), compact_(compact_feasible_asserted) {
    if (n < 1) throw PreconditionError("n must be >= 1");
    if (s < 0) throw PreconditionError("s must be >= 0");
    if (s >= n) throw PreconditionError("s must be < n");
    if (static_cast<int>(box_.size()) != n)
        throw PreconditionError("box must have exactly n intervals");
    for (const auto& iv : box_)
        if (!(iv.lo <= iv.hi) || !std::isfinite(iv.lo) || !std::isfinite(iv.hi))
            throw PreconditionError("box intervals must be finite and nonempty");
    objective_ = SmoothFunction(std::move(objective), n);
    equalities_ = compile_all(equalities, n);
    inequalities_ = compile_all(inequalities, n);
}

Problem Problem::with_objective(Expr objective) const {
    return Problem(n_, s_, std::move(objective), exprs_of(equalities_), exprs_of(inequalities_),
                   box_, compact_);
}

bool Problem::in_box(const Eigen::VectorXd& x, double slack) const {
    for (int i = 0; i < n_; ++i)
        if (!box_[static_cast<std::size_t>(i)].contains(x[i], slack)) return false;
    return true;
}

int cardinality(const Eigen::VectorXd& x, double tol_zero) {
    int k = 0;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) > tol_zero) ++k;
    return k;
}

ActiveData active_data(const Problem& p, const Eigen::VectorXd& x, double tol_zero,
                       double tol_act) {
    if (x.size() != p.n()) throw DimensionError("point dimension does not match problem");
    ActiveData ad;
    ad.x = x;
    for (int i = 0; i < p.n(); ++i) {
        if (std::abs(x[i]) <= tol_zero)
            ad.I0.push_back(i);
        else
            ad.I1.push_back(i);
    }
    for (int q = 0; q < p.num_inequalities(); ++q) {
        const double g = p.inequalities()[static_cast<std::size_t>(q)].value(x);
        if (std::abs(g) <= tol_act) ad.Q0.push_back(q);
    }
    ad.k = static_cast<int>(ad.I1.size());
    ad.m = p.num_equalities() + static_cast<int>(ad.Q0.size());
    ad.ell = ad.m + static_cast<int>(ad.I0.size());
    return ad;
}

double feasibility_residual(const Problem& p, const Eigen::VectorXd& x) {
    double r = 0.0;
    for (const auto& h : p.equalities()) r = std::max(r, std::abs(h.value(x)));
    for (const auto& g : p.inequalities()) r = std::max(r, -g.value(x));
    return r;
}

bool feasible(const Problem& p, const Eigen::VectorXd& x, const Tolerances& t) {
    if (x.size() != p.n()) return false;
    try {
        if (cardinality(x, t.zero) > p.s()) return false;
        for (const auto& h : p.equalities())
            if (std::abs(h.value(x)) > t.tol) return false;
        for (const auto& g : p.inequalities())
            if (g.value(x) < -t.tol) return false;
    } catch (const DomainError&) {
        return false;
    }
    return true;
}

Eigen::VectorXd stationarity_vector(const Problem& p, const MStationaryPair& pair) {
    Eigen::VectorXd r = p.objective().gradient(pair.x);
    for (int j = 0; j < p.num_equalities(); ++j)
        r -= pair.lambda[j] * p.equalities()[static_cast<std::size_t>(j)].gradient(pair.x);
    for (int q = 0; q < p.num_inequalities(); ++q)
        if (pair.mu[q] != 0.0)
            r -= pair.mu[q] * p.inequalities()[static_cast<std::size_t>(q)].gradient(pair.x);
    r -= pair.gamma;
    return r;
}

double lagrangian_value(const Problem& p, const MStationaryPair& pair, const Eigen::VectorXd& y) {
    double v = p.objective().value(y);
    for (int j = 0; j < p.num_equalities(); ++j)
        v -= pair.lambda[j] * p.equalities()[static_cast<std::size_t>(j)].value(y);
    for (int q = 0; q < p.num_inequalities(); ++q)
        v -= pair.mu[q] * p.inequalities()[static_cast<std::size_t>(q)].value(y);
    return v - pair.gamma.dot(y);
}

Eigen::MatrixXd lagrangian_hessian(const Problem& p, const MStationaryPair& pair) {
    if (pair.x.size() != p.n() || pair.lambda.size() != p.num_equalities() ||
        pair.mu.size() != p.num_inequalities() || pair.gamma.size() != p.n())
        throw DimensionError("multiplier dimensions do not match problem");
    Eigen::MatrixXd H = p.objective().evaluate(pair.x).hessian;
    for (int j = 0; j < p.num_equalities(); ++j)
        if (pair.lambda[j] != 0.0)
            H -= pair.lambda[j] * p.equalities()[static_cast<std::size_t>(j)].evaluate(pair.x).hessian;
    for (int q = 0; q < p.num_inequalities(); ++q)
        if (pair.mu[q] != 0.0)
            H -= pair.mu[q] * p.inequalities()[static_cast<std::size_t>(q)].evaluate(pair.x).hessian;
    return H;
}

Eigen::MatrixXd tangent_rows(const Problem& p, const ActiveData& ad,
                             const std::vector<int>& constraint_subset) {
    const int rows = p.num_equalities() + static_cast<int>(constraint_subset.size()) +
                     static_cast<int>(ad.I0.size());
    Eigen::MatrixXd A(rows, p.n());
    int r = 0;
    for (const auto& h : p.equalities()) A.row(r++) = h.gradient(ad.x).transpose();
    for (int q : constraint_subset)
        A.row(r++) = p.inequalities()[static_cast<std::size_t>(q)].gradient(ad.x).transpose();
    for (int i : ad.I0) {
        A.row(r).setZero();
        A(r++, i) = 1.0;
    }
    return A;
}

TangentFamily tangent_space(const Problem& p, const ActiveData& ad, std::vector<int> Qstar,
                            double tol) {
    Subspace space = nullspace(tangent_rows(p, ad, Qstar), tol, p.n());
    return TangentFamily{ad, std::move(Qstar), std::move(space)};
}

}  // namespace ccop
