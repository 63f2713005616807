#pragma once

#include "ccop/problem.hpp"

#include <Eigen/Dense>

#include <functional>
#include <random>
#include <string>
#include <vector>

namespace testutil {

inline std::string fixture(const std::string& name) {
    return std::string(CCOP_FIXTURE_DIR) + "/" + name;
}

inline ccop::Problem load(const std::string& name) { return ccop::load_problem(fixture(name)); }

inline const std::vector<std::string>& fixture_names() {
    static const std::vector<std::string> names = {
        "instability.toml", "so_ss.toml",        "stability.toml",
        "stability_compact.toml", "instability_perturbed_compact.toml", "equality.toml", "budget.toml"};
    return names;
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double d : v) out(i++) = d;
    return out;
}

/// Central differences with step h * max(1, |x_i|).
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h = 1e-6) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double step = h * std::max(1.0, std::abs(x(i)));
        Eigen::VectorXd a = x, b = x;
        a(i) += step;
        b(i) -= step;
        g(i) = (f(a) - f(b)) / (2 * step);
    }
    return g;
}

inline Eigen::MatrixXd fd_hessian(const std::function<double(const Eigen::VectorXd&)>& f,
                                  const Eigen::VectorXd& x, double h = 1e-4) {
    const Eigen::Index n = x.size();
    Eigen::MatrixXd H(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) {
            const double hi = h * std::max(1.0, std::abs(x(i)));
            const double hj = h * std::max(1.0, std::abs(x(j)));
            auto at = [&](double si, double sj) {
                Eigen::VectorXd y = x;
                y(i) += si * hi;
                y(j) += sj * hj;
                return f(y);
            };
            H(i, j) = (at(1, 1) - at(1, -1) - at(-1, 1) + at(-1, -1)) / (4 * hi * hj);
        }
    return H;
}

inline Eigen::MatrixXd random_orthogonal(int n, std::mt19937_64& rng) {
    std::normal_distribution<double> N(0.0, 1.0);
    Eigen::MatrixXd A(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(i, j) = N(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(A);
    return qr.householderQ() * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace testutil

namespace testutil {

/// Brute-force stationary points for a quadratic objective with affine
/// equalities and inequalities: for every support J with |J| <= s and every
/// set A of inequalities forced active, the multiplier conditions restricted
/// to J form a linear system, assembled here from function values only.
/// Inequalities that are not affine are never forced active.
inline std::vector<Eigen::VectorXd> quadratic_oracle(const ccop::Problem& p, double tol = 1e-7) {
    const int n = p.n();
    auto f = [&](const Eigen::VectorXd& x) { return p.objective().value(x); };
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(n);
    const Eigen::VectorXd c = fd_gradient(f, zero, 1e-3);  // exact for quadratics up to rounding
    Eigen::MatrixXd Q = fd_hessian(f, zero, 1.0);
    Q = (Q + Q.transpose()) / 2;

    auto affine = [&](const ccop::SmoothFunction& g, Eigen::VectorXd& a, double& b) {
        auto v = [&](const Eigen::VectorXd& x) { return g.value(x); };
        b = v(zero);
        a = fd_gradient(v, zero, 1.0);
        for (double probe : {0.5, -1.3}) {
            const Eigen::VectorXd x = Eigen::VectorXd::Constant(n, probe);
            if (std::abs(v(x) - (b + a.dot(x))) > 1e-9 * (1 + std::abs(v(x)))) return false;
        }
        return true;
    };
    const int P = p.num_equalities(), M = p.num_inequalities();
    std::vector<Eigen::VectorXd> ha(P), ga(M);
    std::vector<double> hb(P), gb(M);
    std::vector<bool> g_affine(M);
    for (int i = 0; i < P; ++i)
        if (!affine(p.equalities()[i], ha[i], hb[i])) throw std::runtime_error("oracle: nonlinear h");
    for (int j = 0; j < M; ++j) g_affine[j] = affine(p.inequalities()[j], ga[j], gb[j]);

    std::vector<Eigen::VectorXd> found;
    for (int J = 0; J < (1 << n); ++J) {
        std::vector<int> sup;
        for (int i = 0; i < n; ++i)
            if (J >> i & 1) sup.push_back(i);
        if (static_cast<int>(sup.size()) > p.s()) continue;
        for (int A = 0; A < (1 << M); ++A) {
            std::vector<int> act;
            bool ok = true;
            for (int j = 0; j < M; ++j)
                if (A >> j & 1) {
                    if (!g_affine[j]) ok = false;
                    act.push_back(j);
                }
            if (!ok) continue;
            const int k = static_cast<int>(sup.size()), a = static_cast<int>(act.size());
            const int N = k + P + a;
            // unknowns: x_J, lambda, mu_A
            Eigen::MatrixXd S = Eigen::MatrixXd::Zero(N, N);
            Eigen::VectorXd r = Eigen::VectorXd::Zero(N);
            for (int u = 0; u < k; ++u) {
                for (int v = 0; v < k; ++v) S(u, v) = Q(sup[u], sup[v]);
                for (int i = 0; i < P; ++i) S(u, k + i) = -ha[i](sup[u]);
                for (int j = 0; j < a; ++j) S(u, k + P + j) = -ga[act[j]](sup[u]);
                r(u) = -c(sup[u]);
            }
            for (int i = 0; i < P; ++i) {
                for (int v = 0; v < k; ++v) S(k + i, v) = ha[i](sup[v]);
                r(k + i) = -hb[i];
            }
            for (int j = 0; j < a; ++j) {
                for (int v = 0; v < k; ++v) S(k + P + j, v) = ga[act[j]](sup[v]);
                r(k + P + j) = -gb[act[j]];
            }
            Eigen::VectorXd z;
            if (N > 0) {
                Eigen::FullPivLU<Eigen::MatrixXd> lu(S);
                if (!lu.isInvertible()) continue;
                z = lu.solve(r);
                if ((S * z - r).norm() > 1e-9 * (1 + r.norm())) continue;
            }
            Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
            for (int u = 0; u < k; ++u) x(sup[u]) = z(u);
            for (int i = 0; i < n; ++i)
                if (std::abs(x(i)) < tol) x(i) = 0.0;
            bool good = p.in_box(x, tol);
            for (int j = 0; j < a; ++j) good &= z(k + P + j) >= -tol;
            for (int j = 0; j < M; ++j) good &= p.inequalities()[j].value(x) >= -tol;
            for (int i = 0; i < P; ++i) good &= std::abs(p.equalities()[i].value(x)) <= tol;
            if (!good) continue;
            bool dup = false;
            for (const auto& y : found) dup |= (y - x).norm() < 1e-6;
            if (!dup) found.push_back(x);
        }
    }
    return found;
}

}  // namespace testutil
