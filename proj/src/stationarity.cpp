#include "ccop/stationarity.hpp"

#include "ccop/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <sstream>
#include <thread>

namespace ccop {

// ------------------------------------------------------------------ CC-LICQ

CCLicqReport check_cc_licq(const Problem& p, const Eigen::VectorXd& x, const Tolerances& t) {
    const ActiveData ad = active_data(p, x, t);
    CCLicqReport r;
    r.gradient_matrix = tangent_rows(p, ad, ad.Q0);
    const Eigen::Index rows = r.gradient_matrix.rows();
    if (rows == 0) {
        r.holds = true;
        r.relative_margin = std::numeric_limits<double>::infinity();
        return r;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(r.gradient_matrix);
    const Eigen::VectorXd& sv = svd.singularValues();
    r.max_singular_value = sv[0];
    r.min_singular_value = rows > p.n() ? 0.0 : sv[sv.size() - 1];
    r.relative_margin = *r.min_singular_value / std::max(1.0, r.max_singular_value);
    r.holds = rows <= p.n() && r.relative_margin > t.tol;
    return r;
}

// -------------------------------------------------------------- multipliers

namespace {

struct MultiplierSystem {
    Eigen::MatrixXd A;  // n x (|P| + |Q0| + |I0|)
    Eigen::VectorXd b;  // grad f
    ActiveData ad;
};

MultiplierSystem multiplier_system(const Problem& p, const Eigen::VectorXd& x,
                                   const Tolerances& t) {
    MultiplierSystem s;
    s.ad = active_data(p, x, t);
    s.A = tangent_rows(p, s.ad, s.ad.Q0).transpose();
    s.b = p.objective().gradient(x);
    return s;
}

MStationaryPair unpack(const Problem& p, const MultiplierSystem& s, const Eigen::VectorXd& y) {
    MStationaryPair pair;
    pair.x = s.ad.x;
    pair.lambda = y.head(p.num_equalities());
    pair.mu = Eigen::VectorXd::Zero(p.num_inequalities());
    pair.gamma = Eigen::VectorXd::Zero(p.n());
    Eigen::Index c = p.num_equalities();
    for (int q : s.ad.Q0) pair.mu[q] = y[c++];
    for (int i : s.ad.I0) pair.gamma[i] = y[c++];
    pair.stationarity_residual =
        s.A.cols() > 0 ? (s.b - s.A * y).cwiseAbs().maxCoeff() : s.b.cwiseAbs().maxCoeff();
    pair.feasibility_residual = feasibility_residual(p, s.ad.x);
    return pair;
}

}  // namespace

MultiplierResult multipliers(const Problem& p, const Eigen::VectorXd& x, const Tolerances& t) {
    const MultiplierSystem s = multiplier_system(p, x, t);
    Eigen::VectorXd y(s.A.cols());
    if (s.A.cols() > 0) {
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(s.A);
        y = cod.solve(s.b);
    }
    MStationaryPair pair = unpack(p, s, y);
    if (!(pair.stationarity_residual <= t.tol)) return NoCertificate{pair.stationarity_residual};
    return pair;
}

MStationaryPair multipliers_normal_equations(const Problem& p, const Eigen::VectorXd& x,
                                             const Tolerances& t) {
    const MultiplierSystem s = multiplier_system(p, x, t);
    Eigen::VectorXd y(s.A.cols());
    if (s.A.cols() > 0) {
        const Eigen::MatrixXd normal = s.A.transpose() * s.A;
        y = normal.ldlt().solve(s.A.transpose() * s.b);
    }
    return unpack(p, s, y);
}

StationarityVerdict check_m_stationarity(const Problem& p, const Eigen::VectorXd& x,
                                         const Tolerances& t) {
    StationarityVerdict v;
    if (!feasible(p, x, t)) {
        v.reason = "infeasible";
        return v;
    }
    MultiplierResult mr;
    try {
        mr = multipliers(p, x, t);
    } catch (const DomainError& e) {
        v.reason = std::string("domain error: ") + e.what();
        return v;
    }
    if (auto nc = std::get_if<NoCertificate>(&mr)) {
        std::ostringstream os;
        os.precision(17);
        os << "multiplier residual " << nc->residual << " exceeds tolerance";
        v.reason = os.str();
        return v;
    }
    auto& pair = std::get<MStationaryPair>(mr);
    for (int q = 0; q < p.num_inequalities(); ++q) {
        if (pair.mu[q] < -t.tol) {
            std::ostringstream os;
            os.precision(17);
            os << "negative multiplier mu_" << q + 1 << " = " << pair.mu[q];
            v.reason = os.str();
            return v;
        }
    }
    v.yes = true;
    v.pair = std::move(pair);
    return v;
}

// ------------------------------------------------------------------ solver

namespace {

struct SystemSpec {
    std::vector<int> support;
    std::vector<int> active;
};

std::vector<SystemSpec> enumerate_systems(const Problem& p) {
    const int n = p.n();
    std::vector<std::vector<int>> supports;
    for (int size = 0; size <= p.s(); ++size) {
        // lexicographic combinations of {0..n-1}
        std::vector<int> c(static_cast<std::size_t>(size));
        for (int i = 0; i < size; ++i) c[static_cast<std::size_t>(i)] = i;
        for (;;) {
            supports.push_back(c);
            int i = size - 1;
            while (i >= 0 && c[static_cast<std::size_t>(i)] == n - size + i) --i;
            if (i < 0) break;
            ++c[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < size; ++j)
                c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
        }
    }
    const int nq = p.num_inequalities();
    std::vector<SystemSpec> out;
    for (const auto& sup : supports) {
        // with an empty support x = 0 is fixed and the active set is irrelevant
        const std::uint64_t masks = sup.empty() ? 1 : (std::uint64_t{1} << nq);
        for (std::uint64_t mask = 0; mask < masks; ++mask) {
            SystemSpec spec;
            spec.support = sup;
            for (int q = 0; q < nq; ++q)
                if (mask & (std::uint64_t{1} << q)) spec.active.push_back(q);
            out.push_back(std::move(spec));
        }
    }
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

double radical_inverse(std::uint64_t i, int base) {
    double f = 1.0, r = 0.0;
    while (i > 0) {
        f /= base;
        r += f * static_cast<double>(i % static_cast<std::uint64_t>(base));
        i /= static_cast<std::uint64_t>(base);
    }
    return r;
}

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53,
                           59, 61, 67, 71, 73, 79, 83, 89, 97, 101, 103, 107, 109, 113, 127, 131};

/// Rotated Halton point (Cranley-Patterson shift from the seed) mapped to the
/// box coordinates of the support.
Eigen::VectorXd seed_point(const Problem& p, const std::vector<int>& support, int index,
                           std::uint64_t rng_seed) {
    Eigen::VectorXd x = Eigen::VectorXd::Zero(p.n());
    for (std::size_t j = 0; j < support.size(); ++j) {
        const int base = kPrimes[j % std::size(kPrimes)];
        const double shift =
            static_cast<double>(splitmix64(rng_seed * 0x100000001b3ULL + j) >> 11) * 0x1.0p-53;
        double u = radical_inverse(static_cast<std::uint64_t>(index) + 1, base) + shift;
        u -= std::floor(u);
        const Interval& iv = p.box()[static_cast<std::size_t>(support[j])];
        x[support[j]] = iv.lo + u * iv.width();
    }
    return x;
}

class NewtonSystem {
public:
    NewtonSystem(const Problem& p, const SystemSpec& spec) : p_(p), spec_(spec) {
        k_ = static_cast<int>(spec.support.size());
        np_ = p.num_equalities();
        na_ = static_cast<int>(spec.active.size());
        dim_ = k_ + np_ + na_;
    }

    int dim() const { return dim_; }

    Eigen::VectorXd full_x(const Eigen::VectorXd& z) const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(p_.n());
        for (int j = 0; j < k_; ++j) x[spec_.support[static_cast<std::size_t>(j)]] = z[j];
        return x;
    }

    Eigen::VectorXd restrict(const Eigen::VectorXd& v) const {
        Eigen::VectorXd out(k_);
        for (int j = 0; j < k_; ++j) out[j] = v[spec_.support[static_cast<std::size_t>(j)]];
        return out;
    }

    /// Initial unknowns: x from the seed, multipliers by least squares.
    Eigen::VectorXd initial(const Eigen::VectorXd& x) const {
        Eigen::VectorXd z = Eigen::VectorXd::Zero(dim_);
        z.head(k_) = restrict(x);
        if (np_ + na_ > 0) {
            Eigen::MatrixXd G(k_, np_ + na_);
            for (int j = 0; j < np_; ++j)
                G.col(j) = restrict(p_.equalities()[static_cast<std::size_t>(j)].gradient(x));
            for (int a = 0; a < na_; ++a)
                G.col(np_ + a) = restrict(
                    p_.inequalities()[static_cast<std::size_t>(spec_.active[static_cast<std::size_t>(a)])]
                        .gradient(x));
            const Eigen::VectorXd b = restrict(p_.objective().gradient(x));
            z.tail(np_ + na_) = G.completeOrthogonalDecomposition().solve(b);
        }
        return z;
    }

    Eigen::VectorXd residual(const Eigen::VectorXd& z) const {
        const Eigen::VectorXd x = full_x(z);
        Eigen::VectorXd F(dim_);
        Eigen::VectorXd r = restrict(p_.objective().gradient(x));
        for (int j = 0; j < np_; ++j) {
            const auto& h = p_.equalities()[static_cast<std::size_t>(j)];
            r -= z[k_ + j] * restrict(h.gradient(x));
            F[k_ + j] = h.value(x);
        }
        for (int a = 0; a < na_; ++a) {
            const auto& g = p_.inequalities()[static_cast<std::size_t>(spec_.active[static_cast<std::size_t>(a)])];
            r -= z[k_ + np_ + a] * restrict(g.gradient(x));
            F[k_ + np_ + a] = g.value(x);
        }
        F.head(k_) = r;
        return F;
    }

    Eigen::MatrixXd jacobian(const Eigen::VectorXd& z) const {
        const Eigen::VectorXd x = full_x(z);
        Eigen::MatrixXd J = Eigen::MatrixXd::Zero(dim_, dim_);
        Eigen::MatrixXd H = p_.objective().evaluate(x).hessian;
        auto block = [&](const SmoothFunction& fn, double multiplier, int col) {
            const DiffBundle d = fn.evaluate(x);
            H -= multiplier * d.hessian;
            const Eigen::VectorXd g = restrict(d.gradient);
            J.block(0, col, k_, 1) = -g;
            J.block(col, 0, 1, k_) = g.transpose();
        };
        for (int j = 0; j < np_; ++j)
            block(p_.equalities()[static_cast<std::size_t>(j)], z[k_ + j], k_ + j);
        for (int a = 0; a < na_; ++a)
            block(p_.inequalities()[static_cast<std::size_t>(spec_.active[static_cast<std::size_t>(a)])],
                  z[k_ + np_ + a], k_ + np_ + a);
        for (int r = 0; r < k_; ++r)
            for (int c = 0; c < k_; ++c)
                J(r, c) = H(spec_.support[static_cast<std::size_t>(r)],
                            spec_.support[static_cast<std::size_t>(c)]);
        return J;
    }

private:
    const Problem& p_;
    const SystemSpec& spec_;
    int k_ = 0, np_ = 0, na_ = 0, dim_ = 0;
};

/// Damped Newton with Armijo backtracking on ||F||^2. Returns the root in
/// full coordinates on convergence.
std::optional<Eigen::VectorXd> newton(const NewtonSystem& sys, Eigen::VectorXd z,
                                      const SolveConfig& cfg) {
    constexpr double kArmijo = 1e-4;
    Eigen::VectorXd F = sys.residual(z);
    double merit = F.squaredNorm();
    for (int it = 0; it <= cfg.max_newton_iters; ++it) {
        if (F.cwiseAbs().maxCoeff() <= cfg.newton_tol) return sys.full_x(z);
        if (it == cfg.max_newton_iters) break;
        const Eigen::MatrixXd J = sys.jacobian(z);
        const Eigen::VectorXd d = J.completeOrthogonalDecomposition().solve(-F);
        if (!d.allFinite() || d.norm() <= 1e-14 * (1.0 + z.norm())) return std::nullopt;
        double alpha = 1.0;
        bool accepted = false;
        for (int ls = 0; ls < 30; ++ls, alpha *= 0.5) {
            const Eigen::VectorXd trial = z + alpha * d;
            Eigen::VectorXd Ft;
            try {
                Ft = sys.residual(trial);
            } catch (const DomainError&) {
                continue;
            }
            const double m = Ft.squaredNorm();
            if (std::isfinite(m) && m < merit && m <= (1.0 - 2.0 * kArmijo * alpha) * merit) {
                z = trial;
                F = std::move(Ft);
                merit = m;
                accepted = true;
                break;
            }
        }
        if (!accepted) return std::nullopt;
    }
    return std::nullopt;
}

Eigen::VectorXd snap_zeros(Eigen::VectorXd x, double tol_zero) {
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) <= tol_zero) x[i] = 0.0;
    return x;
}

struct SystemOutcome {
    SystemStats stats;
    std::vector<Eigen::VectorXd> roots;
};

SystemOutcome run_system(const Problem& p, const SystemSpec& spec, const SolveConfig& cfg,
                         const Tolerances& t) {
    SystemOutcome out;
    out.stats.support = spec.support;
    out.stats.active_set = spec.active;

    auto accept = [&](const Eigen::VectorXd& root) {
        const Eigen::VectorXd x = snap_zeros(root, t.zero);
        if (!p.in_box(x, t.tol)) return;
        if (!check_m_stationarity(p, x, t).yes) return;
        ++out.stats.accepted;
        out.roots.push_back(x);
    };

    if (spec.support.empty()) {
        out.stats.seeds = 1;
        out.stats.converged = 1;
        accept(Eigen::VectorXd::Zero(p.n()));
        return out;
    }

    const NewtonSystem sys(p, spec);
    for (int i = 0; i < cfg.seeds_per_system; ++i) {
        ++out.stats.seeds;
        try {
            const Eigen::VectorXd x0 = seed_point(p, spec.support, i, cfg.rng_seed);
            auto root = newton(sys, sys.initial(x0), cfg);
            if (!root) continue;
            ++out.stats.converged;
            accept(*root);
        } catch (const DomainError&) {
            // seed or iterate left the domain of definition
        }
    }
    return out;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

std::vector<int> support_of(const Eigen::VectorXd& x, double tol_zero) {
    std::vector<int> s;
    for (Eigen::Index i = 0; i < x.size(); ++i)
        if (std::abs(x[i]) > tol_zero) s.push_back(static_cast<int>(i));
    return s;
}

}  // namespace

bool stationary_order(const MStationaryPair& a, const MStationaryPair& b, double tol_zero) {
    const auto sa = support_of(a.x, tol_zero);
    const auto sb = support_of(b.x, tol_zero);
    if (sa.size() != sb.size()) return sa.size() < sb.size();
    if (sa != sb) return sa < sb;
    for (Eigen::Index i = 0; i < a.x.size(); ++i)
        if (a.x[i] != b.x[i]) return a.x[i] < b.x[i];
    return false;
}

SolveResult solve_all(const Problem& p, const SolveConfig& cfg, const Tolerances& t) {
    if (cfg.seeds_per_system < 1 || cfg.max_newton_iters < 1 || !(cfg.newton_tol > 0.0) ||
        !(cfg.cluster_radius > 0.0))
        throw PreconditionError("solver configuration values must be positive");

    const std::vector<SystemSpec> systems = enumerate_systems(p);
    std::vector<SystemOutcome> outcomes(systems.size());

    const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(systems.size())));
    if (threads == 1) {
        for (std::size_t i = 0; i < systems.size(); ++i)
            outcomes[i] = run_system(p, systems[i], cfg, t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int w = 0; w < threads; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < systems.size(); i = next++)
                    outcomes[i] = run_system(p, systems[i], cfg, t);
            });
        }
        for (auto& th : pool) th.join();
    }

    // merge in system order, then cluster greedily
    SolveResult result;
    std::vector<std::vector<Eigen::VectorXd>> clusters;
    for (auto& o : outcomes) {
        result.systems.push_back(o.stats);
        for (auto& x : o.roots) {
            auto it = std::find_if(clusters.begin(), clusters.end(), [&](const auto& c) {
                return (c.front() - x).norm() <= cfg.cluster_radius;
            });
            if (it == clusters.end())
                clusters.push_back({x});
            else
                it->push_back(x);
        }
    }

    for (const auto& c : clusters) {
        Eigen::VectorXd rep(p.n());
        for (int i = 0; i < p.n(); ++i) {
            std::vector<double> coords;
            coords.reserve(c.size());
            for (const auto& x : c) coords.push_back(x[i]);
            rep[i] = median(std::move(coords));
        }
        rep = snap_zeros(rep, t.zero);
        StationarityVerdict v = check_m_stationarity(p, rep, t);
        if (!v.yes) v = check_m_stationarity(p, c.front(), t);
        if (v.yes) result.points.push_back(std::move(*v.pair));
    }
    std::sort(result.points.begin(), result.points.end(),
              [&](const MStationaryPair& a, const MStationaryPair& b) {
                  return stationary_order(a, b, t.zero);
              });
    return result;
}

}  // namespace ccop
