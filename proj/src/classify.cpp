#include "ccop/classify.hpp"

#include "ccop/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <limits>
#include <random>

namespace ccop {

std::string_view to_string(Tri t) {
    switch (t) {
        case Tri::holds: return "holds";
        case Tri::fails: return "fails";
        case Tri::indeterminate: return "indeterminate";
    }
    return "?";
}

std::string_view to_string(Status s) {
    switch (s) {
        case Status::holds: return "holds";
        case Status::fails: return "fails";
        case Status::indeterminate: return "indeterminate";
        case Status::hypothesis_unmet: return "hypothesis_unmet";
        case Status::precondition_unmet: return "precondition_unmet";
    }
    return "?";
}

std::string_view to_string(SoscStatus s) {
    switch (s) {
        case SoscStatus::holds_exact: return "holds_exact";
        case SoscStatus::holds_sampled: return "holds_sampled";
        case SoscStatus::fails_with_witness: return "fails_with_witness";
        case SoscStatus::indeterminate: return "indeterminate";
    }
    return "?";
}

Tri decide_positive(double value, double tol) {
    if (value > 10.0 * tol) return Tri::holds;
    if (value < tol) return Tri::fails;
    return Tri::indeterminate;
}

Tri tri_and(std::initializer_list<Tri> parts) {
    bool indet = false;
    for (Tri t : parts) {
        if (t == Tri::fails) return Tri::fails;
        if (t == Tri::indeterminate) indet = true;
    }
    return indet ? Tri::indeterminate : Tri::holds;
}

namespace {

std::string fmt(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Status to_status(Tri t) {
    switch (t) {
        case Tri::holds: return Status::holds;
        case Tri::fails: return Status::fails;
        case Tri::indeterminate: return Status::indeterminate;
    }
    return Status::indeterminate;
}

Tri licq_tri(const CCLicqReport& r, double tol) {
    if (r.gradient_matrix.rows() == 0) return Tri::holds;
    return decide_positive(r.relative_margin, tol);
}

Tri nd3_tri(const Problem& p, const ActiveData& ad, const MStationaryPair& pair, double tol) {
    if (ad.k == p.s() || ad.I0.empty()) return Tri::holds;
    double m = std::numeric_limits<double>::infinity();
    for (int i : ad.I0) m = std::min(m, std::abs(pair.gamma[i]));
    return decide_positive(m, tol);
}

/// Nonsingularity of a restricted form, judged relative to its spectral scale.
Tri nonsingular_tri(const SpectralSummary& s, double tol) {
    if (s.eigenvalues.size() == 0) return Tri::holds;
    return decide_positive(s.eigenvalues.cwiseAbs().minCoeff() / s.scale, tol);
}

SpectralSummary restricted_spectrum(const Problem& p, const ActiveData& ad,
                                    const Eigen::MatrixXd& H, const std::vector<int>& Qstar,
                                    double tol, int* dim = nullptr) {
    const TangentFamily tf = tangent_space(p, ad, Qstar, tol);
    if (dim) *dim = tf.space.dim();
    return inertia_and_detsign(restrict_form(H, tf.space), tol);
}

Eigen::MatrixXd stack_gradients(const Problem& p, const Eigen::VectorXd& x,
                                const std::vector<const SmoothFunction*>& fns, double sign = 1.0) {
    Eigen::MatrixXd M(static_cast<Eigen::Index>(fns.size()), p.n());
    for (std::size_t r = 0; r < fns.size(); ++r)
        M.row(static_cast<Eigen::Index>(r)) = sign * fns[r]->gradient(x).transpose();
    return M;
}

std::vector<const SmoothFunction*> equality_fns(const Problem& p) {
    std::vector<const SmoothFunction*> out;
    for (const auto& h : p.equalities()) out.push_back(&h);
    return out;
}

std::vector<const SmoothFunction*> inequality_fns(const Problem& p, const std::vector<int>& qs) {
    std::vector<const SmoothFunction*> out;
    for (int q : qs) out.push_back(&p.inequalities()[static_cast<std::size_t>(q)]);
    return out;
}

Eigen::MatrixXd vstack(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    Eigen::MatrixXd out(a.rows() + b.rows(), std::max(a.cols(), b.cols()));
    if (a.rows()) out.topRows(a.rows()) = a;
    if (b.rows()) out.bottomRows(b.rows()) = b;
    return out;
}

std::vector<int> set_minus(const std::vector<int>& a, const std::vector<int>& b) {
    std::vector<int> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

/// Slack allowed when testing row * xi against zero.
double slack(const Eigen::VectorXd& row, const Eigen::VectorXd& xi, double tol) {
    return tol * std::max(1.0, row.norm() * xi.norm());
}

// ------------------------------------------------------- cone minimization

class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : eng_(seed) {}
    double uniform_open() {
        // (0, 1], avoids log(0)
        return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53;
    }
    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform_open()));
        const double th = 2.0 * M_PI * uniform_open();
        spare_ = r * std::sin(th);
        has_spare_ = true;
        return r * std::cos(th);
    }

private:
    std::mt19937_64 eng_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

struct Reduced {
    Subspace S;
    Eigen::MatrixXd A;  // form in S coordinates
    Eigen::MatrixXd R;  // unit inequality rows in S coordinates
};

Reduced reduce(const Eigen::MatrixXd& H, const ConeDescription& cone, const std::vector<int>* piece,
               double tol) {
    const int n = cone.ambient_dim;
    std::vector<int> zero = cone.zero_coords;
    if (piece) {
        for (int i = 0; i < n; ++i)
            if (!std::binary_search(piece->begin(), piece->end(), i)) zero.push_back(i);
    }
    std::sort(zero.begin(), zero.end());
    zero.erase(std::unique(zero.begin(), zero.end()), zero.end());
    Eigen::MatrixXd unit = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(zero.size()), n);
    for (std::size_t r = 0; r < zero.size(); ++r) unit(static_cast<Eigen::Index>(r), zero[r]) = 1.0;
    Reduced red;
    red.S = nullspace(vstack(cone.equalities, unit), tol, n);
    red.A = restrict_form(H, red.S);
    std::vector<Eigen::VectorXd> rows;
    for (Eigen::Index r = 0; r < cone.inequalities.rows(); ++r) {
        const Eigen::VectorXd row = cone.inequalities.row(r).transpose();
        const Eigen::VectorXd proj = red.S.basis().transpose() * row;
        if (proj.norm() > tol * std::max(1.0, row.norm())) rows.push_back(proj / proj.norm());
    }
    red.R.resize(static_cast<Eigen::Index>(rows.size()), red.S.dim());
    for (std::size_t r = 0; r < rows.size(); ++r) red.R.row(static_cast<Eigen::Index>(r)) = rows[r];
    return red;
}

struct ConeMin {
    bool found = false;
    double value = std::numeric_limits<double>::infinity();
    Eigen::VectorXd y;
    int samples = 0;
};

/// Cyclic projections onto the half-spaces {r.y >= 0}.
void push_into_cone(const Eigen::MatrixXd& R, Eigen::VectorXd& y, double tol) {
    for (int round = 0; round < 200; ++round) {
        bool inside = true;
        for (Eigen::Index r = 0; r < R.rows(); ++r) {
            const double v = R.row(r).dot(y);
            if (v < 0.0) {
                y -= v * R.row(r).transpose();
                if (v < -tol * y.norm()) inside = false;
            }
        }
        if (inside) return;
    }
}

constexpr int kMaxFaceRows = 12;

/// Minimum of y^T A y over {R y >= 0, |y| = 1}. Candidates are eigenvectors
/// of the form compressed to each face, plus projected samples and a
/// projected-gradient refinement of the best point.
ConeMin minimize_on_cone(const Eigen::MatrixXd& A, const Eigen::MatrixXd& R, double tol,
                         const SoscConfig& cfg) {
    ConeMin best;
    const Eigen::Index d = A.rows();
    if (d == 0) return best;
    const Eigen::Index m = R.rows();

    auto consider = [&](Eigen::VectorXd y) {
        const double nrm = y.norm();
        if (!(nrm > 0.0)) return;
        y /= nrm;
        if (m > 0 && (R * y).minCoeff() < -tol) return;
        const double v = y.dot(A * y);
        if (v < best.value) {
            best.value = v;
            best.y = std::move(y);
            best.found = true;
        }
    };

    const std::uint64_t faces = m <= kMaxFaceRows ? (std::uint64_t{1} << m) : 1;
    for (std::uint64_t mask = 0; mask < faces; ++mask) {
        Eigen::MatrixXd RF(static_cast<Eigen::Index>(std::popcount(mask)), d);
        Eigen::Index r = 0;
        for (Eigen::Index j = 0; j < m; ++j)
            if (mask & (std::uint64_t{1} << j)) RF.row(r++) = R.row(j);
        const Subspace N = nullspace(RF, tol, static_cast<int>(d));
        if (N.dim() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(restrict_form(A, N));
        for (Eigen::Index c = 0; c < N.dim(); ++c) {
            const Eigen::VectorXd w = N.basis() * es.eigenvectors().col(c);
            consider(w);
            consider(-w);
        }
    }

    NormalStream normal(cfg.seed);
    for (int i = 0; i < cfg.samples; ++i) {
        Eigen::VectorXd y(d);
        for (Eigen::Index j = 0; j < d; ++j) y[j] = normal();
        push_into_cone(R, y, tol);
        consider(std::move(y));
        ++best.samples;
    }

    if (best.found) {
        const double scale = std::max(1.0, A.cwiseAbs().rowwise().sum().maxCoeff());
        double step = 0.25 / scale;
        Eigen::VectorXd y = best.y;
        for (int it = 0; it < 500 && step > 1e-12; ++it) {
            Eigen::VectorXd trial = y - step * (A * y);
            push_into_cone(R, trial, tol);
            const double nrm = trial.norm();
            if (!(nrm > 0.0)) {
                step *= 0.5;
                continue;
            }
            trial /= nrm;
            const double v = trial.dot(A * trial);
            if (v < best.value && (m == 0 || (R * trial).minCoeff() >= -tol)) {
                best.value = v;
                best.y = trial;
                y = std::move(trial);
            } else {
                step *= 0.5;
            }
        }
    }
    return best;
}

std::vector<std::vector<int>> effective_pieces(const ConeDescription& cone) {
    if (!cone.pieces.empty()) return cone.pieces;
    std::vector<int> all(static_cast<std::size_t>(cone.ambient_dim));
    for (int i = 0; i < cone.ambient_dim; ++i) all[static_cast<std::size_t>(i)] = i;
    return {all};
}

}  // namespace

// ---------------------------------------------------------- nondegeneracy

Nondegeneracy check_nondegeneracy(const Problem& p, const MStationaryPair& pair,
                                  const Tolerances& t) {
    const ActiveData ad = active_data(p, pair.x, t);
    const Eigen::MatrixXd H = lagrangian_hessian(p, pair);
    Nondegeneracy nd;
    nd.k = ad.k;
    nd.s = p.s();
    nd.nd1 = licq_tri(check_cc_licq(p, pair.x, t), t.tol);
    if (ad.Q0.empty()) {
        nd.nd2 = Tri::holds;
    } else {
        double m = std::numeric_limits<double>::infinity();
        for (int q : ad.Q0) m = std::min(m, pair.mu[q]);
        nd.nd2 = decide_positive(m, t.tol);
    }
    nd.nd3 = nd3_tri(p, ad, pair, t.tol);
    const SpectralSummary spec = restricted_spectrum(p, ad, H, ad.Q0, t.tol, &nd.tangent_dim);
    nd.tangent_inertia = spec.inertia;
    nd.nd4 = nonsingular_tri(spec, t.tol);
    if (nd.nd4 == Tri::holds) nd.qi = spec.inertia.n_neg;
    nd.nondegenerate = tri_and({nd.nd1, nd.nd2, nd.nd3, nd.nd4});
    if (nd.nondegenerate == Tri::holds) nd.m_index = nd.s - nd.k + *nd.qi;
    return nd;
}

bool is_local_min_nd(const Problem& p, const MStationaryPair& pair, const Tolerances& t) {
    const Nondegeneracy nd = check_nondegeneracy(p, pair, t);
    if (nd.nondegenerate != Tri::holds)
        throw PreconditionError("degenerate M-stationary point");
    const bool by_index = *nd.m_index == 0;
    const bool by_conditions = nd.nd1 == Tri::holds && nd.nd2 == Tri::holds && nd.k == nd.s &&
                               nd.tangent_inertia.n_pos == nd.tangent_dim;
    if (by_index != by_conditions)
        throw Error("minimizer characterizations disagree");
    return by_index;
}

std::vector<int> positive_multipliers(const Problem& p, const MStationaryPair& pair,
                                      const Tolerances& t) {
    std::vector<int> out;
    for (int q = 0; q < p.num_inequalities(); ++q)
        if (pair.mu[q] > t.tol) out.push_back(q);
    return out;
}

// ------------------------------------------------------- strong stability

StrongStability check_strong_stability(const Problem& p, const MStationaryPair& pair,
                                       const Tolerances& t) {
    StrongStability out;
    const ActiveData ad = active_data(p, pair.x, t);
    const Tri licq = licq_tri(check_cc_licq(p, pair.x, t), t.tol);
    if (licq == Tri::fails) {
        out.status = Status::hypothesis_unmet;
        out.reason = "CC-LICQ fails";
        return out;
    }
    const Eigen::MatrixXd H = lagrangian_hessian(p, pair);
    const std::vector<int> Qplus = positive_multipliers(p, pair, t);
    bool band = false;
    for (int q : ad.Q0)
        if (decide_positive(pair.mu[q], t.tol) == Tri::indeterminate) band = true;
    const std::vector<int> free = set_minus(ad.Q0, Qplus);

    const Tri nd3 = nd3_tri(p, ad, pair, t.tol);
    bool family_indet = false;
    std::optional<std::string> family_failure;

    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << free.size()); ++mask) {
        StabilityMember mem;
        mem.Qstar = Qplus;
        for (std::size_t j = 0; j < free.size(); ++j)
            if (mask & (std::uint64_t{1} << j)) mem.Qstar.push_back(free[j]);
        std::sort(mem.Qstar.begin(), mem.Qstar.end());
        const SpectralSummary spec = restricted_spectrum(p, ad, H, mem.Qstar, t.tol, &mem.dim);
        mem.inertia = spec.inertia;
        mem.det_sign = spec.det_sign;
        const Tri nonsing = nonsingular_tri(spec, t.tol);
        out.family.push_back(mem);
        if (family_failure) continue;
        const StabilityMember& first = out.family.front();
        if (nonsing == Tri::fails) {
            out.witness.emplace(first.Qstar, mem.Qstar);
            family_failure = "restricted Hessian is singular for one Q*";
        } else if (nonsing == Tri::indeterminate) {
            family_indet = true;
        } else if (first.det_sign != 0 && mem.det_sign != first.det_sign) {
            out.witness.emplace(first.Qstar, mem.Qstar);
            family_failure = "determinant signs differ across Q*";
        }
    }

    if (licq == Tri::indeterminate) {
        out.status = Status::indeterminate;
        out.reason = "CC-LICQ margin within tolerance band";
    } else if (nd3 == Tri::fails) {
        out.status = Status::fails;
        out.reason = "ND3 fails";
    } else if (family_failure) {
        out.status = Status::fails;
        out.reason = *family_failure;
    } else if (nd3 == Tri::indeterminate || band || family_indet) {
        out.status = Status::indeterminate;
        out.reason = "sign decision within tolerance band";
    } else {
        out.status = Status::holds;
    }
    return out;
}

SsMinimizer check_ss_minimizer(const Problem& p, const MStationaryPair& pair,
                               const Tolerances& t) {
    SsMinimizer out;
    const StrongStability ss = check_strong_stability(p, pair, t);
    if (ss.status != Status::holds) {
        out.status = Status::precondition_unmet;
        out.reason = "strong stability " + std::string(to_string(ss.status));
        return out;
    }
    const ActiveData ad = active_data(p, pair.x, t);
    if (ad.k != p.s()) {
        out.status = Status::fails;
        out.reason = "ACC fails";
        return out;
    }
    const SpectralSummary spec = restricted_spectrum(p, ad, lagrangian_hessian(p, pair),
                                                     positive_multipliers(p, pair, t), t.tol);
    if (spec.eigenvalues.size() == 0) {
        out.status = Status::holds;
        return out;
    }
    out.status = to_status(decide_positive(spec.eigenvalues[0] / spec.scale, t.tol));
    if (out.status != Status::holds) out.reason = "restricted Hessian on T M+ not positive definite";
    return out;
}

// ------------------------------------------------------------------- cones

bool ConeDescription::contains(const Eigen::VectorXd& xi, double tol) const {
    if (xi.size() != ambient_dim) throw DimensionError("direction dimension does not match cone");
    for (Eigen::Index r = 0; r < equalities.rows(); ++r) {
        const Eigen::VectorXd row = equalities.row(r).transpose();
        if (std::abs(row.dot(xi)) > slack(row, xi, tol)) return false;
    }
    for (Eigen::Index r = 0; r < inequalities.rows(); ++r) {
        const Eigen::VectorXd row = inequalities.row(r).transpose();
        if (row.dot(xi) < -slack(row, xi, tol)) return false;
    }
    const double zero_tol = tol * std::max(1.0, xi.norm());
    for (int i : zero_coords)
        if (std::abs(xi[i]) > zero_tol) return false;
    if (pieces.empty()) return true;
    for (const auto& J : pieces) {
        bool ok = true;
        for (int i = 0; i < ambient_dim && ok; ++i)
            if (!std::binary_search(J.begin(), J.end(), i) && std::abs(xi[i]) > zero_tol) ok = false;
        if (ok) return true;
    }
    return false;
}

std::vector<std::vector<int>> cardinality_pieces(int n, int s, const std::vector<int>& I1) {
    const int k = static_cast<int>(I1.size());
    if (k >= s) return {I1};
    std::vector<int> rest;
    for (int i = 0; i < n; ++i)
        if (!std::binary_search(I1.begin(), I1.end(), i)) rest.push_back(i);
    const int need = s - k;
    std::vector<std::vector<int>> out;
    std::vector<int> c(static_cast<std::size_t>(need));
    for (int i = 0; i < need; ++i) c[static_cast<std::size_t>(i)] = i;
    const int r = static_cast<int>(rest.size());
    for (;;) {
        std::vector<int> J = I1;
        for (int idx : c) J.push_back(rest[static_cast<std::size_t>(idx)]);
        std::sort(J.begin(), J.end());
        out.push_back(std::move(J));
        int i = need - 1;
        while (i >= 0 && c[static_cast<std::size_t>(i)] == r - need + i) --i;
        if (i < 0) break;
        ++c[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < need; ++j)
            c[static_cast<std::size_t>(j)] = c[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

ConeDescription critical_cone(const Problem& p, const MStationaryPair& pair, const Tolerances& t) {
    const ActiveData ad = active_data(p, pair.x, t);
    ConeDescription c;
    c.ambient_dim = p.n();
    c.equalities = stack_gradients(p, pair.x, equality_fns(p));
    Eigen::MatrixXd negdf = -p.objective().gradient(pair.x).transpose();
    c.inequalities = vstack(stack_gradients(p, pair.x, inequality_fns(p, ad.Q0)), negdf);
    c.pieces = cardinality_pieces(p.n(), p.s(), ad.I1);
    return c;
}

bool critical_cone_member(const Problem& p, const MStationaryPair& pair, const Eigen::VectorXd& xi,
                          const Tolerances& t) {
    const ActiveData ad = active_data(p, pair.x, t);
    for (const auto& h : p.equalities()) {
        const Eigen::VectorXd g = h.gradient(pair.x);
        if (std::abs(g.dot(xi)) > slack(g, xi, t.tol)) return false;
    }
    for (int q : ad.Q0) {
        const Eigen::VectorXd g = p.inequalities()[static_cast<std::size_t>(q)].gradient(pair.x);
        if (g.dot(xi) < -slack(g, xi, t.tol)) return false;
    }
    const Eigen::VectorXd df = p.objective().gradient(pair.x);
    if (df.dot(xi) > slack(df, xi, t.tol)) return false;
    const double zero_tol = t.tol * std::max(1.0, xi.norm());
    int zeros = 0;
    for (int i : ad.I0)
        if (std::abs(xi[i]) <= zero_tol) ++zeros;
    return zeros >= p.n() - p.s();
}

namespace {

/// Rows Dh and Dg over Q+ as equalities, Dg over Q0 \ Q+ as inequalities.
ConeDescription linearization_qplus(const Problem& p, const MStationaryPair& pair,
                                    const Tolerances& t, const ActiveData& ad) {
    const std::vector<int> Qplus = positive_multipliers(p, pair, t);
    ConeDescription c;
    c.ambient_dim = p.n();
    c.equalities = vstack(stack_gradients(p, pair.x, equality_fns(p)),
                          stack_gradients(p, pair.x, inequality_fns(p, Qplus)));
    c.inequalities = stack_gradients(p, pair.x, inequality_fns(p, set_minus(ad.Q0, Qplus)));
    if (c.equalities.cols() == 0) c.equalities.resize(0, p.n());
    if (c.inequalities.cols() == 0) c.inequalities.resize(0, p.n());
    return c;
}

}  // namespace

ConeDescription critical_cone_acc(const Problem& p, const MStationaryPair& pair,
                                  const Tolerances& t) {
    const ActiveData ad = active_data(p, pair.x, t);
    if (ad.k != p.s()) throw PreconditionError("constraint representation requires ACC");
    ConeDescription c = linearization_qplus(p, pair, t, ad);
    c.zero_coords = ad.I0;
    return c;
}

ConeDescription tangent_cone_bouligand(const Problem& p, const MStationaryPair& pair,
                                       const Tolerances& t) {
    const ActiveData ad = active_data(p, pair.x, t);
    ConeDescription c;
    c.ambient_dim = p.n();
    c.equalities.resize(0, p.n());
    c.inequalities.resize(0, p.n());
    c.pieces = cardinality_pieces(p.n(), p.s(), ad.I1);
    return c;
}

ConeDescription pan_cone(const Problem& p, const MStationaryPair& pair, const Tolerances& t) {
    const ActiveData ad = active_data(p, pair.x, t);
    ConeDescription c = linearization_qplus(p, pair, t, ad);
    c.pieces = cardinality_pieces(p.n(), p.s(), ad.I1);
    return c;
}

// -------------------------------------------------------------------- SOSC

SoscVerdict check_sosc(const Eigen::MatrixXd& H, const ConeDescription& cone, double tol,
                       const SoscConfig& cfg) {
    if (H.rows() != cone.ambient_dim || H.cols() != cone.ambient_dim)
        throw DimensionError("form dimension does not match cone");
    SoscVerdict out;
    bool any_indet = false;
    bool all_exact = true;
    for (const auto& piece : effective_pieces(cone)) {
        const Reduced red = reduce(H, cone, cone.pieces.empty() ? nullptr : &piece, tol);
        if (red.S.dim() == 0) continue;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(red.A);
        const double lmin = es.eigenvalues()[0];
        const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
        double value = lmin;
        Eigen::VectorXd y = es.eigenvectors().col(0);
        bool exact = red.R.rows() == 0 || lmin > 10.0 * tol * scale;
        if (red.R.rows() > 0) {
            const ConeMin cm = minimize_on_cone(red.A, red.R, tol, cfg);
            out.samples_used += cm.samples;
            if (!cm.found) continue;
            value = cm.value;
            y = cm.y;
        }
        if (!out.min_value || value < *out.min_value) out.min_value = value;
        if (value <= 0.0) {
            out.status = SoscStatus::fails_with_witness;
            Eigen::VectorXd xi = red.S.basis() * y;
            out.witness = xi / xi.norm();
            return out;
        }
        if (value <= 10.0 * tol * scale) any_indet = true;
        if (!exact) all_exact = false;
    }
    if (any_indet)
        out.status = SoscStatus::indeterminate;
    else
        out.status = all_exact ? SoscStatus::holds_exact : SoscStatus::holds_sampled;
    return out;
}

SoscVerdict check_sosc_bs(const Problem& p, const MStationaryPair& pair, const Tolerances& t,
                          const SoscConfig& cfg) {
    return check_sosc(lagrangian_hessian(p, pair), critical_cone(p, pair, t), t.tol, cfg);
}

SoscVerdict check_sosc_pan(const Problem& p, const MStationaryPair& pair, const Tolerances& t,
                           const SoscConfig& cfg) {
    return check_sosc(lagrangian_hessian(p, pair), pan_cone(p, pair, t), t.tol, cfg);
}

std::optional<FormRange> form_range(const Eigen::MatrixXd& H, const ConeDescription& cone,
                                    double tol, const SoscConfig& cfg) {
    std::optional<FormRange> out;
    for (const auto& piece : effective_pieces(cone)) {
        const Reduced red = reduce(H, cone, cone.pieces.empty() ? nullptr : &piece, tol);
        if (red.S.dim() == 0) continue;
        const ConeMin lo = minimize_on_cone(red.A, red.R, tol, cfg);
        const ConeMin hi = minimize_on_cone(-red.A, red.R, tol, cfg);
        if (!lo.found || !hi.found) continue;
        if (!out) out = FormRange{lo.value, -hi.value, 0};
        out->min = std::min(out->min, lo.value);
        out->max = std::max(out->max, -hi.value);
        out->samples += lo.samples + hi.samples;
    }
    return out;
}

// ---------------------------------------------------------- classification

bool Classification::has_indeterminate() const {
    return nd.nondegenerate == Tri::indeterminate || strong_stability.status == Status::indeterminate ||
           ss_minimizer.status == Status::indeterminate ||
           sosc_bs.status == SoscStatus::indeterminate || sosc_pan.status == SoscStatus::indeterminate;
}

Classification classify(const Problem& p, const MStationaryPair& pair, const Tolerances& t,
                        const SoscConfig& cfg) {
    Classification c;
    const ActiveData ad = active_data(p, pair.x, t);
    c.licq = check_cc_licq(p, pair.x, t);
    c.nd = check_nondegeneracy(p, pair, t);
    c.acc = ad.k == p.s();
    c.sc = positive_multipliers(p, pair, t).size() == ad.Q0.size();
    if (c.nd.nondegenerate == Tri::holds) c.local_minimizer = is_local_min_nd(p, pair, t);
    c.strong_stability = check_strong_stability(p, pair, t);
    c.ss_minimizer = check_ss_minimizer(p, pair, t);
    c.sosc_bs = check_sosc_bs(p, pair, t, cfg);
    c.sosc_pan = check_sosc_pan(p, pair, t, cfg);
    c.critical_cone_form =
        form_range(lagrangian_hessian(p, pair), critical_cone(p, pair, t), t.tol, cfg);

    const bool bs_holds = c.sosc_bs.status == SoscStatus::holds_exact ||
                          c.sosc_bs.status == SoscStatus::holds_sampled;
    if (c.nd.nd1 == Tri::fails)
        c.notes.push_back("CC-LICQ fails: multipliers need not be unique");
    if (c.critical_cone_form) {
        c.notes.push_back("critical-cone quadratic form on unit directions ranges over [" +
                          fmt(c.critical_cone_form->min) + ", " + fmt(c.critical_cone_form->max) +
                          "]");
        if (bs_holds && !c.acc && c.local_minimizer == false)
            c.notes.push_back(
                "quadratic form is positive on the critical cone although the point is not a "
                "local minimizer; without ACC this only gives local uniqueness, and the form "
                "does not vanish on nonzero critical directions");
    } else {
        c.notes.push_back("critical cone is {0}");
    }
    if (bs_holds && c.strong_stability.status == Status::fails)
        c.notes.push_back("second-order sufficient condition holds but the point is not strongly stable");
    return c;
}

}  // namespace ccop
