#include "ccop/experiments.hpp"

#include "ccop/error.hpp"

#include <random>

namespace ccop {

Expr perturbed_objective(const Problem& p, const Eigen::VectorXd& c, double eps,
                         std::optional<double> shift) {
    if (c.size() != p.n()) throw DimensionError("perturbation vector must have length n");
    Expr f = p.objective().expr();
    for (int i = 0; i < p.n(); ++i) {
        const double a = eps * c[i];
        if (a != 0.0) f = f + Expr::constant(a) * Expr::variable(i + 1);
    }
    if (shift && eps != 0.0) f = f + Expr::constant(eps * eps * *shift);
    return f;
}

PerturbReport perturb_experiment(const Problem& p, const PerturbConfig& pc, const SolveConfig& cfg,
                                 const Tolerances& t, const SoscConfig& sc) {
    if (pc.linear.size() != p.n()) throw DimensionError("perturbation vector must have length n");
    PerturbReport out;
    out.reference = solve_all(p, cfg, t).points;
    for (const auto& pair : out.reference) {
        out.reference_classes.push_back(classify(p, pair, t, sc));
        if (out.reference_classes.back().nd.nondegenerate == Tri::holds) ++out.reference_nondegenerate;
    }
    for (double eps : pc.epsilons) {
        const Problem q = p.with_objective(perturbed_objective(p, pc.linear, eps, pc.quadratic_shift));
        PerturbRow row;
        row.epsilon = eps;
        row.points = solve_all(q, cfg, t).points;
        for (const auto& pair : row.points) {
            row.classes.push_back(classify(q, pair, t, sc));
            if (row.classes.back().nd.nondegenerate == Tri::holds) ++row.nondegenerate_count;
        }
        for (const auto& ref : out.reference) {
            int count = 0;
            for (const auto& pt : row.points)
                if ((pt.x - ref.x).norm() <= pc.radius) ++count;
            row.near_reference.push_back(count);
            if (count != 1) row.bifurcation = true;
        }
        out.rows.push_back(std::move(row));
    }
    return out;
}

ProbeReport genericity_probe(const Problem& p, int trials, double magnitude,
                             std::uint64_t rng_seed, const SolveConfig& cfg, const Tolerances& t) {
    if (trials < 1) throw PreconditionError("trials must be >= 1");
    if (!(magnitude >= 0.0)) throw PreconditionError("magnitude must be >= 0");
    ProbeReport out;
    out.trials = trials;
    out.magnitude = magnitude;
    out.rng_seed = rng_seed;
    std::mt19937_64 eng(rng_seed);
    for (int trial = 0; trial < trials; ++trial) {
        Eigen::VectorXd c(p.n());
        for (int i = 0; i < p.n(); ++i) {
            const double u = static_cast<double>(eng() >> 11) * 0x1.0p-53;
            c[i] = magnitude * (2.0 * u - 1.0);
        }
        const Problem q = p.with_objective(perturbed_objective(p, c, 1.0));
        const auto points = solve_all(q, cfg, t).points;
        out.points_total += static_cast<int>(points.size());
        if (points.empty()) ++out.empty_trials;
        bool all_nd = true, all_licq = true, indet = false;
        for (const auto& pair : points) {
            const Nondegeneracy nd = check_nondegeneracy(q, pair, t);
            if (nd.nondegenerate != Tri::holds) all_nd = false;
            if (nd.nd1 != Tri::holds) all_licq = false;
            if (nd.nondegenerate == Tri::indeterminate) indet = true;
        }
        out.nondegenerate_trials += all_nd;
        out.licq_trials += all_licq;
        out.indeterminate_trials += indet;
    }
    out.nondegenerate_fraction = static_cast<double>(out.nondegenerate_trials) / trials;
    out.licq_fraction = static_cast<double>(out.licq_trials) / trials;
    return out;
}

}  // namespace ccop
