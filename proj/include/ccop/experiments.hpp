#pragma once

// Perturbation experiments and the genericity probe. Both re-solve the
// problem with a linearly perturbed objective and classify what they find.

#include "ccop/classify.hpp"
#include "ccop/stationarity.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <vector>

namespace ccop {

/// f + eps * c^T x (+ eps^2 * shift when given).
Expr perturbed_objective(const Problem& p, const Eigen::VectorXd& c, double eps,
                         std::optional<double> shift = std::nullopt);

struct PerturbConfig {
    Eigen::VectorXd linear;
    /// Constant scaled by eps^2, e.g. |c|^2/4 completes the square.
    std::optional<double> quadratic_shift;
    std::vector<double> epsilons;
    /// Neighbourhood of each unperturbed point in which perturbed points are
    /// counted.
    double radius = 0.5;
};

struct PerturbRow {
    double epsilon = 0.0;
    std::vector<MStationaryPair> points;
    std::vector<Classification> classes;
    /// Perturbed points within `radius` of each reference point.
    std::vector<int> near_reference;
    int nondegenerate_count = 0;
    bool bifurcation = false;
};

struct PerturbReport {
    std::vector<MStationaryPair> reference;
    std::vector<Classification> reference_classes;
    int reference_nondegenerate = 0;
    std::vector<PerturbRow> rows;
};

PerturbReport perturb_experiment(const Problem& p, const PerturbConfig& pc, const SolveConfig& cfg,
                                 const Tolerances& t, const SoscConfig& sc = {});

struct ProbeReport {
    int trials = 0;
    double magnitude = 0.0;
    std::uint64_t rng_seed = 0;
    int nondegenerate_trials = 0;  // every point nondegenerate
    int licq_trials = 0;           // CC-LICQ at every point
    int indeterminate_trials = 0;  // some point undecided within the tolerance band
    int empty_trials = 0;          // no stationary point found
    int points_total = 0;
    double nondegenerate_fraction = 0.0;
    double licq_fraction = 0.0;
};

ProbeReport genericity_probe(const Problem& p, int trials, double magnitude,
                             std::uint64_t rng_seed, const SolveConfig& cfg, const Tolerances& t);

}  // namespace ccop
