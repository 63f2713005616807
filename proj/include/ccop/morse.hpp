#pragma once

// Lower level sets on a grid over the sparsity variety: component counts,
// transition rules at stationary values, attached cells and the
// mountain-pass count.

#include "ccop/classify.hpp"
#include "ccop/problem.hpp"

#include <optional>
#include <string>
#include <vector>

namespace ccop {

struct ComponentCount {
    int components = 0;
    /// Some component has fewer than three grid nodes.
    bool coarse = false;
    long long nodes = 0;  // kept nodes
};

/// Requires compact_feasible_asserted and n <= 4. Nodes lie on the union of
/// the coordinate subspaces of dimension s; nodes with zero coordinates are
/// shared between supports.
ComponentCount lower_level_components(const Problem& p, double level, int grid_per_axis,
                                      const Tolerances& t);

struct Crossing {
    std::vector<int> points;  // indices into the stationary point list
    double value = 0.0;
    double level_below = 0.0;
    double level_above = 0.0;
    std::vector<int> predicted;  // admissible component-count changes, ascending
    int observed = 0;
    bool ok = false;
    /// Coincident stationary values or an unclassifiable point.
    bool indeterminate = false;
    std::string rule;
};

struct LevelSweepReport {
    int grid = 0;
    std::vector<double> levels;
    std::vector<int> beta0;
    std::vector<bool> coarse;
    std::vector<Crossing> crossings;
    /// beta0 constant on the sampled levels between consecutive values.
    bool deformation_ok = true;
    bool violations = false;
    bool indeterminate = false;
    /// Stationary values not bracketed by the sampled levels.
    std::vector<int> unbracketed;
};

/// Admissible changes of beta0 when crossing one nondegenerate point.
std::vector<int> predicted_deltas(const Problem& p, const Nondegeneracy& nd, std::string* rule = nullptr);

/// Levels: margins below and above the stationary values and three levels in
/// each gap, unless given explicitly.
LevelSweepReport level_sweep(const Problem& p, const std::vector<MStationaryPair>& points,
                             const std::vector<Classification>& classes, int grid_per_axis,
                             const Tolerances& t,
                             const std::optional<std::vector<double>>& levels = std::nullopt);

struct CellAttachment {
    int count = 0;
    int dim = 0;
    std::vector<std::vector<int>> simplex_supports;  // 1-based subsets of {1..n-k}
};

long long binomial(int a, int b);

CellAttachment attached_cells(const Problem& p, const Nondegeneracy& nd);

struct MountainPass {
    int r = 0;   // minimizers
    int r1 = 0;  // M-index 1 with k = s
    int r2 = 0;  // M-index 1 with k = s - 1
    int lhs = 0;
    int rhs = 0;
    bool holds = false;
};

/// Refuses (PreconditionError) without the compactness flag or with a
/// degenerate point.
MountainPass mountain_pass_check(const Problem& p, const std::vector<Classification>& classes);

}  // namespace ccop
