#pragma once

// Classification of an M-stationary pair: nondegeneracy, M-index, strong
// stability, cones at the point and the two second-order sufficient
// conditions.

#include "ccop/problem.hpp"
#include "ccop/stationarity.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace ccop {

/// Three-valued outcome of a sign decision.
enum class Tri { holds, fails, indeterminate };

std::string_view to_string(Tri t);

/// value > 10*tol holds, value < tol fails, anything in between is
/// indeterminate.
Tri decide_positive(double value, double tol);

/// Any fails wins, then any indeterminate, otherwise holds.
Tri tri_and(std::initializer_list<Tri> parts);

enum class Status { holds, fails, indeterminate, hypothesis_unmet, precondition_unmet };

std::string_view to_string(Status s);

struct Nondegeneracy {
    Tri nd1 = Tri::fails;
    Tri nd2 = Tri::fails;
    Tri nd3 = Tri::fails;
    Tri nd4 = Tri::fails;
    Tri nondegenerate = Tri::fails;
    int k = 0;
    int s = 0;
    int tangent_dim = 0;      // dim T M0
    Inertia tangent_inertia;  // of D^2 L restricted to T M0
    std::optional<int> qi;       // when nd4 holds
    std::optional<int> m_index;  // when nondegenerate holds
};

Nondegeneracy check_nondegeneracy(const Problem& p, const MStationaryPair& pair,
                                  const Tolerances& t);

/// For a nondegenerate pair: m_index == 0. The equivalent route CC-LICQ, SC,
/// ACC and positive definiteness on T M0 is evaluated as well and must agree.
/// Throws PreconditionError for degenerate pairs.
bool is_local_min_nd(const Problem& p, const MStationaryPair& pair, const Tolerances& t);

/// Inequalities with multiplier above tol (0-based, ascending).
std::vector<int> positive_multipliers(const Problem& p, const MStationaryPair& pair,
                                      const Tolerances& t);

struct StabilityMember {
    std::vector<int> Qstar;  // 0-based
    int dim = 0;
    Inertia inertia;
    int det_sign = 1;
};

struct StrongStability {
    Status status = Status::fails;
    std::string reason;
    /// On failure through the determinant family: the first subset and the
    /// first offending one (equal when the first is already singular).
    std::optional<std::pair<std::vector<int>, std::vector<int>>> witness;
    std::vector<StabilityMember> family;  // binary-counter order over Q0 \ Q+
};

StrongStability check_strong_stability(const Problem& p, const MStationaryPair& pair,
                                       const Tolerances& t);

struct SsMinimizer {
    Status status = Status::precondition_unmet;
    std::string reason;
};

SsMinimizer check_ss_minimizer(const Problem& p, const MStationaryPair& pair,
                               const Tolerances& t);

/// {xi : E xi = 0, G xi >= 0, xi_i = 0 on zero_coords, supp xi in some piece}.
/// With no pieces there is no support restriction.
struct ConeDescription {
    int ambient_dim = 0;
    Eigen::MatrixXd equalities;
    Eigen::MatrixXd inequalities;
    std::vector<int> zero_coords;
    std::vector<std::vector<int>> pieces;

    bool contains(const Eigen::VectorXd& xi, double tol) const;
};

/// Supports J with I1 subset J and |J| = s when k < s, otherwise {I1}.
std::vector<std::vector<int>> cardinality_pieces(int n, int s, const std::vector<int>& I1);

/// Definitional critical cone: linearization with Df xi <= 0, as pieces.
ConeDescription critical_cone(const Problem& p, const MStationaryPair& pair, const Tolerances& t);

/// Literal membership test: counts zero coordinates of xi on I0.
bool critical_cone_member(const Problem& p, const MStationaryPair& pair, const Eigen::VectorXd& xi,
                          const Tolerances& t);

/// Constraint-only representation valid under ACC. Throws PreconditionError
/// without ACC.
ConeDescription critical_cone_acc(const Problem& p, const MStationaryPair& pair,
                                  const Tolerances& t);

/// Cardinality part only: pieces, no rows.
ConeDescription tangent_cone_bouligand(const Problem& p, const MStationaryPair& pair,
                                       const Tolerances& t);

/// Linearization for Q+ intersected with the cardinality tangent cone.
ConeDescription pan_cone(const Problem& p, const MStationaryPair& pair, const Tolerances& t);

enum class SoscStatus { holds_exact, holds_sampled, fails_with_witness, indeterminate };

std::string_view to_string(SoscStatus s);

struct SoscVerdict {
    SoscStatus status = SoscStatus::indeterminate;
    std::optional<Eigen::VectorXd> witness;  // unit vector in the cone
    int samples_used = 0;
    /// Smallest value of the form found on unit vectors of the cone; empty
    /// when the cone is {0}.
    std::optional<double> min_value;
};

struct SoscConfig {
    int samples = 10000;
    std::uint64_t seed = 0;
};

SoscVerdict check_sosc(const Eigen::MatrixXd& H, const ConeDescription& cone, double tol,
                       const SoscConfig& cfg = {});

SoscVerdict check_sosc_bs(const Problem& p, const MStationaryPair& pair, const Tolerances& t,
                          const SoscConfig& cfg = {});
SoscVerdict check_sosc_pan(const Problem& p, const MStationaryPair& pair, const Tolerances& t,
                           const SoscConfig& cfg = {});

struct FormRange {
    double min = 0.0;
    double max = 0.0;
    int samples = 0;
};

/// Range of xi^T H xi over unit vectors of the cone, by face enumeration and
/// sampling. Empty when the cone is {0}.
std::optional<FormRange> form_range(const Eigen::MatrixXd& H, const ConeDescription& cone,
                                    double tol, const SoscConfig& cfg = {});

struct Classification {
    CCLicqReport licq;
    Nondegeneracy nd;
    bool acc = false;
    bool sc = false;
    std::optional<bool> local_minimizer;  // when nondegenerate
    StrongStability strong_stability;
    SsMinimizer ss_minimizer;
    SoscVerdict sosc_bs;
    SoscVerdict sosc_pan;
    std::optional<FormRange> critical_cone_form;
    std::vector<std::string> notes;

    /// True when any evaluated verdict is indeterminate.
    bool has_indeterminate() const;
};

Classification classify(const Problem& p, const MStationaryPair& pair, const Tolerances& t,
                        const SoscConfig& cfg = {});

}  // namespace ccop
