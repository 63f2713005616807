#pragma once

// JSON report assembly. Index sets are written 1-based, floats with 17
// significant digits.

#include "ccop/classify.hpp"
#include "ccop/experiments.hpp"
#include "ccop/morse.hpp"

#include <json.hpp>

#include <optional>
#include <string>

namespace ccop::report {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

Json point_json(const Problem& p, const MStationaryPair& pair, const Classification& c,
                const Tolerances& t);
Json classification_json(const Problem& p, const Classification& c);
Json solver_json(const SolveResult& r);
Json morse_json(const LevelSweepReport& sweep, const std::optional<MountainPass>& mp,
                const std::string& mp_error);
Json perturb_json(const Problem& p, const PerturbConfig& pc, const PerturbReport& r,
                  const Tolerances& t);
Json probe_json(const ProbeReport& r);

/// Pretty-printed JSON; floats as %.17g (always with a decimal point or
/// exponent), non-finite floats as null.
std::string dump(const Json& j);

/// Short human-readable rendering of a report.
std::string text(const Json& report);

}  // namespace ccop::report
