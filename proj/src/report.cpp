#include "ccop/report.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace ccop::report {

namespace {

Json one_based(const std::vector<int>& idx) {
    Json a = Json::array();
    for (int i : idx) a.push_back(i + 1);
    return a;
}

Json vec(const Eigen::VectorXd& v) {
    Json a = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Json inertia_json(const Inertia& in) {
    return Json{{"positive", in.n_pos}, {"negative", in.n_neg}, {"zero", in.n_zero}};
}

template <class T>
Json opt(const std::optional<T>& v) {
    return v ? Json(*v) : Json(nullptr);
}

Json sosc_json(const SoscVerdict& v) {
    Json j;
    j["status"] = std::string(to_string(v.status));
    j["witness"] = v.witness ? vec(*v.witness) : Json(nullptr);
    j["samples_used"] = v.samples_used;
    j["min_value"] = opt(v.min_value);
    return j;
}

std::string number(double v) {
    if (!std::isfinite(v)) return "null";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    std::string s(buf);
    if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
    return s;
}

bool is_scalar_array(const Json& j) {
    for (const auto& e : j)
        if (e.is_structured()) return false;
    return true;
}

void write(const Json& j, std::string& out, int depth) {
    const std::string pad(static_cast<std::size_t>(2 * (depth + 1)), ' ');
    const std::string close_pad(static_cast<std::size_t>(2 * depth), ' ');
    switch (j.type()) {
        case Json::value_t::object: {
            if (j.empty()) {
                out += "{}";
                return;
            }
            out += "{\n";
            bool first = true;
            for (const auto& [key, value] : j.items()) {
                if (!first) out += ",\n";
                first = false;
                out += pad + Json(key).dump() + ": ";
                write(value, out, depth + 1);
            }
            out += "\n" + close_pad + "}";
            return;
        }
        case Json::value_t::array: {
            if (j.empty()) {
                out += "[]";
                return;
            }
            if (is_scalar_array(j)) {
                out += "[";
                for (std::size_t i = 0; i < j.size(); ++i) {
                    if (i) out += ", ";
                    write(j[i], out, depth + 1);
                }
                out += "]";
                return;
            }
            out += "[\n";
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) out += ",\n";
                out += pad;
                write(j[i], out, depth + 1);
            }
            out += "\n" + close_pad + "]";
            return;
        }
        case Json::value_t::number_float:
            out += number(j.get<double>());
            return;
        default:
            out += j.dump();
    }
}

}  // namespace

Json classification_json(const Problem& p, const Classification& c) {
    Json j;
    Json licq;
    licq["holds"] = c.licq.holds;
    licq["min_singular_value"] = opt(c.licq.min_singular_value);
    licq["max_singular_value"] = c.licq.max_singular_value;
    licq["relative_margin"] = c.licq.relative_margin;
    j["cc_licq"] = licq;
    j["nd1"] = std::string(to_string(c.nd.nd1));
    j["nd2"] = std::string(to_string(c.nd.nd2));
    j["nd3"] = std::string(to_string(c.nd.nd3));
    j["nd4"] = std::string(to_string(c.nd.nd4));
    j["nondegenerate"] = std::string(to_string(c.nd.nondegenerate));
    j["k"] = c.nd.k;
    j["s"] = c.nd.s;
    j["tangent_dim"] = c.nd.tangent_dim;
    j["tangent_inertia"] = inertia_json(c.nd.tangent_inertia);
    j["qi"] = opt(c.nd.qi);
    j["m_index"] = opt(c.nd.m_index);
    j["acc"] = c.acc;
    j["sc"] = c.sc;
    j["local_minimizer"] = opt(c.local_minimizer);

    Json ss;
    ss["status"] = std::string(to_string(c.strong_stability.status));
    ss["reason"] = c.strong_stability.reason;
    if (c.strong_stability.witness)
        ss["witness"] = Json::array({one_based(c.strong_stability.witness->first),
                                     one_based(c.strong_stability.witness->second)});
    else
        ss["witness"] = nullptr;
    Json fam = Json::array();
    for (const auto& m : c.strong_stability.family)
        fam.push_back(Json{{"qstar", one_based(m.Qstar)},
                           {"dim", m.dim},
                           {"inertia", inertia_json(m.inertia)},
                           {"det_sign", m.det_sign}});
    ss["family"] = fam;
    j["strong_stability"] = ss;
    j["ss_minimizer"] = Json{{"status", std::string(to_string(c.ss_minimizer.status))},
                             {"reason", c.ss_minimizer.reason}};
    j["sosc_bs"] = sosc_json(c.sosc_bs);
    j["sosc_pan"] = sosc_json(c.sosc_pan);
    if (c.critical_cone_form)
        j["critical_cone_form"] = Json{{"min", c.critical_cone_form->min},
                                       {"max", c.critical_cone_form->max},
                                       {"samples", c.critical_cone_form->samples}};
    else
        j["critical_cone_form"] = nullptr;
    if (c.nd.nondegenerate == Tri::holds) {
        const CellAttachment cells = attached_cells(p, c.nd);
        Json sup = Json::array();
        for (const auto& J : cells.simplex_supports) sup.push_back(J);
        j["cells"] = Json{{"count", cells.count}, {"dim", cells.dim}, {"simplex_supports", sup}};
    } else {
        j["cells"] = nullptr;
    }
    return j;
}

Json point_json(const Problem& p, const MStationaryPair& pair, const Classification& c,
                const Tolerances& t) {
    const ActiveData ad = active_data(p, pair.x, t);
    Json j;
    j["x"] = vec(pair.x);
    j["objective"] = p.objective().value(pair.x);
    j["support"] = one_based(ad.I1);
    j["zero_set"] = one_based(ad.I0);
    j["active_inequalities"] = one_based(ad.Q0);
    j["lambda"] = vec(pair.lambda);
    j["mu"] = vec(pair.mu);
    j["gamma"] = vec(pair.gamma);
    j["stationarity_residual"] = pair.stationarity_residual;
    j["feasibility_residual"] = pair.feasibility_residual;
    j["classification"] = classification_json(p, c);
    j["notes"] = c.notes;
    return j;
}

Json solver_json(const SolveResult& r) {
    int seeds = 0, converged = 0, accepted = 0;
    for (const auto& s : r.systems) {
        seeds += s.seeds;
        converged += s.converged;
        accepted += s.accepted;
    }
    return Json{{"systems", static_cast<int>(r.systems.size())},
                {"seeds", seeds},
                {"converged", converged},
                {"accepted_roots", accepted},
                {"points", static_cast<int>(r.points.size())}};
}

Json morse_json(const LevelSweepReport& sweep, const std::optional<MountainPass>& mp,
                const std::string& mp_error) {
    Json j;
    j["grid"] = sweep.grid;
    j["levels"] = sweep.levels;
    j["beta0"] = sweep.beta0;
    j["coarse"] = sweep.coarse;
    Json cr = Json::array();
    for (const auto& c : sweep.crossings) {
        Json e;
        e["points"] = one_based(c.points);
        e["value"] = c.value;
        e["level_below"] = c.level_below;
        e["level_above"] = c.level_above;
        e["rule"] = c.rule;
        e["predicted"] = c.predicted;
        e["observed"] = c.observed;
        e["ok"] = c.ok;
        e["indeterminate"] = c.indeterminate;
        cr.push_back(e);
    }
    j["crossings"] = cr;
    j["unbracketed_points"] = one_based(sweep.unbracketed);
    j["deformation_ok"] = sweep.deformation_ok;
    j["violations"] = sweep.violations;
    j["indeterminate"] = sweep.indeterminate;
    if (mp)
        j["mountain_pass"] = Json{{"r", mp->r},     {"r1", mp->r1},   {"r2", mp->r2},
                                  {"lhs", mp->lhs}, {"rhs", mp->rhs}, {"holds", mp->holds}};
    else
        j["mountain_pass"] = nullptr;
    if (!mp_error.empty()) j["mountain_pass_error"] = mp_error;
    return j;
}

Json perturb_json(const Problem& p, const PerturbConfig& pc, const PerturbReport& r,
                  const Tolerances& t) {
    Json j;
    j["linear"] = vec(pc.linear);
    j["quadratic_shift"] = opt(pc.quadratic_shift);
    j["epsilons"] = pc.epsilons;
    j["radius"] = pc.radius;
    j["reference_nondegenerate"] = r.reference_nondegenerate;
    Json rows = Json::array();
    for (const auto& row : r.rows) {
        const Problem q =
            p.with_objective(perturbed_objective(p, pc.linear, row.epsilon, pc.quadratic_shift));
        Json e;
        e["epsilon"] = row.epsilon;
        e["objective"] = q.objective().expr().to_string();
        Json pts = Json::array();
        for (std::size_t i = 0; i < row.points.size(); ++i)
            pts.push_back(point_json(q, row.points[i], row.classes[i], t));
        e["points"] = pts;
        e["near_reference"] = row.near_reference;
        e["nondegenerate_count"] = row.nondegenerate_count;
        e["bifurcation"] = row.bifurcation;
        rows.push_back(e);
    }
    j["rows"] = rows;
    return j;
}

Json probe_json(const ProbeReport& r) {
    return Json{{"trials", r.trials},
                {"magnitude", r.magnitude},
                {"rng_seed", r.rng_seed},
                {"nondegenerate_trials", r.nondegenerate_trials},
                {"licq_trials", r.licq_trials},
                {"indeterminate_trials", r.indeterminate_trials},
                {"empty_trials", r.empty_trials},
                {"points_total", r.points_total},
                {"nondegenerate_fraction", r.nondegenerate_fraction},
                {"licq_fraction", r.licq_fraction}};
}

std::string dump(const Json& j) {
    std::string out;
    write(j, out, 0);
    out += "\n";
    return out;
}

namespace {

std::string compact(const Json& j) {
    if (j.is_number_float()) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", j.get<double>());
        return buf;
    }
    if (j.is_array()) {
        std::string s = "(";
        for (std::size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + compact(j[i]);
        return s + ")";
    }
    if (j.is_string()) return j.get<std::string>();
    return j.dump();
}

void text_points(std::ostringstream& os, const Json& points, const std::string& indent) {
    int idx = 1;
    for (const auto& pt : points) {
        const Json& c = pt["classification"];
        os << indent << "point " << idx++ << ": x = " << compact(pt["x"])
           << ", f = " << compact(pt["objective"]) << "\n";
        os << indent << "  gamma = " << compact(pt["gamma"]) << ", mu = " << compact(pt["mu"])
           << ", lambda = " << compact(pt["lambda"]) << "\n";
        os << indent << "  ND1-ND4: " << compact(c["nd1"]) << ", " << compact(c["nd2"]) << ", "
           << compact(c["nd3"]) << ", " << compact(c["nd4"])
           << "; nondegenerate: " << compact(c["nondegenerate"])
           << "; M-index: " << compact(c["m_index"]) << "\n";
        os << indent << "  strong stability: " << compact(c["strong_stability"]["status"])
           << "; ss minimizer: " << compact(c["ss_minimizer"]["status"])
           << "; SOSC (critical cone): " << compact(c["sosc_bs"]["status"])
           << "; SOSC (tangent cone): " << compact(c["sosc_pan"]["status"]) << "\n";
        for (const auto& n : pt["notes"]) os << indent << "  note: " << n.get<std::string>() << "\n";
    }
}

}  // namespace

std::string text(const Json& r) {
    std::ostringstream os;
    os << "command: " << r["command"].get<std::string>() << "\n";
    os << "M-stationary points: " << r["points"].size() << "\n";
    text_points(os, r["points"], "");
    if (r.contains("morse")) {
        const Json& m = r["morse"];
        os << "lower level sets (grid " << m["grid"] << "):\n";
        for (std::size_t i = 0; i < m["levels"].size(); ++i)
            os << "  level " << compact(m["levels"][i]) << ": " << m["beta0"][i] << " component(s)\n";
        for (const auto& c : m["crossings"])
            os << "  crossing at " << compact(c["value"]) << ": observed " << c["observed"]
               << ", predicted " << compact(c["predicted"]) << " [" << compact(c["rule"]) << "]"
               << (c["indeterminate"].get<bool>() ? " indeterminate" : "")
               << (c["ok"].get<bool>() ? "" : " VIOLATION") << "\n";
        if (!m["mountain_pass"].is_null()) {
            const Json& mp = m["mountain_pass"];
            os << "  mountain pass: r = " << mp["r"] << ", r1 = " << mp["r1"] << ", r2 = " << mp["r2"]
               << ": " << mp["lhs"] << " >= " << mp["rhs"] << " "
               << (mp["holds"].get<bool>() ? "holds" : "fails") << "\n";
        }
    }
    if (r.contains("perturb")) {
        for (const auto& row : r["perturb"]["rows"]) {
            os << "epsilon " << compact(row["epsilon"]) << ": " << row["points"].size()
               << " point(s), near reference " << compact(row["near_reference"])
               << (row["bifurcation"].get<bool>() ? ", bifurcation" : "") << "\n";
            text_points(os, row["points"], "  ");
        }
    }
    if (r.contains("probe")) {
        const Json& p = r["probe"];
        os << "probe: " << p["trials"] << " trial(s), nondegenerate fraction "
           << compact(p["nondegenerate_fraction"]) << ", CC-LICQ fraction "
           << compact(p["licq_fraction"]) << ", indeterminate trials " << p["indeterminate_trials"]
           << "\n";
    }
    return os.str();
}

}  // namespace ccop::report
