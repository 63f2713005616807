#include "ccop/cli.hpp"

#include "ccop/error.hpp"
#include "ccop/report.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <fstream>
#include <ostream>
#include <cmath>
#include <optional>
#include <string_view>

namespace ccop {

namespace {

using report::Json;

struct Options {
    std::string problem;
    double tol = kDefaultTol;
    int seeds = 64;
    std::uint64_t rng_seed = 0;
    int threads = 1;
    std::string out;
    std::string format = "json";
    int sosc_samples = 10000;
    // morse
    int grid = 201;
    std::string levels = "auto";
    // perturb
    std::string linear;
    std::string epsilons = "0";
    double radius = 0.5;
    std::optional<double> shift;
    // probe
    int trials = 100;
    double magnitude = 1e-2;
};

class UsageError : public Error {
public:
    using Error::Error;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string::npos) end = text.size();
        std::string_view item(text.data() + pos, end - pos);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.front()))) item.remove_prefix(1);
        while (!item.empty() && std::isspace(static_cast<unsigned char>(item.back()))) item.remove_suffix(1);
        if (!item.empty() && item.front() == '+') item.remove_prefix(1);
        double v = 0.0;
        auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (item.empty() || res.ec != std::errc() || res.ptr != item.data() + item.size() ||
            !std::isfinite(v))
            throw UsageError(std::string("malformed ") + what + " list '" + text + "'");
        out.push_back(v);
        pos = end + 1;
    }
    return out;
}

Json config_json(const std::string& command, const Options& o, const SolveConfig& cfg) {
    Json c;
    c["tol"] = o.tol;
    c["seeds"] = cfg.seeds_per_system;
    c["rng_seed"] = cfg.rng_seed;
    c["max_newton_iters"] = cfg.max_newton_iters;
    c["newton_tol"] = cfg.newton_tol;
    c["cluster_radius"] = cfg.cluster_radius;
    c["sosc_samples"] = o.sosc_samples;
    if (command == "morse") {
        c["grid"] = o.grid;
        c["levels"] = o.levels;
    }
    if (command == "perturb") {
        c["linear"] = o.linear;
        c["epsilons"] = o.epsilons;
        c["radius"] = o.radius;
        c["shift"] = o.shift ? Json(*o.shift) : Json(nullptr);
    }
    if (command == "probe") {
        c["trials"] = o.trials;
        c["magnitude"] = o.magnitude;
    }
    return c;
}

int execute(const std::string& command, const Options& o, std::ostream& out, std::ostream& err) {
    if (o.format != "json" && o.format != "text") throw UsageError("format must be json or text");
    if (!(o.tol > 0.0)) throw UsageError("tol must be positive");
    if (o.seeds < 1) throw UsageError("seeds must be >= 1");
    if (o.threads < 1) throw UsageError("threads must be >= 1");

    const Problem p = load_problem(o.problem);
    const Tolerances t = Tolerances::uniform(o.tol);
    SolveConfig cfg;
    cfg.seeds_per_system = o.seeds;
    cfg.rng_seed = o.rng_seed;
    cfg.threads = o.threads;
    SoscConfig sc;
    sc.samples = o.sosc_samples;

    std::optional<std::vector<double>> levels;
    PerturbConfig pc;
    if (command == "morse") {
        if (!p.compact_feasible_asserted()) {
            err << "error: Morse analysis requires compact_feasible = true in the problem file\n";
            return kExitNotCompact;
        }
        if (o.grid < 2) throw UsageError("grid must be >= 2");
        if (o.levels != "auto") levels = parse_list(o.levels, "level");
    }
    if (command == "perturb") {
        if (o.linear.empty()) throw UsageError("--linear is required");
        const auto c = parse_list(o.linear, "linear");
        if (static_cast<int>(c.size()) != p.n())
            throw UsageError("--linear needs exactly n = " + std::to_string(p.n()) + " entries");
        pc.linear = Eigen::Map<const Eigen::VectorXd>(c.data(), static_cast<Eigen::Index>(c.size()));
        pc.epsilons = parse_list(o.epsilons, "epsilon");
        pc.radius = o.radius;
        pc.quadratic_shift = o.shift;
    }
    if (command == "probe" && o.trials < 1) throw UsageError("trials must be >= 1");
    if (command == "probe" && !(o.magnitude >= 0.0)) throw UsageError("magnitude must be >= 0");

    const SolveResult solved = solve_all(p, cfg, t);
    std::vector<Classification> classes;
    for (const auto& pair : solved.points) classes.push_back(classify(p, pair, t, sc));

    bool indeterminate = false;
    Json r;
    r["tool_version"] = report::kToolVersion;
    r["command"] = command;
    r["config"] = config_json(command, o, cfg);
    r["problem"] = p.canonical_text();
    Json points = Json::array();
    for (std::size_t i = 0; i < solved.points.size(); ++i) {
        points.push_back(report::point_json(p, solved.points[i], classes[i], t));
        indeterminate |= classes[i].has_indeterminate();
    }
    r["points"] = points;
    r["solver"] = report::solver_json(solved);

    if (command == "morse") {
        bool degenerate = false;
        for (const auto& c : classes) degenerate |= c.nd.nondegenerate != Tri::holds;
        const LevelSweepReport sweep = level_sweep(p, solved.points, classes, o.grid, t, levels);
        std::optional<MountainPass> mp;
        std::string mp_error;
        try {
            mp = mountain_pass_check(p, classes);
        } catch (const PreconditionError& e) {
            mp_error = e.what();
        }
        r["morse"] = report::morse_json(sweep, mp, mp_error);
        indeterminate |= degenerate || sweep.indeterminate || sweep.violations;
        if (degenerate) err << "warning: degenerate M-stationary point present\n";
    }
    if (command == "perturb") {
        const PerturbReport pr = perturb_experiment(p, pc, cfg, t, sc);
        for (const auto& row : pr.rows)
            for (const auto& c : row.classes) indeterminate |= c.has_indeterminate();
        r["perturb"] = report::perturb_json(p, pc, pr, t);
    }
    if (command == "probe") {
        const ProbeReport pr = genericity_probe(p, o.trials, o.magnitude, o.rng_seed, cfg, t);
        indeterminate |= pr.indeterminate_trials > 0;
        r["probe"] = report::probe_json(pr);
    }
    r["indeterminate"] = indeterminate;

    const std::string body = o.format == "json" ? report::dump(r) : report::text(r);
    if (o.out.empty()) {
        out << body;
    } else {
        std::ofstream f(o.out, std::ios::binary);
        if (!f) throw UsageError("cannot write '" + o.out + "'");
        f << body;
        if (!f) throw UsageError("failed writing '" + o.out + "'");
    }
    if (indeterminate) err << "note: indeterminate verdict present\n";
    return indeterminate ? kExitIndeterminate : kExitOk;
}

void add_common(CLI::App* sub, Options& o) {
    sub->add_option("--problem", o.problem, "problem file")->required();
    sub->add_option("--tol", o.tol, "relative tolerance")->capture_default_str();
    sub->add_option("--seeds", o.seeds, "Newton seeds per system")->capture_default_str();
    sub->add_option("--rng-seed", o.rng_seed, "seed for the start sequence and the probe")
        ->capture_default_str();
    sub->add_option("--threads", o.threads, "worker threads (output does not depend on it)")
        ->capture_default_str();
    sub->add_option("--sosc-samples", o.sosc_samples, "sampled directions per cone piece")
        ->capture_default_str();
    sub->add_option("--out", o.out, "report path (default: standard output)");
    sub->add_option("--format", o.format, "json or text")->capture_default_str();
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Analysis of cardinality-constrained optimization problems", "ccop"};
    app.require_subcommand(1);
    Options o;

    auto* analyze = app.add_subcommand("analyze", "find and classify all M-stationary points");
    add_common(analyze, o);

    auto* morse = app.add_subcommand("morse", "lower level sets, transition rules, mountain pass");
    add_common(morse, o);
    morse->add_option("--grid", o.grid, "grid nodes per axis")->capture_default_str();
    morse->add_option("--levels", o.levels, "auto or a comma-separated list")->capture_default_str();

    auto* perturb = app.add_subcommand("perturb", "re-solve with f + eps * c^T x");
    add_common(perturb, o);
    perturb->add_option("--linear", o.linear, "c1,...,cn")->required()->allow_extra_args(false);
    perturb->add_option("--epsilons", o.epsilons, "e1,e2,...")->capture_default_str();
    perturb->add_option("--radius", o.radius, "neighbourhood radius for bifurcation counts")
        ->capture_default_str();
    perturb->add_option("--shift", o.shift, "constant added as eps^2 * shift");

    auto* probe = app.add_subcommand("probe", "random linear perturbations, nondegeneracy rate");
    add_common(probe, o);
    probe->add_option("--trials", o.trials, "number of trials")->capture_default_str();
    probe->add_option("--magnitude", o.magnitude, "perturbation size")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    }

    std::string command;
    for (auto* sub : {analyze, morse, perturb, probe})
        if (sub->parsed()) command = sub->get_name();
    try {
        return execute(command, o, out, err);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace ccop
