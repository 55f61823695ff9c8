#include "seqtest/cli.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "seqtest/analysis.hpp"
#include "seqtest/envelope.hpp"
#include "seqtest/errors.hpp"
#include "seqtest/montecarlo.hpp"
#include "seqtest/penalty.hpp"
#include "seqtest/sensitivity.hpp"
#include "seqtest/solver.hpp"
#include "seqtest/version.hpp"

namespace seqtest::cli {

namespace {

using nlohmann::ordered_json;

// Every number leaves the tool with 12 significant digits.
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

double round12(double v) {
    return std::strtod(fmt(v).c_str(), nullptr);
}

ordered_json num(double v) {
    return round12(v);
}

std::string timestamp() {
    std::time_t t = std::time(nullptr);
    if (const char* fixed = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(fixed, nullptr, 10));
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

struct ParamOptions {
    std::optional<double> K;
    std::optional<double> alpha;
    std::optional<double> sigma;
    std::optional<double> cost;

    void attach(CLI::App* cmd) {
        cmd->add_option("--K", K, "information ratio alpha^2 / (c sigma^2)");
        cmd->add_option("--alpha", alpha, "drift magnitude");
        cmd->add_option("--sigma", sigma, "noise level");
        cmd->add_option("--cost", cost, "observation cost per unit time");
    }

    ProblemParams resolve() const {
        const bool any_raw = alpha || sigma || cost;
        if (K && any_raw) {
            throw ParameterError("give either --K or --alpha/--sigma/--cost, not both");
        }
        if (K) {
            return ProblemParams::from_K(*K);
        }
        if (!alpha) {
            throw ParameterError("missing --K (or --alpha with optional --sigma/--cost)");
        }
        return ProblemParams(*alpha, sigma.value_or(1.0), cost.value_or(1.0));
    }
};

ordered_json manifest(const std::string& command, const std::string& penalty,
                      const std::optional<ProblemParams>& params,
                      const std::optional<std::uint64_t>& seed) {
    ordered_json m;
    m["command"] = command;
    m["penalty"] = penalty;
    if (params) {
        m["params"] = {{"alpha", num(params->alpha())},
                       {"sigma", num(params->sigma())},
                       {"cost", num(params->cost())},
                       {"K", num(params->K())}};
    } else {
        m["params"] = nullptr;
    }
    m["tool_version"] = kVersion;
    m["seed"] = seed ? ordered_json(*seed) : ordered_json(nullptr);
    m["timestamp"] = timestamp();
    return m;
}

ordered_json solution_json(const BoundarySolution& s) {
    const bool two = !s.degenerate();
    auto opt = [two](double v) { return two ? num(v) : ordered_json(nullptr); };
    ordered_json j;
    j["kind"] = to_string(s.kind);
    j["method"] = to_string(s.method);
    j["degenerate"] = s.degenerate();
    j["A"] = opt(s.a_star);
    j["B"] = opt(s.b_star);
    j["pi_lo"] = opt(s.pi_star_lo);
    j["pi_hi"] = opt(s.pi_star_hi);
    j["pi_under"] = opt(s.pi_under);
    j["pi_over"] = opt(s.pi_over);
    j["slope"] = opt(s.slope);
    j["intercept"] = opt(s.intercept);
    j["residual_slope"] = opt(s.residual_slope);
    j["residual_secant"] = opt(s.residual_secant);
    j["fallback"] = s.fallback;
    return j;
}

ordered_json estimate_json(const RiskEstimate& r) {
    return {{"mean_risk", num(r.mean_risk)},
            {"std_error", num(r.std_error)},
            {"mean_stop_time", num(r.mean_stop_time)},
            {"truncated_fraction", num(r.truncated_fraction)},
            {"mean_overshoot", num(r.mean_overshoot)},
            {"n_paths", r.n_paths},
            {"dt", num(r.dt)},
            {"t_max", num(r.t_max)},
            {"unreliable", r.unreliable}};
}

std::string csv_field(const std::optional<double>& v) {
    return v ? fmt(*v) : std::string();
}

const char* kSolveCsvHeader = "kind,method,A,B,pi_lo,pi_hi,pi_under,pi_over,slope,intercept,degenerate";
const char* kSweepCsvHeader = "K,A,B,pi_lo,pi_hi,dA_dK,dB_dK,degenerate";

int cmd_solve(const std::string& penalty_spec, const ParamOptions& po, double tol, std::size_t grid,
              bool json, bool csv, std::ostream& out) {
    const auto p = parse_penalty(penalty_spec);
    const auto params = po.resolve();
    const auto s = solve_auto(p, params, tol, grid);
    if (json) {
        ordered_json doc;
        doc["manifest"] = manifest("solve", penalty_spec, params, std::nullopt);
        doc["solution"] = solution_json(s);
        out << doc.dump(2) << '\n';
    } else if (csv) {
        const bool two = !s.degenerate();
        auto f = [two](double v) { return two ? fmt(v) : std::string(); };
        out << kSolveCsvHeader << '\n'
            << to_string(s.kind) << ',' << to_string(s.method) << ',' << f(s.a_star) << ','
            << f(s.b_star) << ',' << f(s.pi_star_lo) << ',' << f(s.pi_star_hi) << ','
            << f(s.pi_under) << ',' << f(s.pi_over) << ',' << f(s.slope) << ','
            << f(s.intercept) << ',' << (s.degenerate() ? 1 : 0) << '\n';
    } else {
        out << "penalty    " << p.name() << "\nK          " << fmt(params.K())
            << "\nkind       " << to_string(s.kind) << "\nmethod     " << to_string(s.method) << '\n';
        if (!s.degenerate()) {
            out << "A*         " << fmt(s.a_star) << "\nB*         " << fmt(s.b_star)
                << "\npi_lo      " << fmt(s.pi_star_lo) << "\npi_hi      " << fmt(s.pi_star_hi)
                << "\npi_under   " << fmt(s.pi_under) << "\npi_over    " << fmt(s.pi_over)
                << "\nslope      " << fmt(s.slope) << "\nintercept  " << fmt(s.intercept) << '\n';
        } else {
            out << "threshold  " << fmt(p.beta() > 0 ? 1.0 / p.beta() : 0.0)
                << " (stop immediately, V = g)\n";
        }
        if (s.fallback) {
            out << "note       " << s.diagnostics << '\n';
        }
    }
    return s.degenerate() ? kDegenerate : kOk;
}

int cmd_sweep(const std::string& penalty_spec, double k_min, double k_max, std::size_t points,
              bool log_spacing, const std::string& out_path, double tol, std::size_t grid,
              std::ostream& out, std::ostream& err) {
    const auto p = parse_penalty(penalty_spec);
    if (points == 0 || (points > 1 && !(k_min < k_max)) || !(k_min > 0.0)) {
        throw ParameterError("sweep needs 0 < K-min < K-max and points >= 1");
    }
    const auto grid_K = make_grid(k_min, k_max, points, log_spacing);
    const auto rows = sweep(p, grid_K, tol, grid);

    std::ostringstream csv;
    csv << kSweepCsvHeader << '\n';
    for (const auto& r : rows) {
        csv << fmt(r.K) << ',' << csv_field(r.a_star) << ',' << csv_field(r.b_star) << ','
            << csv_field(r.pi_star_lo) << ',' << csv_field(r.pi_star_hi) << ','
            << csv_field(r.dA_dK) << ',' << csv_field(r.dB_dK) << ',' << (r.degenerate ? 1 : 0)
            << '\n';
        if (r.flagged) {
            err << "warning: K = " << fmt(r.K) << ": " << r.note << '\n';
        }
    }

    if (out_path.empty()) {
        out << csv.str();
        return kOk;
    }
    std::ofstream file(out_path, std::ios::binary);
    if (!file) {
        err << "error: cannot write " << out_path << '\n';
        return kUsage;
    }
    file << csv.str();
    auto m = manifest("sweep", penalty_spec, std::nullopt, std::nullopt);
    m["sweep"] = {{"K_min", num(k_min)},   {"K_max", num(k_max)}, {"points", points},
                  {"log", log_spacing},    {"tol", num(tol)},     {"envelope_points", grid}};
    std::ofstream mfile(out_path + ".manifest.json", std::ios::binary);
    if (!file || !mfile) {
        err << "error: cannot write " << out_path << '\n';
        return kUsage;
    }
    mfile << m.dump(2) << '\n';
    out << "wrote " << rows.size() << " rows to " << out_path << '\n';
    return kOk;
}

struct SimulateOptions {
    double prior = 0.5;
    std::size_t paths = 100000;
    double dt = 1e-4;
    std::optional<double> t_max;
    std::optional<std::uint64_t> seed;
    std::optional<double> perturb;
    std::string out_path;
    std::size_t grid = kEnvelopeOraclePoints;
};

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& seed) {
    if (seed) {
        return *seed;
    }
    if (const char* env = std::getenv("SEQTEST_SEED")) {
        char* end = nullptr;
        const auto v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            throw ParameterError("SEQTEST_SEED must be an unsigned integer");
        }
        return v;
    }
    return 1;
}

int cmd_simulate(const std::string& penalty_spec, const ParamOptions& po, const SimulateOptions& so,
                 std::ostream& out, std::ostream& err) {
    const auto p = parse_penalty(penalty_spec);
    const auto params = po.resolve();
    const std::uint64_t seed = resolve_seed(so.seed);
    SimConfig cfg{so.prior, so.paths, so.dt, so.t_max.value_or(default_t_max(params)), seed};
    validate_config(cfg);
    if (so.perturb && !(*so.perturb > 0.0 && *so.perturb < 0.5)) {
        throw ParameterError("--perturb must lie in (0, 0.5)");
    }

    const auto s = solve_auto(p, params, kDefaultTol, so.grid);
    const ValueFunction v(s, p, params);

    ordered_json doc;
    doc["manifest"] = manifest("simulate", penalty_spec, params, seed);
    doc["config"] = {{"prior", num(cfg.prior)}, {"paths", cfg.n_paths}, {"dt", num(cfg.dt)},
                     {"t_max", num(cfg.t_max)}};
    doc["value_at_prior"] = num(value_at(v, cfg.prior));
    doc["solution"] = solution_json(s);
    if (s.degenerate()) {
        doc["analytic"] = true;
        doc["risk"] = num(p.value(cfg.prior));
    } else {
        doc["analytic"] = false;
        const auto opt = estimate_risk(params, p, s.a_star, s.b_star, cfg);
        doc["optimal"] = estimate_json(opt);
        if (opt.unreliable) {
            err << "warning: " << fmt(100.0 * opt.truncated_fraction)
                << "% of paths hit t_max; estimate unreliable\n";
        }
        if (so.perturb) {
            const double d = *so.perturb;
            auto clamp = [](double x) { return std::clamp(x, 1e-9, 1.0 - 1e-9); };
            struct Variant {
                const char* label;
                double a;
                double b;
            };
            const Variant variants[] = {{"A-d", clamp(s.a_star - d), s.b_star},
                                        {"A+d", clamp(s.a_star + d), s.b_star},
                                        {"B-d", s.a_star, clamp(s.b_star - d)},
                                        {"B+d", s.a_star, clamp(s.b_star + d)}};
            ordered_json list = ordered_json::array();
            for (const auto& var : variants) {
                const double a = std::min(var.a, var.b);
                const double b = std::max(var.a, var.b);
                list.push_back({{"label", var.label},
                                {"A", num(a)},
                                {"B", num(b)},
                                {"estimate", estimate_json(estimate_risk(params, p, a, b, cfg))}});
            }
            doc["perturbations"] = list;
            doc["perturb_delta"] = num(d);
        }
    }

    const std::string text = doc.dump(2) + "\n";
    if (so.out_path.empty()) {
        out << text;
    } else {
        std::ofstream file(so.out_path, std::ios::binary);
        if (!(file << text)) {
            err << "error: cannot write " << so.out_path << '\n';
            return kUsage;
        }
    }
    return kOk;
}

struct CheckRow {
    std::string name;
    bool passed;
    std::string detail;
};

int cmd_validate(const std::string& penalty_spec, const ParamOptions& po, std::size_t grid,
                 std::ostream& out) {
    const auto p = parse_penalty(penalty_spec);
    const auto params = po.resolve();
    std::vector<CheckRow> rows;

    if (p.smooth()) {
        const auto rep = validate_assumptions(p, 1000);
        rows.push_back({"assumptions", rep.passed,
                        rep.passed ? "concave, vanishing at 0 and 1, Ag unimodal (1000-point grid)"
                                   : rep.failed_check + " at " + fmt(rep.violation_at.value_or(0))});
    } else {
        rows.push_back({"assumptions", true, "skipped: kinked penalty"});
    }

    BoundarySolution s;
    bool solved = false;
    try {
        s = solve_auto(p, params, kDefaultTol, grid);
        solved = true;
        const double scale_slope = std::max(1.0, std::abs(s.slope));
        const double scale_h = std::max(1.0, std::abs(s.intercept) + std::abs(s.slope));
        const bool ok = s.degenerate() ||
                        (!s.fallback && s.residual_slope <= kResidualTol * scale_slope &&
                         s.residual_secant <= kResidualTol * scale_h) ||
                        !p.smooth();
        std::string detail = s.degenerate() ? "degenerate: V = g, stop immediately"
                                            : "A* = " + fmt(s.a_star) + ", B* = " + fmt(s.b_star) +
                                                  " (" + to_string(s.method) + ")";
        if (s.fallback) {
            detail += "; " + s.diagnostics;
        }
        rows.push_back({"solve", ok, detail});
    } catch (const std::exception& e) {
        rows.push_back({"solve", false, e.what()});
    }

    if (solved && p.smooth()) {
        const auto env = convex_envelope(p, params, grid);
        const auto c = boundaries_from_envelope(env);
        const bool env_ok = c.status != EnvelopeStatus::MultiRegion;
        rows.push_back({"envelope", env_ok,
                        std::to_string(env.affine_segments.size()) + " affine segment(s) on " +
                            std::to_string(grid) + " points"});
        const double tol = 5.0 / static_cast<double>(grid);
        bool agree = false;
        std::string detail;
        if (s.degenerate()) {
            agree = c.status == EnvelopeStatus::Degenerate;
            detail = agree ? "both degenerate" : "envelope found a continuation region";
        } else if (c.status == EnvelopeStatus::TwoBoundary) {
            const double da = std::abs(s.a_star - c.left);
            const double db = std::abs(s.b_star - c.right);
            agree = da <= tol && db <= tol;
            detail = "|dA| = " + fmt(da) + ", |dB| = " + fmt(db) + ", tol " + fmt(tol);
        } else {
            detail = "envelope has no single affine segment";
        }
        rows.push_back({"agreement", agree, detail});
        if (!s.degenerate()) {
            const bool nested = s.pi_under <= s.a_star && s.a_star < s.pi_star_lo &&
                                s.pi_star_lo < s.pi_star_hi && s.pi_star_hi < s.b_star &&
                                s.b_star <= s.pi_over;
            rows.push_back({"ordering", nested, "pi_under <= A* < pi_* < pi^* < B* <= pi_over"});
        }
    }

    const CheckRow* first_fail = nullptr;
    for (const auto& r : rows) {
        out << std::left << std::setw(12) << r.name << std::setw(6) << (r.passed ? "PASS" : "FAIL")
            << r.detail << '\n';
        if (!r.passed && !first_fail) {
            first_fail = &r;
        }
    }
    if (first_fail) {
        out << "validation failed: " << first_fail->name << '\n';
        return kValidationFailed;
    }
    out << "all checks passed\n";
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Optimal stopping boundaries for soft-classification sequential testing"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    std::string penalty;
    ParamOptions params;
    double tol = kDefaultTol;
    std::size_t grid = kEnvelopeOraclePoints;

    auto* solve_cmd = app.add_subcommand("solve", "optimal boundaries for one K");
    solve_cmd->add_option("penalty", penalty, "ce:a1,a2 | l1 | l2 | classic:a1,a2")->required();
    params.attach(solve_cmd);
    solve_cmd->add_option("--tol", tol, "bisection tolerance");
    solve_cmd->add_option("--grid", grid, "envelope grid size (kinked penalties)");
    bool json = false;
    bool csv = false;
    auto* json_flag = solve_cmd->add_flag("--json", json, "JSON report with manifest");
    solve_cmd->add_flag("--csv", csv, "single-row CSV")->excludes(json_flag);

    auto* sweep_cmd = app.add_subcommand("sweep", "boundaries over a K grid");
    double k_min = 0.0;
    double k_max = 0.0;
    std::size_t points = 0;
    bool log_spacing = false;
    std::string sweep_out;
    std::size_t sweep_grid = kEnvelopeTestPoints;
    sweep_cmd->add_option("penalty", penalty, "ce:a1,a2 | l1 | l2 | classic:a1,a2")->required();
    sweep_cmd->add_option("--K-min", k_min)->required();
    sweep_cmd->add_option("--K-max", k_max)->required();
    sweep_cmd->add_option("--points", points)->required();
    sweep_cmd->add_flag("--log", log_spacing, "log-spaced K grid");
    sweep_cmd->add_option("--out", sweep_out, "CSV file (stdout if omitted)");
    sweep_cmd->add_option("--tol", tol);
    sweep_cmd->add_option("--grid", sweep_grid, "envelope grid size (kinked penalties)");

    auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo risk of the optimal rule");
    SimulateOptions so;
    sim_cmd->add_option("penalty", penalty, "ce:a1,a2 | l1 | l2 | classic:a1,a2")->required();
    params.attach(sim_cmd);
    sim_cmd->add_option("--prior", so.prior);
    sim_cmd->add_option("--paths", so.paths);
    sim_cmd->add_option("--dt", so.dt);
    sim_cmd->add_option("--t-max", so.t_max);
    sim_cmd->add_option("--seed", so.seed, "defaults to $SEQTEST_SEED, then 1");
    sim_cmd->add_option("--perturb", so.perturb, "also simulate A+-d and B+-d");
    sim_cmd->add_option("--out", so.out_path, "JSON file (stdout if omitted)");
    sim_cmd->add_option("--grid", so.grid, "envelope grid size (kinked penalties)");

    auto* val_cmd = app.add_subcommand("validate", "assumption checks and solver/envelope agreement");
    std::size_t val_grid = kEnvelopeTestPoints;
    val_cmd->add_option("penalty", penalty, "ce:a1,a2 | l1 | l2 | classic:a1,a2")->required();
    params.attach(val_cmd);
    val_cmd->add_option("--grid", val_grid, "envelope grid size");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (solve_cmd->parsed()) {
            return cmd_solve(penalty, params, tol, grid, json, csv, out);
        }
        if (sweep_cmd->parsed()) {
            return cmd_sweep(penalty, k_min, k_max, points, log_spacing, sweep_out, tol, sweep_grid,
                             out, err);
        }
        if (sim_cmd->parsed()) {
            return cmd_simulate(penalty, params, so, out, err);
        }
        if (val_cmd->parsed()) {
            return cmd_validate(penalty, params, val_grid, out);
        }
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailed;
    }
    return kUsage;
}

}  // namespace seqtest::cli
