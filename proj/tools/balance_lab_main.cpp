#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "balance_lab/covering.hpp"
#include "balance_lab/csv.hpp"
#include "balance_lab/estimates.hpp"
#include "balance_lab/heisenberg.hpp"
#include "balance_lab/scenario.hpp"
#include "balance_lab/solver.hpp"

namespace {

using namespace balance_lab;

struct ScenarioArgs {
    std::string scenario;
    std::string out;
};

void add_scenario_options(CLI::App* cmd, ScenarioArgs& args) {
    cmd->add_option("--scenario", args.scenario, "scenario config file")->required();
    cmd->add_option("--out", args.out, "output directory (default: [run] out)");
}

int run_filtered(const ScenarioArgs& args, const std::vector<std::string>& kinds) {
    const Config cfg = Config::parse_file(args.scenario);
    std::string out = args.out;
    if (out.empty()) {
        if (const Section* r = cfg.find("run")) out = r->get_string("out", "out");
        if (out.empty()) out = "out";
    }
    const ScenarioResult result = run_scenario(cfg, out, kinds);
    for (const CheckRow& c : result.checks)
        std::cout << (c.pass() ? "[pass] " : "[FAIL] ") << c.name << " = "
                  << format_double(c.value) << (c.lower_bound ? " >= " : " <= ")
                  << format_double(c.bound) << "\n";
    std::cout << "wrote " << result.outputs.size() << " file(s) under " << out << "\n";
    return result.exit_code;
}

Interval parse_interval_arg(const std::vector<double>& v, const char* what) {
    if (v.size() != 2 || !(v[0] < v[1]))
        throw ConfigError(std::string(what) + " expects two numbers lo < hi");
    return {v[0], v[1]};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "balance_lab: builds continuous balance-law solutions by characteristics and "
        "numerically checks their regularity estimates (Holder constants, band balances, "
        "covering averages, intrinsic-graph residuals)."};
    app.require_subcommand(1);

    ScenarioArgs run_args, solve_args, daf_args, holder_args, osc_args, cov_args, flux_args;

    auto* cmd_run = app.add_subcommand("run", "execute every operation of a scenario file");
    add_scenario_options(cmd_run, run_args);

    auto* cmd_solve =
        app.add_subcommand("solve", "solve/export field ops (kinds: solve, weak_residual)");
    add_scenario_options(cmd_solve, solve_args);

    auto* cmd_daf = app.add_subcommand(
        "verify-dafermos", "band balance checks beside a characteristic, width 𝔥 "
                           "(kinds: dafermos, lipschitz)");
    add_scenario_options(cmd_daf, daf_args);

    auto* cmd_holder = app.add_subcommand(
        "holder", "1/ℓ-Holder seminorm and exponent fit (kind: holder)");
    add_scenario_options(cmd_holder, holder_args);

    auto* cmd_osc = app.add_subcommand(
        "oscillation", "pointwise oscillation survey A_δ (kind: oscillation)");
    add_scenario_options(cmd_osc, osc_args);

    auto* cmd_cov = app.add_subcommand(
        "covering", "Lebesgue-point averages over tilted regions S_ρ(γ, ε, "
                    "σ) (kind: covering)");
    add_scenario_options(cmd_cov, cov_args);

    // flux-audit: scenario mode or direct flags
    auto* cmd_flux = app.add_subcommand(
        "flux-audit", "nonlinearity constant c_ℓ, inflection zeros, convexity ratio q, "
                      "derivative separation");
    std::vector<double> flux_poly, flux_interval;
    int flux_order = 2, flux_n = 512;
    std::string flux_builtin, flux_out = "audit.csv";
    cmd_flux->add_option("--scenario", flux_args.scenario, "scenario file (kind: flux_audit)");
    cmd_flux->add_option("--out", flux_args.out, "output directory / audit csv path");
    cmd_flux->add_option("--poly", flux_poly,
                         "polynomial coefficients c0,c1,... (ascending degree)")
        ->delimiter(',');
    cmd_flux->add_option("--builtin", flux_builtin, "burgers | cubic | quartic");
    cmd_flux->add_option("--interval", flux_interval, "working interval a,b")->delimiter(',');
    cmd_flux->add_option("--order", flux_order, "nonlinearity order ℓ (>= 2)");
    cmd_flux->add_option("--n", flux_n, "scan grid size (>= 64)");

    // heisenberg group of subcommands
    auto* cmd_heis = app.add_subcommand("heisenberg",
                                        "first Heisenberg group checks and intrinsic graphs");
    cmd_heis->require_subcommand(1);

    ScenarioArgs heis_args;
    auto* cmd_heis_run =
        cmd_heis->add_subcommand("ops", "run heisenberg ops of a scenario (kinds: rademacher, "
                                        "intrinsic_lip, graph_balance, heisenberg_audit)");
    add_scenario_options(cmd_heis_run, heis_args);

    std::string surf_csv, surf_builtin, surf_out = "rademacher.csv";
    std::vector<double> surf_point{0.0, 0.5};
    std::vector<double> surf_scales{0.2, 0.1, 0.05, 0.025};
    std::vector<double> surf_breaks;
    double surf_tol = 0.05;
    std::optional<double> surf_what;
    int surf_ny = 801, surf_nt = 3201;
    auto* cmd_rad = cmd_heis->add_subcommand(
        "rademacher", "R(s) residual table of intrinsic differentiability at a point");
    cmd_rad->add_option("--surface", surf_csv, "surface csv (header y,t,phi,g)");
    cmd_rad->add_option("--builtin", surf_builtin, "sqrt2t | linear | zero");
    cmd_rad->add_option("--point", surf_point, "base point y,t")->delimiter(',');
    cmd_rad->add_option("--scales", surf_scales, "scale list s1,s2,...")->delimiter(',');
    cmd_rad->add_option("--g-breaks", surf_breaks, "t-lines where g jumps (csv import)")
        ->delimiter(',');
    cmd_rad->add_option("--tol", surf_tol, "pass tolerance on R");
    cmd_rad->add_option("--ny", surf_ny, "y nodes (builtin surfaces)");
    cmd_rad->add_option("--nt", surf_nt, "t nodes (builtin surfaces)");
    double what_value = 0.0;
    auto* what_opt = cmd_rad->add_option("--w-hat", what_value,
                                         "override the differential coefficient ŵ = g(A0)");
    cmd_rad->add_option("--out", surf_out, "output csv path");

    std::string synth_name = "sqrt2t", synth_out = "surface.csv";
    int synth_ny = 201, synth_nt = 401;
    std::vector<double> synth_yspan{-1.0, 1.0}, synth_tspan{-1.0, 1.0};
    double synth_w = 1.0;
    auto* cmd_synth = cmd_heis->add_subcommand("synth", "write a builtin surface as csv");
    cmd_synth->add_option("--builtin", synth_name, "sqrt2t | linear | zero");
    cmd_synth->add_option("--ny", synth_ny, "y nodes");
    cmd_synth->add_option("--nt", synth_nt, "t nodes");
    cmd_synth->add_option("--y-span", synth_yspan, "y range lo,hi")->delimiter(',');
    cmd_synth->add_option("--t-span", synth_tspan, "t range lo,hi")->delimiter(',');
    cmd_synth->add_option("--w", synth_w, "slope for the linear surface");
    cmd_synth->add_option("--out", synth_out, "output csv path");

    int audit_cases = 10000;
    std::uint64_t audit_seed = 1;
    auto* cmd_audit = cmd_heis->add_subcommand(
        "audit", "group axioms, dilations, d_inf invariances over seeded samples");
    cmd_audit->add_option("--cases", audit_cases, "sample count");
    cmd_audit->add_option("--seed", audit_seed, "rng seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return 1;
    }

    try {
        if (cmd_run->parsed()) return run_filtered(run_args, {});
        if (cmd_solve->parsed()) return run_filtered(solve_args, {"solve", "weak_residual"});
        if (cmd_daf->parsed()) return run_filtered(daf_args, {"dafermos", "lipschitz"});
        if (cmd_holder->parsed()) return run_filtered(holder_args, {"holder"});
        if (cmd_osc->parsed()) return run_filtered(osc_args, {"oscillation"});
        if (cmd_cov->parsed()) return run_filtered(cov_args, {"covering"});

        if (cmd_flux->parsed()) {
            if (!flux_args.scenario.empty()) return run_filtered(flux_args, {"flux_audit"});
            if (flux_interval.empty())
                throw ConfigError("flux-audit needs --scenario or --interval with --poly/--builtin");
            const Interval interval = parse_interval_arg(flux_interval, "--interval");
            if (flux_builtin.empty() && flux_poly.empty())
                throw ConfigError("flux-audit needs --poly or --builtin");
            // one-shot audit: reuse the scenario runner via a synthetic config
            std::string text = "[flux]\n";
            if (!flux_builtin.empty()) {
                text += "builtin = " + flux_builtin + "\n";
            } else {
                text += "poly = ";
                for (std::size_t i = 0; i < flux_poly.size(); ++i)
                    text += (i ? ", " : "") + format_double(flux_poly[i]);
                text += "\n";
            }
            text += "order = " + std::to_string(flux_order) + "\n";
            text += "interval = " + format_double(interval.lo) + ", " +
                    format_double(interval.hi) + "\n";
            text += "[op audit]\nkind = flux_audit\nn = " + std::to_string(flux_n) + "\n";
            const Config cfg = Config::parse_string(text, "<flux-audit>");
            const std::string out = flux_args.out.empty() ? "." : flux_args.out;
            const ScenarioResult result = run_scenario(cfg, out, {"flux_audit"});
            for (const CheckRow& c : result.checks)
                std::cout << (c.pass() ? "[pass] " : "[FAIL] ") << c.name << " = "
                          << format_double(c.value) << "\n";
            return result.exit_code;
        }

        if (cmd_heis_run->parsed())
            return run_filtered(heis_args,
                                {"rademacher", "intrinsic_lip", "graph_balance",
                                 "heisenberg_audit"});

        if (cmd_synth->parsed()) {
            GridSpec gs;
            gs.nt = synth_ny;
            gs.nx = synth_nt;
            gs.t_span = parse_interval_arg(synth_yspan, "--y-span");
            gs.x_span = parse_interval_arg(synth_tspan, "--t-span");
            const GraphSurface surface = analytic_surface(synth_name, gs, synth_w);
            surface.export_csv(synth_out);
            std::cout << "wrote " << synth_out << "\n";
            return 0;
        }

        if (cmd_rad->parsed()) {
            std::optional<GraphSurface> surface;
            if (!surf_csv.empty()) {
                surface = GraphSurface::import_csv(surf_csv, surf_breaks);
            } else if (!surf_builtin.empty()) {
                GridSpec gs;
                gs.nt = surf_ny;
                gs.nx = surf_nt;
                gs.t_span = {-1.0, 1.0};
                gs.x_span = {-1.0, 1.0};
                surface = analytic_surface(surf_builtin, gs);
            } else {
                throw ConfigError("rademacher needs --surface or --builtin");
            }
            if (surf_point.size() != 2) throw ConfigError("--point expects y,t");
            if (what_opt->count()) surf_what = what_value;
            std::vector<double> scales = surf_scales;
            std::sort(scales.begin(), scales.end(), std::greater<>());
            const auto rows = rademacher_residual(*surface, {surf_point[0], surf_point[1]},
                                                  scales, surf_what);
            CsvWriter w(surf_out, {"s", "R", "pass"});
            const RademacherRow* final_row = nullptr;
            for (const auto& r : rows) {
                w.row({format_double(r.s), r.present ? format_double(r.r) : "",
                       r.present ? (r.r <= surf_tol ? "pass" : "fail") : "absent"});
                std::cout << "s = " << format_double(r.s) << "  R = "
                          << (r.present ? format_double(r.r) : "absent") << "\n";
                if (r.present) final_row = &r;
            }
            std::cout << "wrote " << surf_out << "\n";
            // the table passes when the residual has dropped below tol at the
            // smallest resolvable scale
            return (final_row && final_row->r <= surf_tol) ? 0 : 2;
        }

        if (cmd_audit->parsed()) {
            const HeisenbergAudit a = heisenberg_audit(audit_cases, audit_seed);
            const double tol = 1e-12;
            bool ok = true;
            auto report = [&](const char* name, double v) {
                const bool p = v <= tol;
                ok = ok && p;
                std::cout << (p ? "[pass] " : "[FAIL] ") << name << " = " << format_double(v)
                          << "\n";
            };
            report("associativity_err", a.associativity_err);
            report("identity_err", a.identity_err);
            report("inverse_err", a.inverse_err);
            report("dilation_err", a.dilation_err);
            report("dinf_left_invariance_err", a.dinf_left_err);
            report("dinf_homogeneity_err", a.dinf_homog_err);
            report("triangle_violation", a.triangle_violation);
            return ok ? 0 : 2;
        }
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
