#include "balance_lab/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <optional>

#include "balance_lab/covering.hpp"
#include "balance_lab/csv.hpp"
#include "balance_lab/estimates.hpp"
#include "balance_lab/heisenberg.hpp"
#include "balance_lab/solver.hpp"

namespace balance_lab {

namespace {

struct Tolerances {
    double abs = 1e-9;
    double rel = 1e-6;
    double lebesgue = 1e-3;
    double rademacher = 0.05;
};

bool is_op_section(const Section& s) { return s.name().rfind("op ", 0) == 0; }

std::string op_name(const Section& s) {
    std::string n = s.name().substr(3);
    while (!n.empty() && n.front() == ' ') n.erase(n.begin());
    if (n.empty()) throw ConfigError("[op] sections need a name: [op NAME]");
    return n;
}

/// Lazily built shared inputs for the op list.
class Context {
public:
    Context(const Config& cfg, std::uint64_t seed, Tolerances tol)
        : cfg_(cfg), seed_(seed), tol_(tol) {}

    std::uint64_t seed() const { return seed_; }
    const Tolerances& tol() const { return tol_; }

    const FluxModel& flux() {
        if (!flux_) flux_ = build_flux();
        return *flux_;
    }

    const SolutionField& field() {
        if (!field_) field_ = std::make_shared<SolutionField>(build_field());
        return *field_;
    }

    const GraphSurface& surface() {
        if (!surface_) surface_ = std::make_shared<GraphSurface>(build_surface());
        return *surface_;
    }

    GridSpec grid() const {
        const Section& g = cfg_.at("grid");
        GridSpec spec;
        spec.nt = static_cast<int>(g.get_long("nt"));
        spec.nx = static_cast<int>(g.get_long("nx"));
        spec.t_span = g.get_interval("t_span");
        spec.x_span = g.get_interval("x_span");
        if (spec.nt < 2 || spec.nx < 2) throw ConfigError("[grid] nt and nx must be >= 2");
        return spec;
    }

private:
    FluxModel build_flux() const {
        const Section* f = cfg_.find("flux");
        if (!f) throw ConfigError("this scenario needs a [flux] section");
        const Interval interval = f->get_interval("interval");
        FluxModel flux = [&] {
            if (f->has("builtin")) {
                if (f->has("poly")) throw ConfigError("[flux] builtin and poly are exclusive");
                FluxModel m = FluxModel::builtin(f->get_string("builtin"), interval);
                if (f->has("order"))
                    m = FluxModel::polynomial(
                        {m.coefficients().begin(), m.coefficients().end()}, interval,
                        static_cast<int>(f->get_long("order")));
                return m;
            }
            if (!f->has("poly")) throw ConfigError("[flux] needs builtin or poly");
            return FluxModel::polynomial(f->get_list("poly"), interval,
                                         static_cast<int>(f->get_long("order", 2)));
        }();
        if (f->has("c_ell")) flux = flux.with_c_ell(f->get_double("c_ell"));
        return flux;
    }

    SolutionField build_field() {
        const Section* sec = cfg_.find("field");
        if (sec && sec->has("analytic")) {
            return analytic_library(sec->get_string("analytic"), grid(),
                                    sec->get_double("constant_value", 0.0));
        }
        if (sec && sec->has("import")) {
            std::vector<double> breaks;
            if (sec->has("g_breaks")) breaks = sec->get_list("g_breaks");
            return SolutionField::import_csv(sec->get_string("import"), flux(),
                                             std::move(breaks));
        }
        // method-of-characteristics solve from [init] kind and [source] kind
        const Section* init_sec = cfg_.find("init");
        const Section* src_sec = cfg_.find("source");
        if (!init_sec || !src_sec)
            throw ConfigError("this scenario needs [field] analytic/import, or [init] and "
                              "[source] sections");
        const GridSpec gs = grid();
        const std::string init = init_sec->get_string("kind");
        const double iv = init_sec->get_double("value", 1.0);
        std::vector<double> u0(static_cast<std::size_t>(gs.nx));
        for (int j = 0; j < gs.nx; ++j) {
            const double x = gs.x_span.lo + gs.x_span.length() * j / (gs.nx - 1);
            if (init == "zero")
                u0[static_cast<std::size_t>(j)] = 0.0;
            else if (init == "constant")
                u0[static_cast<std::size_t>(j)] = iv;
            else if (init == "linear")
                u0[static_cast<std::size_t>(j)] = x;
            else if (init == "neg_linear")
                u0[static_cast<std::size_t>(j)] = -x;
            else if (init == "sqrt_sgn")
                u0[static_cast<std::size_t>(j)] = sgn(x) * std::sqrt(std::fabs(x));
            else
                throw ConfigError("[init] unknown kind '" + init + "'");
        }
        const std::string source = src_sec->get_string("kind");
        const double sv = src_sec->get_double("value", 1.0);
        SourceTerm g = [&] {
            if (source == "zero") return SourceTerm::zero();
            if (source == "constant")
                return SourceTerm::function([sv](double, double) { return sv; }, std::fabs(sv));
            if (source == "sgn_x")
                return SourceTerm::function([](double, double x) { return sgn(x); }, 1.0, {0.0});
            throw ConfigError("[source] unknown kind '" + source + "'");
        }();
        SolveOptions opt;
        opt.dt = sec ? sec->get_double("dt", 0.0) : 0.0;
        SolveOutcome outcome = solve_characteristics(flux(), u0, g, gs, opt);
        clipped_ = outcome.clipped;
        return std::move(outcome.field);
    }

    GraphSurface build_surface() {
        const Section* sec = cfg_.find("surface");
        if (!sec) throw ConfigError("this scenario needs a [surface] section");
        if (sec->has("csv")) {
            std::vector<double> breaks;
            if (sec->has("g_breaks")) breaks = sec->get_list("g_breaks");
            return GraphSurface::import_csv(sec->get_string("csv"), std::move(breaks));
        }
        GridSpec gs;
        gs.nt = static_cast<int>(sec->get_long("ny"));
        gs.nx = static_cast<int>(sec->get_long("nt"));
        gs.t_span = sec->get_interval("y_span");
        gs.x_span = sec->get_interval("t_span");
        if (gs.nt < 2 || gs.nx < 2) throw ConfigError("[surface] ny and nt must be >= 2");
        if (sec->has("from_field")) {
            // synthesize through the coordinate swap: evolution axis becomes y
            return surface_from_field(analytic_library(sec->get_string("from_field"), gs,
                                                       sec->get_double("constant_value", 0.0)));
        }
        return analytic_surface(sec->get_string("builtin"), gs, sec->get_double("w", 1.0));
    }

    const Config& cfg_;
    std::uint64_t seed_;
    Tolerances tol_;
    std::optional<FluxModel> flux_;
    std::shared_ptr<SolutionField> field_;
    std::shared_ptr<GraphSurface> surface_;

public:
    bool clipped_ = false;
};

std::string pass_str(bool ok) { return ok ? "pass" : "fail"; }

const std::vector<std::string>& op_allowed_keys(const std::string& kind) {
    static const std::map<std::string, std::vector<std::string>> table = {
        {"solve", {"kind", "export", "residual_bumps", "residual_bound"}},
        {"dafermos", {"kind", "t0", "x0", "h", "t1", "t2", "trace_dt", "equality_tol"}},
        {"lipschitz", {"kind", "t0", "x0", "span", "trace_dt", "bound"}},
        {"holder", {"kind", "t", "ell", "window", "bound", "exp_lo", "exp_hi"}},
        {"oscillation", {"kind", "samples", "threshold", "ell", "deltas", "ratio_factor"}},
        {"covering", {"kind", "t", "x", "q", "rho", "eps", "tol", "min_dev"}},
        {"weak_residual", {"kind", "bumps", "bound"}},
        {"flux_audit", {"kind", "n", "ell", "c_min", "c_max", "separation_tol"}},
        {"rademacher", {"kind", "point", "scales", "tol", "w_hat", "ratio_factor", "min_r"}},
        {"intrinsic_lip", {"kind", "pairs", "min_sep", "bound", "lower"}},
        {"graph_balance", {"kind", "bumps", "bound"}},
        {"heisenberg_audit", {"kind", "cases", "tol"}},
    };
    const auto it = table.find(kind);
    if (it == table.end()) throw ConfigError("unknown op kind '" + kind + "'");
    return it->second;
}

void validate_sections(const Config& cfg) {
    static const std::vector<std::string> known = {"flux", "grid",   "field",     "init",
                                                   "source", "surface", "run", "tolerances"};
    for (const Section& s : cfg.sections()) {
        if (is_op_section(s)) {
            if (!s.has("kind"))
                throw ConfigError("[" + s.name() + "] is missing key 'kind'");
            s.restrict_keys(op_allowed_keys(s.get_string("kind")));
            continue;
        }
        if (std::find(known.begin(), known.end(), s.name()) == known.end())
            throw ConfigError("unknown section [" + s.name() + "]");
    }
    // key whitelists; op sections are validated by their runner
    if (const Section* f = cfg.find("flux"))
        f->restrict_keys({"builtin", "poly", "order", "interval", "c_ell"});
    if (const Section* g = cfg.find("grid")) g->restrict_keys({"nt", "nx", "t_span", "x_span"});
    if (const Section* f = cfg.find("field"))
        f->restrict_keys({"analytic", "constant_value", "dt", "import", "g_breaks"});
    if (const Section* i = cfg.find("init")) i->restrict_keys({"kind", "value"});
    if (const Section* s = cfg.find("source")) s->restrict_keys({"kind", "value"});
    if (const Section* s = cfg.find("surface"))
        s->restrict_keys({"builtin", "from_field", "constant_value", "w", "csv", "g_breaks",
                          "ny", "nt", "y_span", "t_span"});
    if (const Section* r = cfg.find("run")) r->restrict_keys({"seed", "out"});
    if (const Section* t = cfg.find("tolerances"))
        t->restrict_keys({"abs", "rel", "lebesgue", "rademacher"});
}

// ---- op runners -----------------------------------------------------------

using Rows = std::vector<CheckRow>;

Rows run_solve(const Section& op, Context& ctx, const std::filesystem::path& dir,
               std::vector<std::filesystem::path>& outputs) {
    const SolutionField& field = ctx.field();
    const std::string name = op_name(op);

    const std::filesystem::path csv = dir / op.get_string("export", name + "_field.csv");
    field.export_csv(csv);
    outputs.push_back(csv);

    const std::filesystem::path meta = dir / (name + ".csv");
    {
        CsvWriter w(meta, {"op", "clipped", "nt", "nx", "t_lo", "t_hi", "x_lo", "x_hi"});
        w.row({name, ctx.clipped_ ? "1" : "0", std::to_string(field.nt()),
               std::to_string(field.nx()), format_double(field.rect().t.lo),
               format_double(field.rect().t.hi), format_double(field.rect().x.lo),
               format_double(field.rect().x.hi)});
    }
    outputs.push_back(meta);

    Rows rows;
    if (op.has("residual_bumps")) {
        const int bumps = static_cast<int>(op.get_long("residual_bumps"));
        const double residual = weak_residual(field, bumps, ctx.seed());
        rows.push_back({name + "_residual", residual, op.get_double("residual_bound")});
    }
    return rows;
}

Rows run_dafermos(const Section& op, Context& ctx, const std::filesystem::path& dir,
                  std::vector<std::filesystem::path>& outputs) {
    const SolutionField& field = ctx.field();
    const std::string name = op_name(op);
    const double t0 = op.get_double("t0"), x0 = op.get_double("x0");
    const double h = op.get_double("h");
    const double t1 = op.get_double("t1"), t2 = op.get_double("t2");

    const Characteristic gamma =
        trace_characteristic(field, t0, x0, std::min(t0, t1), std::max(t0, t2),
                             op.get_double("trace_dt", 0.0));
    const BalanceReport rep = dafermos_balance(field, gamma, h, t1, t2);

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"op", "h", "t1", "t2", "lhs_plus", "rhs_plus", "lhs_minus",
                          "rhs_minus", "quad_error_bound", "concave"});
        w.row({name, format_double(rep.width), format_double(rep.t1), format_double(rep.t2),
               format_double(rep.lhs_plus), format_double(rep.rhs_plus),
               format_double(rep.lhs_minus), format_double(rep.rhs_minus),
               format_double(rep.quad_error_bound), rep.concave ? "1" : "0"});
    }
    outputs.push_back(csv);

    const double sign = rep.concave ? -1.0 : 1.0;
    Rows rows;
    rows.push_back(
        {name + "_plus_ok", sign * (rep.lhs_plus - rep.rhs_plus), rep.quad_error_bound});
    rows.push_back(
        {name + "_minus_ok", sign * (rep.rhs_minus - rep.lhs_minus), rep.quad_error_bound});
    if (op.has("equality_tol")) {
        const double worst = std::max(std::fabs(rep.lhs_plus - rep.rhs_plus),
                                      std::fabs(rep.lhs_minus - rep.rhs_minus));
        rows.push_back({name + "_equality", worst, op.get_double("equality_tol")});
    }
    return rows;
}

Rows run_lipschitz(const Section& op, Context& ctx, const std::filesystem::path& dir,
                   std::vector<std::filesystem::path>& outputs) {
    const SolutionField& field = ctx.field();
    const std::string name = op_name(op);
    const double t0 = op.get_double("t0"), x0 = op.get_double("x0");
    const Interval span = op.get_interval("span");
    const double dt = op.get_double("trace_dt", 0.0);

    const Characteristic gamma = trace_characteristic(field, t0, x0, span.lo, span.hi, dt);
    const double quotient = lipschitz_along(field, gamma);
    const double bound =
        op.get_double("bound", field.g_inf() * (1.0 + 1e-3) + 10.0 * gamma.step);

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"op", "t0", "x0", "span_lo", "span_hi", "quotient", "bound"});
        w.row({name, format_double(t0), format_double(x0), format_double(span.lo),
               format_double(span.hi), format_double(quotient), format_double(bound)});
    }
    outputs.push_back(csv);
    return {{name + "_lipschitz", quotient, bound}};
}

Rows run_holder(const Section& op, Context& ctx, const std::filesystem::path& dir,
                std::vector<std::filesystem::path>& outputs) {
    const SolutionField& field = ctx.field();
    const std::string name = op_name(op);
    const Interval window = op.get_interval("window");
    const HolderReport rep = holder_seminorm(field, op.get_double("t"),
                                             static_cast<int>(op.get_long("ell")), window.lo,
                                             window.hi);

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"op", "t", "ell", "window_lo", "window_hi", "empirical", "theoretical",
                          "exponent_fit", "fit_r2", "pairs", "stride", "applicable",
                          "degenerate_source", "fit_reliable"});
        w.row({name, format_double(op.get_double("t")), std::to_string(op.get_long("ell")),
               format_double(window.lo), format_double(window.hi),
               format_double(rep.empirical), format_double(rep.theoretical),
               format_double(rep.exponent_fit), format_double(rep.fit_r2),
               std::to_string(rep.pairs_scanned), std::to_string(rep.stride),
               rep.theoretical_applicable ? "1" : "0", rep.degenerate_source ? "1" : "0",
               rep.fit_reliable ? "1" : "0"});
    }
    outputs.push_back(csv);

    Rows rows;
    rows.push_back({name + "_empirical", rep.empirical, op.get_double("bound")});
    if (op.has("exp_lo"))
        rows.push_back({name + "_exponent_lo", rep.exponent_fit, op.get_double("exp_lo"), true});
    if (op.has("exp_hi"))
        rows.push_back({name + "_exponent_hi", rep.exponent_fit, op.get_double("exp_hi")});
    return rows;
}

Rows run_oscillation(const Section& op, Context& ctx, const std::filesystem::path& dir,
                     std::vector<std::filesystem::path>& outputs) {
    const SolutionField& field = ctx.field();
    const std::string name = op_name(op);
    std::vector<double> deltas = op.get_list("deltas");
    std::sort(deltas.begin(), deltas.end(), std::greater<>());
    const auto rows_out =
        oscillation_survey(field, static_cast<int>(op.get_long("samples")), deltas,
                           op.get_double("threshold"), static_cast<int>(op.get_long("ell")),
                           ctx.seed());

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"delta", "fraction"});
        for (const SurveyRow& r : rows_out)
            w.row({format_double(r.delta), format_double(r.fraction)});
    }
    outputs.push_back(csv);

    double max_increase = 0.0;  // fractions should not grow as delta shrinks
    for (std::size_t i = 1; i < rows_out.size(); ++i)
        max_increase = std::max(max_increase, rows_out[i].fraction - rows_out[i - 1].fraction);
    Rows rows;
    rows.push_back({name + "_monotone", max_increase, ctx.tol().abs});
    if (op.has("ratio_factor")) {
        const double factor = op.get_double("ratio_factor");
        rows.push_back({name + "_ratio", rows_out.back().fraction,
                        rows_out.front().fraction / factor});
    }
    return rows;
}

Rows run_covering(const Section& op, Context& ctx, const std::filesystem::path& dir,
                  std::vector<std::filesystem::path>& outputs) {
    const SolutionField& field = ctx.field();
    const std::string name = op_name(op);
    const double t = op.get_double("t"), x = op.get_double("x");
    const std::string qkind = op.get_string("q", "field_g");
    Scalar2D q;
    if (qkind == "sgn_x") {
        q.fn = [](double, double xv) { return sgn(xv); };
        q.x_breaks = {0.0};
    } else if (qkind == "coord_x") {
        q.fn = [](double, double xv) { return xv; };
        q.x_breaks = {x};  // kink line of |q - q(t,x)|
    } else if (qkind == "field_g") {
        q = Scalar2D::of_field_g(field);
    } else if (qkind == "field_u") {
        q = Scalar2D::of_field_u(field);
    } else {
        throw ConfigError("[" + op.name() + "] unknown q kind '" + qkind + "'");
    }

    // default scale lists: geometric rho sequence, eps = 0.2 * 2^-k
    const std::vector<double> rho =
        op.has("rho") ? op.get_list("rho") : std::vector<double>{1.0, 0.5, 0.25, 0.125};
    const std::vector<double> eps =
        op.has("eps") ? op.get_list("eps")
                      : std::vector<double>{0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625};
    const double tol = op.get_double("tol", ctx.tol().lebesgue);
    const LebesgueTable table = lebesgue_point_test(field, q, t, x, rho, eps);

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"rho", "eps", "mean_abs_dev", "pass"});
        for (std::size_t ir = 0; ir < table.rho_list.size(); ++ir)
            for (std::size_t ie = 0; ie < table.eps_list.size(); ++ie) {
                const LebesgueCell& c = table.cell(ir, ie);
                w.row({format_double(c.rho), format_double(c.eps),
                       c.present ? format_double(c.dev) : "",
                       c.present ? pass_str(c.dev <= tol) : "absent"});
            }
    }
    outputs.push_back(csv);

    Rows rows;
    double area_err = 0.0;
    bool any_region = false;
    double min_dev = std::numeric_limits<double>::infinity();
    for (std::size_t ir = 0; ir < table.rho_list.size(); ++ir) {
        // smallest present eps decides the convergence column
        bool found = false;
        for (std::size_t ie = table.eps_list.size(); ie-- > 0 && !found;) {
            const LebesgueCell& c = table.cell(ir, ie);
            if (!c.present) continue;
            found = true;
            rows.push_back({name + "_rho_" + format_double(c.rho), c.dev, tol});
        }
        if (!found)
            rows.push_back({name + "_rho_" + format_double(table.rho_list[ir]), 1e300, tol});
        for (std::size_t ie = 0; ie < table.eps_list.size(); ++ie) {
            const LebesgueCell& c = table.cell(ir, ie);
            if (!c.present) continue;
            min_dev = std::min(min_dev, c.dev);
            try {
                const CoveringRegion region = make_region(field, t, x, c.eps, c.rho);
                area_err = std::max(area_err,
                                    std::fabs(region_area_quadrature(region) - region.area()));
                any_region = true;
            } catch (const DomainError&) {
            }
        }
    }
    if (any_region) rows.push_back({name + "_area", area_err, 1e-10});
    if (op.has("min_dev") && std::isfinite(min_dev))
        rows.push_back({name + "_control_dev", min_dev, op.get_double("min_dev"), true});
    return rows;
}

Rows run_weak_residual(const Section& op, Context& ctx, const std::filesystem::path& dir,
                       std::vector<std::filesystem::path>& outputs) {
    const SolutionField& field = ctx.field();
    const std::string name = op_name(op);
    const int bumps = static_cast<int>(op.get_long("bumps"));
    const double residual = weak_residual(field, bumps, ctx.seed());
    const double bound = op.get_double("bound");

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"op", "bumps", "seed", "residual", "bound"});
        w.row({name, std::to_string(bumps), std::to_string(ctx.seed()),
               format_double(residual), format_double(bound)});
    }
    outputs.push_back(csv);
    return {{name + "_residual", residual, bound}};
}

Rows run_flux_audit(const Section& op, Context& ctx, const std::filesystem::path& dir,
                    std::vector<std::filesystem::path>& outputs) {
    const FluxModel& flux = ctx.flux();
    const std::string name = op_name(op);
    const int n = static_cast<int>(op.get_long("n", 512));
    const int ell = static_cast<int>(op.get_long("ell", flux.order()));
    const Interval I = flux.interval();

    const std::filesystem::path csv = dir / (name + ".csv");
    Rows rows;
    {
        CsvWriter w(csv, {"quantity", "a", "b", "ell", "value"});
        const double c_full = nonlinearity_constant(flux, ell, I, n);
        w.row({"c_ell", format_double(I.lo), format_double(I.hi), std::to_string(ell),
               format_double(c_full)});

        const std::vector<double> zeros = inflection_zeros(flux, I, std::max(n, 128));
        for (double z : zeros)
            w.row({"inflection_zero", format_double(z), "", "", format_double(z)});

        // per-segment constants, convexity ratios, and separation margins
        // between inflections
        std::vector<double> cuts = {I.lo};
        for (double z : zeros)
            if (z > I.lo + 1e-9 && z < I.hi - 1e-9) cuts.push_back(z);
        cuts.push_back(I.hi);
        double worst_margin = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
            const Interval seg{cuts[i], cuts[i + 1]};
            if (!(seg.length() > 1e-9)) continue;
            const double c_seg = nonlinearity_constant(flux, ell, seg, n);
            w.row({"c_ell_segment", format_double(seg.lo), format_double(seg.hi),
                   std::to_string(ell), format_double(c_seg)});
            const MinOrderResult mo = min_order_at_point(flux, seg.mid(), flux.degree() > 1
                                                                              ? flux.degree()
                                                                              : ell);
            if (mo.found)
                w.row({"min_order_at_midpoint", format_double(seg.mid()), "",
                       std::to_string(mo.k), format_double(mo.c0)});
            try {
                // interior sub-interval, away from the inflection endpoints
                const double pad = 0.25 * seg.length();
                const IntervalStats stats =
                    convexity_ratio_q(flux, {seg.lo + pad, seg.hi - pad}, seg);
                w.row({"q", format_double(seg.lo + pad), format_double(seg.hi - pad), "",
                       format_double(stats.q)});
            } catch (const DomainError&) {
                // concave branch or residual sign change: no ratio to report
            }
            if (c_seg > 0.0) {
                const SeparationReport sep = check_fprime_separation(
                    flux, ell, c_seg * (1.0 - ctx.tol().rel), seg, std::min(n, 1024));
                w.row({"separation_margin", format_double(seg.lo), format_double(seg.hi),
                       std::to_string(ell), format_double(sep.worst_margin)});
                worst_margin = std::min(worst_margin, sep.worst_margin);
            }
        }
        if (std::isfinite(worst_margin))
            rows.push_back({name + "_separation", -worst_margin,
                            op.get_double("separation_tol", ctx.tol().abs)});
        if (op.has("c_min")) rows.push_back({name + "_c_min", c_full, op.get_double("c_min"), true});
        if (op.has("c_max")) rows.push_back({name + "_c_max", c_full, op.get_double("c_max")});
    }
    outputs.push_back(csv);
    return rows;
}

Rows run_rademacher(const Section& op, Context& ctx, const std::filesystem::path& dir,
                    std::vector<std::filesystem::path>& outputs) {
    const GraphSurface& surface = ctx.surface();
    const std::string name = op_name(op);
    const auto pt = op.get_list("point");
    if (pt.size() != 2) throw ConfigError("[" + op.name() + "] point must be 'y, t'");
    std::vector<double> scales = op.get_list("scales");
    std::sort(scales.begin(), scales.end(), std::greater<>());
    const double tol = op.get_double("tol", ctx.tol().rademacher);
    std::optional<double> w_hat;
    if (op.has("w_hat")) w_hat = op.get_double("w_hat");

    const auto rows_out = rademacher_residual(surface, {pt[0], pt[1]}, scales, w_hat);

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"s", "R", "pass"});
        for (const RademacherRow& r : rows_out)
            w.row({format_double(r.s), r.present ? format_double(r.r) : "",
                   r.present ? pass_str(r.r <= tol) : "absent"});
    }
    outputs.push_back(csv);

    Rows rows;
    const RademacherRow* last_present = nullptr;
    const RademacherRow* first_present = nullptr;
    double max_r = 0.0, min_r = std::numeric_limits<double>::infinity();
    for (const RademacherRow& r : rows_out) {
        if (!r.present) continue;
        if (!first_present) first_present = &r;
        last_present = &r;
        max_r = std::max(max_r, r.r);
        min_r = std::min(min_r, r.r);
    }
    if (!last_present) throw DomainError("[" + op.name() + "] no grid points at any scale");
    rows.push_back({name + "_final", last_present->r, tol});
    if (op.has("ratio_factor"))
        rows.push_back({name + "_ratio", last_present->r,
                        first_present->r / op.get_double("ratio_factor")});
    if (op.has("min_r")) rows.push_back({name + "_min", min_r, op.get_double("min_r"), true});
    return rows;
}

Rows run_intrinsic_lip(const Section& op, Context& ctx, const std::filesystem::path& dir,
                       std::vector<std::filesystem::path>& outputs) {
    const GraphSurface& surface = ctx.surface();
    const std::string name = op_name(op);
    const int pairs = static_cast<int>(op.get_long("pairs", 100000));
    const double min_sep = op.get_double("min_sep", 1e-4);
    const double lip = intrinsic_lip_constant(surface, pairs, min_sep, ctx.seed());
    const double k = quasi_triangle_constant(surface, pairs, ctx.seed() + 1);

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"op", "pairs", "min_sep", "lip_constant", "quasi_triangle_K"});
        w.row({name, std::to_string(pairs), format_double(min_sep), format_double(lip),
               format_double(k)});
    }
    outputs.push_back(csv);

    Rows rows;
    rows.push_back({name + "_lip", lip, op.get_double("bound")});
    if (op.has("lower")) rows.push_back({name + "_lip_lower", lip, op.get_double("lower"), true});
    return rows;
}

Rows run_graph_balance(const Section& op, Context& ctx, const std::filesystem::path& dir,
                       std::vector<std::filesystem::path>& outputs) {
    const GraphSurface& surface = ctx.surface();
    const std::string name = op_name(op);
    const int bumps = static_cast<int>(op.get_long("bumps"));
    const double residual = graph_balance_residual(surface, bumps, ctx.seed());
    const double bound = op.get_double("bound");

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"op", "bumps", "seed", "residual", "bound"});
        w.row({name, std::to_string(bumps), std::to_string(ctx.seed()),
               format_double(residual), format_double(bound)});
    }
    outputs.push_back(csv);
    return {{name + "_residual", residual, bound}};
}

Rows run_heisenberg_audit(const Section& op, Context& ctx, const std::filesystem::path& dir,
                          std::vector<std::filesystem::path>& outputs) {
    const std::string name = op_name(op);
    const int cases = static_cast<int>(op.get_long("cases", 10000));
    const double tol = op.get_double("tol", 1e-12);
    const HeisenbergAudit audit = heisenberg_audit(cases, ctx.seed());

    const std::filesystem::path csv = dir / (name + ".csv");
    {
        CsvWriter w(csv, {"quantity", "value"});
        w.row({"associativity_err", format_double(audit.associativity_err)});
        w.row({"identity_err", format_double(audit.identity_err)});
        w.row({"inverse_err", format_double(audit.inverse_err)});
        w.row({"dilation_err", format_double(audit.dilation_err)});
        w.row({"dinf_left_invariance_err", format_double(audit.dinf_left_err)});
        w.row({"dinf_homogeneity_err", format_double(audit.dinf_homog_err)});
        w.row({"triangle_violation", format_double(audit.triangle_violation)});
    }
    outputs.push_back(csv);

    return {{name + "_associativity", audit.associativity_err, tol},
            {name + "_identity", audit.identity_err, tol},
            {name + "_inverse", audit.inverse_err, tol},
            {name + "_dilation", audit.dilation_err, tol},
            {name + "_dinf_left", audit.dinf_left_err, tol},
            {name + "_dinf_homog", audit.dinf_homog_err, tol},
            {name + "_triangle", audit.triangle_violation, tol}};
}

}  // namespace

ScenarioResult run_scenario(const Config& cfg, const std::filesystem::path& out_dir,
                            const std::vector<std::string>& kind_filter) {
    validate_sections(cfg);

    Tolerances tol;
    if (const Section* t = cfg.find("tolerances")) {
        tol.abs = t->get_double("abs", tol.abs);
        tol.rel = t->get_double("rel", tol.rel);
        tol.lebesgue = t->get_double("lebesgue", tol.lebesgue);
        tol.rademacher = t->get_double("rademacher", tol.rademacher);
    }
    std::uint64_t seed = 1;
    if (const Section* r = cfg.find("run")) seed = static_cast<std::uint64_t>(r->get_long("seed", 1));

    Context ctx(cfg, seed, tol);
    ScenarioResult result;

    std::filesystem::create_directories(out_dir);
    try {
        for (const Section& s : cfg.sections()) {
            if (!is_op_section(s)) continue;
            const std::string kind = s.get_string("kind");
            if (!kind_filter.empty() &&
                std::find(kind_filter.begin(), kind_filter.end(), kind) == kind_filter.end())
                continue;
            Rows rows;
            if (kind == "solve")
                rows = run_solve(s, ctx, out_dir, result.outputs);
            else if (kind == "dafermos")
                rows = run_dafermos(s, ctx, out_dir, result.outputs);
            else if (kind == "lipschitz")
                rows = run_lipschitz(s, ctx, out_dir, result.outputs);
            else if (kind == "holder")
                rows = run_holder(s, ctx, out_dir, result.outputs);
            else if (kind == "oscillation")
                rows = run_oscillation(s, ctx, out_dir, result.outputs);
            else if (kind == "covering")
                rows = run_covering(s, ctx, out_dir, result.outputs);
            else if (kind == "weak_residual")
                rows = run_weak_residual(s, ctx, out_dir, result.outputs);
            else if (kind == "flux_audit")
                rows = run_flux_audit(s, ctx, out_dir, result.outputs);
            else if (kind == "rademacher")
                rows = run_rademacher(s, ctx, out_dir, result.outputs);
            else if (kind == "intrinsic_lip")
                rows = run_intrinsic_lip(s, ctx, out_dir, result.outputs);
            else if (kind == "graph_balance")
                rows = run_graph_balance(s, ctx, out_dir, result.outputs);
            else if (kind == "heisenberg_audit")
                rows = run_heisenberg_audit(s, ctx, out_dir, result.outputs);
            else
                throw ConfigError("[" + s.name() + "] unknown kind '" + kind + "'");
            result.checks.insert(result.checks.end(), rows.begin(), rows.end());
        }
    } catch (...) {
        // keep whatever was produced, marked as partial
        for (const auto& p : result.outputs) {
            std::error_code ec;
            std::filesystem::rename(p, p.string() + ".partial", ec);
        }
        throw;
    }

    const std::filesystem::path summary = out_dir / "summary.csv";
    {
        CsvWriter w(summary, {"check", "value", "bound", "pass"});
        for (const CheckRow& c : result.checks)
            w.row({c.name, format_double(c.value), format_double(c.bound), pass_str(c.pass())});
    }
    result.outputs.push_back(summary);

    result.exit_code = 0;
    for (const CheckRow& c : result.checks)
        if (!c.pass()) result.exit_code = 2;
    return result;
}

}  // namespace balance_lab
