#include "balance_lab/solver.hpp"

#include <algorithm>
#include <cmath>

#include "balance_lab/parallel.hpp"
#include "balance_lab/quadrature.hpp"
#include "balance_lab/rng.hpp"

namespace balance_lab {

namespace {

std::vector<double> uniform_grid(Interval span, int n) {
    if (n < 2) throw DomainError("grid needs at least two nodes");
    if (!span.valid()) throw DomainError("grid span must satisfy lo < hi");
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = span.lo + span.length() * i / (n - 1);
    g.back() = span.hi;
    return g;
}

}  // namespace

double default_trace_step(const SolutionField& field) {
    const double max_f1 = field.flux().max_f1({field.u_range_min(), field.u_range_max()});
    return field.dx() / (1.0 + max_f1);
}

namespace {

// One RK4 step of gamma' = f'(u(t, gamma)); h may be negative.
double rk4_step(const SolutionField& F, double t, double y, double h) {
    const auto& flux = F.flux();
    const double k1 = flux.f1(F.u(t, y));
    const double k2 = flux.f1(F.u(t + 0.5 * h, y + 0.5 * h * k1));
    const double k3 = flux.f1(F.u(t + 0.5 * h, y + 0.5 * h * k2));
    const double k4 = flux.f1(F.u(t + h, y + h * k3));
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

struct HalfTrace {
    std::vector<double> times, positions;
    bool exited = false;
};

HalfTrace trace_direction(const SolutionField& F, double t0, double x0, double t_end, double dt) {
    HalfTrace out;
    const double dir = t_end >= t0 ? 1.0 : -1.0;
    const double total = std::fabs(t_end - t0);
    if (total <= 1e-15 * std::max(1.0, std::fabs(t0))) return out;
    const int steps = std::max(1, static_cast<int>(std::ceil(total / dt - 1e-12)));
    const Interval xr = F.rect().x;
    const double slack = 1e-12 * std::max(1.0, xr.length());
    double t = t0, y = x0;
    for (int i = 0; i < steps; ++i) {
        const double h = dir * std::min(dt, std::fabs(t_end - t));
        const double y_next = rk4_step(F, t, y, h);
        if (y_next < xr.lo - slack || y_next > xr.hi + slack) {
            out.exited = true;
            break;
        }
        t += h;
        y = y_next;
        out.times.push_back(t);
        out.positions.push_back(y);
    }
    return out;
}

}  // namespace

Characteristic trace_characteristic(const SolutionField& field, double t0, double x0,
                                    double span_lo, double span_hi, double dt) {
    const Rect& rect = field.rect();
    if (!rect.contains(t0, x0, 1e-12))
        throw DomainError("trace_characteristic: start point outside the rectangle");
    if (!(span_lo <= t0 && t0 <= span_hi))
        throw DomainError("trace_characteristic: t0 must lie inside the span");
    if (!rect.t.contains(span_lo, 1e-12) || !rect.t.contains(span_hi, 1e-12))
        throw DomainError("trace_characteristic: span outside the time range");
    if (dt <= 0.0) dt = default_trace_step(field);

    HalfTrace back = trace_direction(field, t0, x0, span_lo, dt);
    HalfTrace fwd = trace_direction(field, t0, x0, span_hi, dt);

    Characteristic curve;
    curve.step = dt;
    curve.exited = back.exited || fwd.exited;
    curve.times.reserve(back.times.size() + fwd.times.size() + 1);
    curve.positions.reserve(curve.times.capacity());
    for (std::size_t i = back.times.size(); i-- > 0;) {
        curve.times.push_back(back.times[i]);
        curve.positions.push_back(back.positions[i]);
    }
    curve.times.push_back(t0);
    curve.positions.push_back(x0);
    for (std::size_t i = 0; i < fwd.times.size(); ++i) {
        curve.times.push_back(fwd.times[i]);
        curve.positions.push_back(fwd.positions[i]);
    }
    curve.values.resize(curve.times.size());
    for (std::size_t i = 0; i < curve.times.size(); ++i)
        curve.values[i] = field.u(curve.times[i], curve.positions[i]);
    return curve;
}

SolveOutcome solve_characteristics(const FluxModel& flux, const std::vector<double>& u0,
                                   const SourceTerm& g, const GridSpec& grid,
                                   const SolveOptions& opt) {
    if (!g.has_fn())
        throw DomainError("solve_characteristics: the source must be a callable");
    const std::vector<double> t_grid = uniform_grid(grid.t_span, grid.nt);
    const std::vector<double> x_grid = uniform_grid(grid.x_span, grid.nx);
    if (u0.size() != x_grid.size())
        throw DomainError("solve_characteristics: u0 must be sampled on the x grid");

    const double T = grid.t_span.length();
    const double G = g.declared_bound();
    double u_lo = u0[0], u_hi = u0[0];
    for (double v : u0) {
        u_lo = std::min(u_lo, v);
        u_hi = std::max(u_hi, v);
    }
    // values stay within the initial range widened by G*T
    Interval u_range{u_lo - G * T - 1e-9, u_hi + G * T + 1e-9};
    const double dx = x_grid[1] - x_grid[0];
    double dt_int = opt.dt;
    if (dt_int <= 0.0) dt_int = dx / (1.0 + flux.max_f1(u_range));

    const int n = grid.nx;
    std::vector<double> pos = x_grid, val = u0;
    std::vector<double> u_out(static_cast<std::size_t>(grid.nt) * n);
    for (int j = 0; j < n; ++j) u_out[static_cast<std::size_t>(j)] = u0[static_cast<std::size_t>(j)];

    const double mono_slack = 1e-12 * std::max(1.0, grid.x_span.length());
    int cover_lo = 0, cover_hi = n - 1;

    auto resample = [&](int it) {
        // feet are strictly increasing; interpolate values onto the x grid
        for (int j = 1; j < n; ++j)
            if (pos[static_cast<std::size_t>(j)] - pos[static_cast<std::size_t>(j - 1)] <=
                mono_slack)
                throw CrossingError(t_grid[static_cast<std::size_t>(it)]);
        int lo = 0;
        while (lo < n && x_grid[static_cast<std::size_t>(lo)] < pos.front() - mono_slack) ++lo;
        int hi = n - 1;
        while (hi >= 0 && x_grid[static_cast<std::size_t>(hi)] > pos.back() + mono_slack) --hi;
        cover_lo = std::max(cover_lo, lo);
        cover_hi = std::min(cover_hi, hi);
        std::size_t seg = 0;
        for (int j = lo; j <= hi; ++j) {
            const double x = x_grid[static_cast<std::size_t>(j)];
            while (seg + 2 < pos.size() && pos[seg + 1] < x) ++seg;
            const double w = pos[seg + 1] - pos[seg];
            const double r = std::clamp((x - pos[seg]) / w, 0.0, 1.0);
            u_out[static_cast<std::size_t>(it) * n + j] = (1.0 - r) * val[seg] + r * val[seg + 1];
        }
    };

    for (int it = 1; it < grid.nt; ++it) {
        const double t_from = t_grid[static_cast<std::size_t>(it - 1)];
        const double t_to = t_grid[static_cast<std::size_t>(it)];
        const int sub = std::max(1, static_cast<int>(std::ceil((t_to - t_from) / dt_int - 1e-12)));
        const double h = (t_to - t_from) / sub;
        for (int s = 0; s < sub; ++s) {
            const double t = t_from + s * h;
            for (int j = 0; j < n; ++j) {
                double& y = pos[static_cast<std::size_t>(j)];
                double& U = val[static_cast<std::size_t>(j)];
                const double ky1 = flux.f1(U), ku1 = g.eval(t, y);
                const double ky2 = flux.f1(U + 0.5 * h * ku1),
                             ku2 = g.eval(t + 0.5 * h, y + 0.5 * h * ky1);
                const double ky3 = flux.f1(U + 0.5 * h * ku2),
                             ku3 = g.eval(t + 0.5 * h, y + 0.5 * h * ky2);
                const double ky4 = flux.f1(U + h * ku3), ku4 = g.eval(t + h, y + h * ky3);
                y += h / 6.0 * (ky1 + 2.0 * ky2 + 2.0 * ky3 + ky4);
                U += h / 6.0 * (ku1 + 2.0 * ku2 + 2.0 * ku3 + ku4);
            }
        }
        resample(it);
    }

    if (cover_hi - cover_lo + 1 < 2)
        throw DomainError("solve_characteristics: characteristics left the whole rectangle");

    const bool clipped = cover_lo > 0 || cover_hi < n - 1;
    std::vector<double> x_kept(x_grid.begin() + cover_lo, x_grid.begin() + cover_hi + 1);
    const int nk = cover_hi - cover_lo + 1;
    std::vector<double> u_kept(static_cast<std::size_t>(grid.nt) * nk);
    for (int it = 0; it < grid.nt; ++it)
        for (int j = 0; j < nk; ++j)
            u_kept[static_cast<std::size_t>(it) * nk + j] =
                u_out[static_cast<std::size_t>(it) * n + cover_lo + j];

    SolutionField field(t_grid, std::move(x_kept), std::move(u_kept), g, flux);
    return {std::move(field), clipped};
}

namespace {

inline double bump(double s) {
    const double w = 1.0 - s * s;
    return w > 0.0 ? w * w * w : 0.0;
}

inline double bump_d(double s) {
    const double w = 1.0 - s * s;
    return w > 0.0 ? -6.0 * s * w * w : 0.0;
}

// integral of (1-s^2)^3 over [-1,1]
constexpr double kBumpMass = 32.0 / 35.0;

std::vector<double> cell_cuts(const std::vector<double>& grid, double lo, double hi,
                              std::span<const double> breaks) {
    std::vector<double> cuts;
    cuts.push_back(lo);
    for (double v : grid)
        if (v > lo && v < hi) cuts.push_back(v);
    for (double b : breaks)
        if (b > lo && b < hi) cuts.push_back(b);
    cuts.push_back(hi);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    return cuts;
}

}  // namespace

double weak_residual(const SolutionField& field, int bump_count, std::uint64_t seed) {
    if (bump_count < 1) throw DomainError("weak_residual: need at least one bump");
    const Rect& rect = field.rect();
    const double t_len = rect.t.length(), x_len = rect.x.length();
    if (0.30 * t_len + field.dt() >= 0.5 * t_len || 0.30 * x_len + field.dx() >= 0.5 * x_len)
        throw DomainError("weak_residual: rectangle too small to contain the bump supports");

    struct Bump {
        double tc, xc, rt, rx;
    };
    Rng rng(seed);
    std::vector<Bump> bumps(static_cast<std::size_t>(bump_count));
    for (auto& b : bumps) {
        // supports strictly inside the rectangle, at least one cell from the edge
        b.rt = rng.uniform(0.10, 0.30) * t_len;
        b.rx = rng.uniform(0.10, 0.30) * x_len;
        b.tc = rng.uniform(rect.t.lo + b.rt + field.dt(), rect.t.hi - b.rt - field.dt());
        b.xc = rng.uniform(rect.x.lo + b.rx + field.dx(), rect.x.hi - b.rx - field.dx());
    }

    const auto tn = gauss_nodes(3);
    const auto tw = gauss_weights(3);
    const auto& flux = field.flux();

    return parallel_max(bump_count, [&](std::int64_t bi) {
        const Bump& b = bumps[static_cast<std::size_t>(bi)];
        const auto t_cuts =
            cell_cuts(field.t_grid(), b.tc - b.rt, b.tc + b.rt, {});
        const auto x_cuts =
            cell_cuts(field.x_grid(), b.xc - b.rx, b.xc + b.rx, field.source_breaks());
        double acc = 0.0;
        for (std::size_t ic = 0; ic + 1 < t_cuts.size(); ++ic) {
            const double ta = t_cuts[ic], tb = t_cuts[ic + 1];
            const double tm = 0.5 * (ta + tb), th = 0.5 * (tb - ta);
            if (!(th > 0.0)) continue;
            for (std::size_t jc = 0; jc + 1 < x_cuts.size(); ++jc) {
                const double xa = x_cuts[jc], xb = x_cuts[jc + 1];
                const double xm = 0.5 * (xa + xb), xh = 0.5 * (xb - xa);
                if (!(xh > 0.0)) continue;
                double cell = 0.0;
                for (std::size_t a = 0; a < tn.size(); ++a) {
                    const double t = tm + th * tn[a];
                    const double st = (t - b.tc) / b.rt;
                    const double bt = bump(st), bdt = bump_d(st) / b.rt;
                    for (std::size_t c = 0; c < tn.size(); ++c) {
                        const double x = xm + xh * tn[c];
                        const double sx = (x - b.xc) / b.rx;
                        const double bx = bump(sx), bdx = bump_d(sx) / b.rx;
                        const double uv = field.u(t, x);
                        const double integrand = uv * bdt * bx + flux.f(uv) * bt * bdx +
                                                 field.g(t, x) * bt * bx;
                        cell += tw[a] * tw[c] * integrand;
                    }
                }
                acc += cell * th * xh;
            }
        }
        const double psi_l1 = b.rt * b.rx * kBumpMass * kBumpMass;
        return std::fabs(acc) / psi_l1;
    });
}

SolutionField analytic_library(std::string_view name, const GridSpec& grid,
                               double constant_value) {
    const std::vector<double> t_grid = uniform_grid(grid.t_span, grid.nt);
    const std::vector<double> x_grid = uniform_grid(grid.x_span, grid.nx);

    auto sample = [&](auto&& fn) {
        std::vector<double> u(t_grid.size() * x_grid.size());
        for (std::size_t it = 0; it < t_grid.size(); ++it)
            for (std::size_t ix = 0; ix < x_grid.size(); ++ix)
                u[it * x_grid.size() + ix] = fn(t_grid[it], x_grid[ix]);
        return u;
    };
    const double xm = std::max(std::fabs(grid.x_span.lo), std::fabs(grid.x_span.hi));
    const double tm = std::max(std::fabs(grid.t_span.lo), std::fabs(grid.t_span.hi));

    if (name == "example33") {
        const double M = std::sqrt(xm) + 1.0;
        FluxModel flux = FluxModel::polynomial({0.0, 0.0, 1.0}, {-M, M}, 2);
        auto u = sample([](double, double x) { return sgn(x) * std::sqrt(std::fabs(x)); });
        SourceTerm g = SourceTerm::function([](double, double x) { return sgn(x); }, 1.0, {0.0});
        return SolutionField(t_grid, x_grid, std::move(u), std::move(g), std::move(flux));
    }
    if (name == "linear_decay") {
        if (grid.t_span.lo <= -1.0)
            throw DomainError("linear_decay: time range must stay above t = -1");
        const double M = xm / std::min(1.0, 1.0 + grid.t_span.lo) + 1.0;
        FluxModel flux = FluxModel::builtin("burgers", {-M, M});
        auto u = sample([](double t, double x) { return x / (1.0 + t); });
        return SolutionField(t_grid, x_grid, std::move(u), SourceTerm::zero(), std::move(flux));
    }
    if (name == "uniform_source") {
        FluxModel flux = FluxModel::builtin("burgers", {-tm - 1.0, tm + 1.0});
        auto u = sample([](double t, double) { return t; });
        SourceTerm g = SourceTerm::function([](double, double) { return 1.0; }, 1.0);
        return SolutionField(t_grid, x_grid, std::move(u), std::move(g), std::move(flux));
    }
    if (name == "constant") {
        const double c = constant_value;
        FluxModel flux =
            FluxModel::builtin("burgers", {c - std::fabs(c) - 1.0, c + std::fabs(c) + 1.0});
        auto u = sample([c](double, double) { return c; });
        return SolutionField(t_grid, x_grid, std::move(u), SourceTerm::zero(), std::move(flux));
    }
    throw ConfigError("unknown analytic field '" + std::string(name) + "'");
}

}  // namespace balance_lab
