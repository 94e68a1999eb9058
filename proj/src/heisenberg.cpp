#include "balance_lab/heisenberg.hpp"

#include <algorithm>
#include <cmath>

#include "balance_lab/csv.hpp"
#include "balance_lab/parallel.hpp"
#include "balance_lab/rng.hpp"
#include "balance_lab/solver.hpp"

namespace balance_lab {

HPoint group_mul(const HPoint& p, const HPoint& q) {
    return {p.x + q.x, p.y + q.y, p.t + q.t + 0.5 * (p.x * q.y - p.y * q.x)};
}

HPoint group_inverse(const HPoint& p) { return {-p.x, -p.y, -p.t}; }

HPoint dilate(double r, const HPoint& p) { return {r * p.x, r * p.y, r * r * p.t}; }

double norm_inf(const HPoint& p) {
    return std::max(std::hypot(p.x, p.y), std::sqrt(std::fabs(p.t)));
}

double dist_inf(const HPoint& p, const HPoint& q) {
    return norm_inf(group_mul(group_inverse(p), q));
}

namespace {

FluxModel surface_flux(double phi_min, double phi_max) {
    const double m = std::max(std::fabs(phi_min), std::fabs(phi_max)) + 1.0;
    return FluxModel::builtin("burgers", {-m, m});
}

}  // namespace

GraphSurface::GraphSurface(std::vector<double> y_grid, std::vector<double> t_grid,
                           std::vector<double> phi, SourceTerm g)
    : swapped_([&] {
          double lo = 0.0, hi = 0.0;
          if (!phi.empty()) {
              lo = *std::min_element(phi.begin(), phi.end());
              hi = *std::max_element(phi.begin(), phi.end());
          }
          return SolutionField(std::move(y_grid), std::move(t_grid), std::move(phi), std::move(g),
                               surface_flux(lo, hi));
      }()) {}

double GraphSurface::max_abs_phi() const {
    return std::max(std::fabs(swapped_.u_range_min()), std::fabs(swapped_.u_range_max()));
}

GraphSurface GraphSurface::with_lip_constant(double L, int pairs, std::uint64_t seed) const {
    if (!(L >= 0.0)) throw DomainError("surface: Lipschitz constant must be >= 0");
    const double sampled = intrinsic_lip_constant(*this, pairs, 1e-6, seed);
    if (sampled > L * (1.0 + 1e-9) + 1e-12)
        throw DomainError("surface: declared Lipschitz constant fails on the pair sample "
                          "(observed " +
                          std::to_string(sampled) + ")");
    GraphSurface copy = *this;
    copy.lip_const_ = L;
    return copy;
}

void GraphSurface::export_csv(const std::filesystem::path& path) const {
    CsvWriter out(path, {"y", "t", "phi", "g"});
    const auto& ys = y_grid();
    const auto& ts = t_grid();
    for (std::size_t iy = 0; iy < ys.size(); ++iy)
        for (std::size_t it = 0; it < ts.size(); ++it)
            out.row({format_double(ys[iy]), format_double(ts[it]),
                     format_double(swapped_.u_node(static_cast<int>(iy), static_cast<int>(it))),
                     format_double(swapped_.g_node(static_cast<int>(iy), static_cast<int>(it)))});
}

GraphSurface GraphSurface::import_csv(const std::filesystem::path& path,
                                      std::vector<double> g_breaks) {
    const CsvTable table = read_csv(path);
    if (table.header != std::vector<std::string>{"y", "t", "phi", "g"})
        throw ConfigError("surface csv must have header y,t,phi,g");
    std::vector<double> ys, ts, phis, gs;
    for (const auto& r : table.rows) {
        ys.push_back(std::stod(r[0]));
        ts.push_back(std::stod(r[1]));
        phis.push_back(std::stod(r[2]));
        gs.push_back(std::stod(r[3]));
    }
    if (ys.empty()) throw ConfigError("surface csv has no rows");
    std::size_t nt = 1;
    while (nt < ts.size() && ts[nt] > ts[nt - 1]) ++nt;
    if (nt < 2 || ys.size() % nt != 0)
        throw ConfigError("surface csv rows are not row-major by y then t");
    const std::size_t ny = ys.size() / nt;
    if (ny < 2) throw ConfigError("surface csv needs at least two y rows");
    std::vector<double> y_grid(ny), t_grid(ts.begin(), ts.begin() + static_cast<long>(nt));
    for (std::size_t i = 0; i < ny; ++i) y_grid[i] = ys[i * nt];
    return GraphSurface(std::move(y_grid), std::move(t_grid), std::move(phis),
                        SourceTerm::on_grid(std::move(gs), std::move(g_breaks)));
}

double d_phi_values(const WPoint& a, double phi_a, const WPoint& b, double phi_b) {
    const double dy = b.y - a.y;
    return std::fabs(dy) + std::sqrt(std::fabs(b.t - a.t - 0.5 * (phi_a + phi_b) * dy));
}

double d_phi(const GraphSurface& surface, const WPoint& a, const WPoint& b) {
    return d_phi_values(a, surface.phi(a.y, a.t), b, surface.phi(b.y, b.t));
}

double intrinsic_lip_constant(const GraphSurface& surface, int pair_count, double min_sep,
                              std::uint64_t seed) {
    if (pair_count < 1) throw DomainError("intrinsic_lip_constant: need pairs");
    const Rect& r = surface.rect();
    const double diam = std::hypot(r.t.length(), r.x.length());
    const double guard = min_sep * diam;

    Rng rng(seed);
    std::vector<double> draws(static_cast<std::size_t>(pair_count) * 4);
    for (std::size_t i = 0; i < draws.size(); i += 4) {
        draws[i] = rng.uniform(r.t.lo, r.t.hi);
        draws[i + 1] = rng.uniform(r.x.lo, r.x.hi);
        draws[i + 2] = rng.uniform(r.t.lo, r.t.hi);
        draws[i + 3] = rng.uniform(r.x.lo, r.x.hi);
    }
    return parallel_max(pair_count, [&](std::int64_t i) {
        const std::size_t k = static_cast<std::size_t>(i) * 4;
        const WPoint a{draws[k], draws[k + 1]}, b{draws[k + 2], draws[k + 3]};
        const double pa = surface.phi(a.y, a.t), pb = surface.phi(b.y, b.t);
        const double d = d_phi_values(a, pa, b, pb);
        if (d < guard) return 0.0;
        return std::fabs(pa - pb) / d;
    });
}

double graph_balance_residual(const GraphSurface& surface, int bump_count, std::uint64_t seed) {
    return weak_residual(surface.as_field(), bump_count, seed);
}

double quasi_triangle_constant(const GraphSurface& surface, int triple_count,
                               std::uint64_t seed) {
    if (triple_count < 1) throw DomainError("quasi_triangle_constant: need triples");
    const Rect& r = surface.rect();
    Rng rng(seed);
    std::vector<double> draws(static_cast<std::size_t>(triple_count) * 6);
    for (std::size_t i = 0; i < draws.size(); i += 2) {
        draws[i] = rng.uniform(r.t.lo, r.t.hi);
        draws[i + 1] = rng.uniform(r.x.lo, r.x.hi);
    }
    const double tiny = 1e-12 * (1.0 + r.t.length() + r.x.length());
    return parallel_max(triple_count, [&](std::int64_t i) {
        const std::size_t k = static_cast<std::size_t>(i) * 6;
        const WPoint a{draws[k], draws[k + 1]}, b{draws[k + 2], draws[k + 3]},
            c{draws[k + 4], draws[k + 5]};
        const double dab = d_phi(surface, a, b);
        const double dbc = d_phi(surface, b, c);
        const double dac = d_phi(surface, a, c);
        if (dab + dbc < tiny) return 0.0;
        return dac / (dab + dbc);
    });
}

std::vector<RademacherRow> rademacher_impl(const GraphSurface& surface, const WPoint& a0,
                                                  std::span<const double> scales, double w_hat) {
    const auto& ys = surface.y_grid();
    const auto& ts = surface.t_grid();
    const SolutionField& F = surface.as_field();
    const double phi0 = surface.phi(a0.y, a0.t);
    const double phi_sup = surface.max_abs_phi();
    const double dy = ys[1] - ys[0];
    const double dtg = ts[1] - ts[0];

    std::vector<RademacherRow> rows;
    rows.reserve(scales.size());
    for (double s : scales) {
        RademacherRow row{s, 0.0, false};
        if (s > 0.0) {
            // d_phi <= s forces |dy| <= s and |dt| <= s^2 + phi_sup-average * s
            const double t_reach = s * s + 0.5 * (phi_sup + std::fabs(phi0)) * s;
            const long iy_lo = std::max<long>(0, std::lround((a0.y - s - ys[0]) / dy) - 1);
            const long iy_hi = std::min<long>(static_cast<long>(ys.size()) - 1,
                                              std::lround((a0.y + s - ys[0]) / dy) + 1);
            const long it_lo =
                std::max<long>(0, std::lround((a0.t - t_reach - ts[0]) / dtg) - 1);
            const long it_hi = std::min<long>(static_cast<long>(ts.size()) - 1,
                                              std::lround((a0.t + t_reach - ts[0]) / dtg) + 1);
            const double y_floor = 1e-12 * (std::fabs(a0.y) + 1.0);
            const double t_floor = 1e-12 * (std::fabs(a0.t) + 1.0);
            for (long iy = iy_lo; iy <= iy_hi; ++iy) {
                const double yv = ys[static_cast<std::size_t>(iy)];
                if (std::fabs(yv - a0.y) > s) continue;
                for (long it = it_lo; it <= it_hi; ++it) {
                    const double tv = ts[static_cast<std::size_t>(it)];
                    // a node coincident with the base point up to rounding is
                    // the base point; the sqrt in d_phi would amplify its ulp
                    if (std::fabs(yv - a0.y) <= y_floor && std::fabs(tv - a0.t) <= t_floor)
                        continue;
                    const double phi =
                        F.u_node(static_cast<int>(iy), static_cast<int>(it));
                    const WPoint a{yv, tv};
                    const double d = d_phi_values(a0, phi0, a, phi);
                    if (!(d > 0.0) || d > s) continue;
                    const double num = std::fabs(phi - phi0 - w_hat * (yv - a0.y));
                    row.present = true;
                    row.r = std::max(row.r, num / d);
                }
            }
        }
        rows.push_back(row);
    }
    return rows;
}

std::vector<RademacherRow> rademacher_residual(const GraphSurface& surface, const WPoint& a0,
                                               std::span<const double> scales,
                                               std::optional<double> w_hat) {
    const Rect& r = surface.rect();
    if (!r.contains(a0.y, a0.t, 0.0))
        throw DomainError("rademacher_residual: base point outside omega");
    const double w = w_hat.value_or(surface.g(a0.y, a0.t));
    return rademacher_impl(surface, a0, scales, w);
}

HeisenbergAudit heisenberg_audit(int cases, std::uint64_t seed) {
    if (cases < 1) throw DomainError("heisenberg_audit: need cases");
    Rng rng(seed);
    HeisenbergAudit a;
    auto point = [&rng] { return HPoint{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)}; };
    auto gap = [](const HPoint& p, const HPoint& q) {
        return std::max({std::fabs(p.x - q.x), std::fabs(p.y - q.y), std::fabs(p.t - q.t)});
    };
    const HPoint id{};
    for (int i = 0; i < cases; ++i) {
        const HPoint p = point(), q = point(), r = point();
        const double s = rng.uniform(0.1, 2.0);

        a.associativity_err =
            std::max(a.associativity_err, gap(group_mul(group_mul(p, q), r),
                                              group_mul(p, group_mul(q, r))));
        a.identity_err = std::max({a.identity_err, gap(group_mul(p, id), p),
                                   gap(group_mul(id, p), p)});
        a.inverse_err = std::max({a.inverse_err, gap(group_mul(p, group_inverse(p)), id),
                                  gap(group_mul(group_inverse(p), p), id)});
        a.dilation_err = std::max(a.dilation_err, gap(dilate(s, group_mul(p, q)),
                                                      group_mul(dilate(s, p), dilate(s, q))));
        a.dinf_left_err =
            std::max(a.dinf_left_err,
                     std::fabs(dist_inf(group_mul(r, p), group_mul(r, q)) - dist_inf(p, q)));
        a.dinf_homog_err =
            std::max(a.dinf_homog_err,
                     std::fabs(dist_inf(dilate(s, p), dilate(s, q)) - s * dist_inf(p, q)));
        a.triangle_violation =
            std::max(a.triangle_violation,
                     dist_inf(p, r) - (dist_inf(p, q) + dist_inf(q, r)));
    }
    a.triangle_violation = std::max(a.triangle_violation, 0.0);
    return a;
}

GraphSurface analytic_surface(std::string_view name, const GridSpec& grid, double w) {
    std::vector<double> ys(static_cast<std::size_t>(grid.nt));
    std::vector<double> ts(static_cast<std::size_t>(grid.nx));
    for (int i = 0; i < grid.nt; ++i)
        ys[static_cast<std::size_t>(i)] = grid.t_span.lo + grid.t_span.length() * i / (grid.nt - 1);
    for (int i = 0; i < grid.nx; ++i)
        ts[static_cast<std::size_t>(i)] = grid.x_span.lo + grid.x_span.length() * i / (grid.nx - 1);

    auto sample = [&](auto&& fn) {
        std::vector<double> phi(ys.size() * ts.size());
        for (std::size_t iy = 0; iy < ys.size(); ++iy)
            for (std::size_t it = 0; it < ts.size(); ++it) phi[iy * ts.size() + it] = fn(ys[iy], ts[it]);
        return phi;
    };

    if (name == "sqrt2t") {
        auto phi = sample([](double, double t) { return sgn(t) * std::sqrt(2.0 * std::fabs(t)); });
        SourceTerm g = SourceTerm::function([](double, double t) { return sgn(t); }, 1.0, {0.0});
        return GraphSurface(std::move(ys), std::move(ts), std::move(phi), std::move(g));
    }
    if (name == "linear") {
        auto phi = sample([w](double y, double) { return w * y; });
        SourceTerm g = SourceTerm::function([w](double, double) { return w; }, std::fabs(w));
        return GraphSurface(std::move(ys), std::move(ts), std::move(phi), std::move(g));
    }
    if (name == "zero") {
        auto phi = sample([](double, double) { return 0.0; });
        return GraphSurface(std::move(ys), std::move(ts), std::move(phi), SourceTerm::zero());
    }
    throw ConfigError("unknown builtin surface '" + std::string(name) + "'");
}

SolutionField field_from_surface(const GraphSurface& surface) { return surface.as_field(); }

GraphSurface surface_from_field(const SolutionField& field) {
    std::vector<double> phi = field.u_values();
    SourceTerm g = field.source();
    return GraphSurface(field.t_grid(), field.x_grid(), std::move(phi), std::move(g));
}

}  // namespace balance_lab
