#include "balance_lab/covering.hpp"

#include <algorithm>
#include <cmath>

#include "balance_lab/quadrature.hpp"
#include "balance_lab/solver.hpp"

namespace balance_lab {

Scalar2D Scalar2D::of_field_u(const SolutionField& field) {
    Scalar2D q;
    q.fn = [&field](double t, double x) { return field.u(t, x); };
    q.domain = field.rect();
    return q;
}

Scalar2D Scalar2D::of_field_g(const SolutionField& field) {
    Scalar2D q;
    q.fn = [&field](double t, double x) { return field.g(t, x); };
    q.x_breaks.assign(field.source_breaks().begin(), field.source_breaks().end());
    q.domain = field.rect();
    return q;
}

double CoveringRegion::half_width() const {
    return rho * std::pow(eps, static_cast<double>(ell));
}

double CoveringRegion::area() const {
    return 4.0 * rho * std::pow(eps, static_cast<double>(ell + 1));
}

CoveringRegion make_region(const SolutionField& field, double sigma, double x0, double eps,
                           double rho) {
    if (!(eps > 0.0) || !(rho > 0.0))
        throw DomainError("make_region: eps and rho must be positive");
    CoveringRegion region;
    region.sigma = sigma;
    region.eps = eps;
    region.rho = rho;
    region.ell = field.flux().order();

    const Interval span{sigma - eps, sigma + eps};
    if (!field.rect().t.contains(span, 1e-12))
        throw DomainError("make_region: time span leaves the rectangle");
    const double dt = std::min(eps / 16.0, default_trace_step(field));
    region.center = trace_characteristic(field, sigma, x0, span.lo, span.hi, dt);
    if (region.center.exited)
        throw DomainError("make_region: characteristic leaves the rectangle (region must be full)");
    const double reach = std::fabs(region.center.t_max() - span.hi) +
                         std::fabs(region.center.t_min() - span.lo);
    if (reach > 1e-9 * std::max(1.0, eps))
        throw DomainError("make_region: traced curve does not cover the span");
    return region;
}

namespace {

// Trapezoid over the curve samples of per-slice x-integrals of fn.
double slice_integral(const CoveringRegion& region, const Scalar2D& q,
                      const std::function<double(double)>& transform) {
    const auto& curve = region.center;
    const double w = region.half_width();
    std::vector<double> slices(curve.size());
    for (std::size_t i = 0; i < curve.size(); ++i) {
        const double t = curve.times[i];
        const double c = curve.positions[i];
        slices[i] = simpson_split([&](double x) { return transform(q.fn(t, x)); }, c - w, c + w,
                                  q.x_breaks, 8);
    }
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < curve.size(); ++i)
        acc += 0.5 * (curve.times[i + 1] - curve.times[i]) * (slices[i] + slices[i + 1]);
    return acc;
}

}  // namespace

double region_area_quadrature(const CoveringRegion& region) {
    Scalar2D one;
    one.fn = [](double, double) { return 1.0; };
    return slice_integral(region, one, [](double v) { return v; });
}

RegionAverage average_over(const Scalar2D& q, const CoveringRegion& region, double reference) {
    if (q.domain) {
        const auto& curve = region.center;
        const double w = region.half_width();
        for (std::size_t i = 0; i < curve.size(); ++i) {
            if (!q.domain->contains(curve.times[i], curve.positions[i] - w, 1e-12) ||
                !q.domain->contains(curve.times[i], curve.positions[i] + w, 1e-12))
                throw DomainError("average_over: region leaves the domain of q");
        }
    }
    const double area = region_area_quadrature(region);
    RegionAverage out;
    out.mean = slice_integral(region, q, [](double v) { return v; }) / area;
    out.mean_abs_dev =
        slice_integral(region, q, [reference](double v) { return std::fabs(v - reference); }) /
        area;
    return out;
}

bool LebesgueTable::passes(double tol) const {
    for (std::size_t ir = 0; ir < rho_list.size(); ++ir) {
        bool ok = false;
        for (std::size_t ie = eps_list.size(); ie-- > 0;) {
            const LebesgueCell& c = cell(ir, ie);
            if (c.present) {
                ok = c.dev <= tol;  // smallest present eps decides the column
                break;
            }
        }
        if (!ok) return false;
    }
    return true;
}

LebesgueTable lebesgue_point_test(const SolutionField& field, const Scalar2D& q, double t,
                                  double x, std::span<const double> rho_list,
                                  std::span<const double> eps_list) {
    if (rho_list.empty() || eps_list.empty())
        throw DomainError("lebesgue_point_test: need rho and eps lists");
    LebesgueTable table;
    table.rho_list.assign(rho_list.begin(), rho_list.end());
    // eps sorted descending so each column reads as a convergence sequence
    table.eps_list.assign(eps_list.begin(), eps_list.end());
    std::sort(table.eps_list.begin(), table.eps_list.end(), std::greater<>());

    const double reference = q.fn(t, x);
    table.cells.resize(table.rho_list.size() * table.eps_list.size());
    for (std::size_t ir = 0; ir < table.rho_list.size(); ++ir) {
        for (std::size_t ie = 0; ie < table.eps_list.size(); ++ie) {
            LebesgueCell& c = table.cells[ir * table.eps_list.size() + ie];
            c.rho = table.rho_list[ir];
            c.eps = table.eps_list[ie];
            try {
                const CoveringRegion region = make_region(field, t, x, c.eps, c.rho);
                c.dev = average_over(q, region, reference).mean_abs_dev;
                c.present = true;
            } catch (const DomainError&) {
                c.present = false;
            }
        }
    }
    return table;
}

}  // namespace balance_lab
