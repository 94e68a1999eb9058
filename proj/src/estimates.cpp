#include "balance_lab/estimates.hpp"

#include <algorithm>
#include <cmath>

#include "balance_lab/parallel.hpp"
#include "balance_lab/quadrature.hpp"
#include "balance_lab/rng.hpp"

namespace balance_lab {

namespace {

// Composite Simpson that also exposes its samples, for the error estimate.
double simpson_sampled(const std::function<double(double)>& f, double a, double b, int m,
                       std::vector<double>& samples) {
    if (m < 2) m = 2;
    if (m % 2) ++m;
    const double h = (b - a) / m;
    samples.resize(static_cast<std::size_t>(m) + 1);
    for (int i = 0; i <= m; ++i) samples[static_cast<std::size_t>(i)] = f(a + i * h);
    double acc = samples.front() + samples.back();
    for (int i = 1; i < m; i += 2) acc += 4.0 * samples[static_cast<std::size_t>(i)];
    for (int i = 2; i < m; i += 2) acc += 2.0 * samples[static_cast<std::size_t>(i)];
    return acc * h / 3.0;
}

enum class Curvature { convex, concave };

Curvature classify_band_convexity(const SolutionField& field, const Characteristic& gamma,
                                  double width, double t1, double t2, int slices) {
    double u_lo = 0.0, u_hi = 0.0;
    bool first = true;
    for (int i = 0; i <= slices; ++i) {
        const double t = t1 + (t2 - t1) * i / slices;
        const double c = gamma.position(t);
        for (int j = -8; j <= 8; ++j) {
            const double v = field.u(t, c + width * j / 8.0);
            if (first) {
                u_lo = u_hi = v;
                first = false;
            } else {
                u_lo = std::min(u_lo, v);
                u_hi = std::max(u_hi, v);
            }
        }
    }
    const auto& flux = field.flux();
    bool any_pos = false, any_neg = false;
    const int n = 512;
    for (int i = 0; i < n; ++i) {
        const double v = u_lo + (u_hi - u_lo) * i / (n - 1);
        const double d2 = flux.f2(v);
        if (d2 > 0.0) any_pos = true;
        if (d2 < 0.0) any_neg = true;
    }
    if (any_pos && any_neg) throw DomainError("flux not convex on solution range");
    return any_neg ? Curvature::concave : Curvature::convex;
}

}  // namespace

BalanceReport dafermos_balance(const SolutionField& field, const Characteristic& gamma,
                               double width, double t1, double t2) {
    if (!(width > 0.0)) throw DomainError("dafermos_balance: band width must be positive");
    if (!(t1 < t2)) throw DomainError("dafermos_balance: need t1 < t2");
    const double t_slack = 1e-9 * std::max(1.0, std::fabs(t2));
    if (t1 < gamma.t_min() - t_slack || t2 > gamma.t_max() + t_slack)
        throw DomainError("dafermos_balance: [t1, t2] outside the traced span");

    const int slices = std::clamp(2 * static_cast<int>(gamma.size()), 128, 4096);
    const Interval xr = field.rect().x;
    for (int i = 0; i <= slices; ++i) {
        const double t = t1 + (t2 - t1) * i / slices;
        const double c = gamma.position(t);
        if (c - width < xr.lo - 1e-12 || c + width > xr.hi + 1e-12)
            throw DomainError("dafermos_balance: band leaves the rectangle");
    }

    BalanceReport rep;
    rep.width = width;
    rep.t1 = t1;
    rep.t2 = t2;
    rep.concave = classify_band_convexity(field, gamma, width, t1, t2, std::min(slices, 256)) ==
                  Curvature::concave;

    const int m_x = std::clamp(2 * static_cast<int>(std::ceil(width / field.dx())), 32, 8192);
    double bound = 0.0;
    std::vector<double> samples;

    auto band_integral = [&](double t, double lo) {
        const double val = simpson_sampled([&](double x) { return field.u(t, x); }, lo,
                                           lo + width, m_x, samples);
        bound += second_difference_bound(samples, width);
        return val;
    };

    const double g1p = gamma.position(t1), g2p = gamma.position(t2);
    rep.lhs_plus = band_integral(t2, g2p) - band_integral(t1, g1p);
    rep.lhs_minus = band_integral(t2, g2p - width) - band_integral(t1, g1p - width);

    const auto breaks = field.source_breaks();
    auto slice_value = [&](double t, double lo) {
        return simpson_split([&](double x) { return field.g(t, x); }, lo, lo + width, breaks, 16);
    };
    std::vector<double> plus_slices(static_cast<std::size_t>(slices) + 1);
    std::vector<double> minus_slices(static_cast<std::size_t>(slices) + 1);
    const double dt_slice = (t2 - t1) / slices;
    for (int i = 0; i <= slices; ++i) {
        const double t = t1 + dt_slice * i;
        const double c = gamma.position(t);
        plus_slices[static_cast<std::size_t>(i)] = slice_value(t, c);
        minus_slices[static_cast<std::size_t>(i)] = slice_value(t, c - width);
    }
    auto trapezoid = [&](const std::vector<double>& s) {
        double acc = 0.5 * (s.front() + s.back());
        for (std::size_t i = 1; i + 1 < s.size(); ++i) acc += s[i];
        return acc * dt_slice;
    };
    rep.rhs_plus = trapezoid(plus_slices);
    rep.rhs_minus = trapezoid(minus_slices);
    bound += second_difference_bound(plus_slices, t2 - t1);
    bound += second_difference_bound(minus_slices, t2 - t1);

    // curve samples enter through linear interpolation of gamma; a kink of the
    // sampled curve shifts both band edges by at most max|D2 gamma| / 8
    double curve_kink = 0.0;
    for (std::size_t i = 1; i + 1 < gamma.size(); ++i)
        curve_kink = std::max(curve_kink, std::fabs(gamma.positions[i + 1] -
                                                    2.0 * gamma.positions[i] +
                                                    gamma.positions[i - 1]));
    const double u_sup = std::max(std::fabs(field.u_range_min()), std::fabs(field.u_range_max()));
    bound += (curve_kink / 8.0) * 2.0 * (u_sup + field.g_inf() * (t2 - t1));

    const double scale = 1.0 + std::fabs(rep.lhs_plus) + std::fabs(rep.rhs_plus) +
                         std::fabs(rep.lhs_minus) + std::fabs(rep.rhs_minus);
    rep.quad_error_bound = bound + 1e-12 * scale;
    return rep;
}

double lipschitz_along(const SolutionField& field, const Characteristic& gamma) {
    (void)field;
    if (gamma.size() < 3) throw DomainError("lipschitz_along: need at least 3 samples");
    // max over i < j equals max over adjacent samples (telescoping)
    double worst = 0.0;
    for (std::size_t i = 1; i < gamma.size(); ++i) {
        const double dt = gamma.times[i] - gamma.times[i - 1];
        if (!(dt > 0.0)) throw DomainError("lipschitz_along: times must increase");
        worst = std::max(worst, std::fabs(gamma.values[i] - gamma.values[i - 1]) / dt);
    }
    return worst;
}

HolderReport holder_seminorm(const SolutionField& field, double t, int ell, double window_lo,
                             double window_hi) {
    if (ell < 2) throw DomainError("holder_seminorm: ell must be >= 2");
    const int it = field.nearest_time_index(t);
    if (std::fabs(field.t_grid()[static_cast<std::size_t>(it)] - t) >
        1e-9 * std::max(1.0, std::fabs(t)))
        throw DomainError("holder_seminorm: t must be a grid time");
    const auto [jlo, jhi] = field.column_range(window_lo, window_hi);
    const int m_raw = jhi - jlo + 1;
    if (m_raw < 2) throw DomainError("holder_seminorm: window too small");

    HolderReport rep;
    constexpr long kPairCap = 2'000'000;
    int stride = 1;
    auto points = [&](int s) { return (m_raw + s - 1) / s; };
    while (static_cast<long>(points(stride)) * (points(stride) - 1) / 2 > kPairCap) ++stride;
    rep.stride = stride;

    std::vector<double> xs, us;
    for (int j = jlo; j <= jhi; j += stride) {
        xs.push_back(field.x_grid()[static_cast<std::size_t>(j)]);
        us.push_back(field.u_node(it, j));
    }
    const int m = static_cast<int>(xs.size());
    rep.pairs_scanned = static_cast<long>(m) * (m - 1) / 2;

    const double inv_ell = 1.0 / static_cast<double>(ell);
    rep.empirical = parallel_max(m, [&](std::int64_t i) {
        double best = 0.0;
        for (int j = static_cast<int>(i) + 1; j < m; ++j) {
            const double d = xs[static_cast<std::size_t>(j)] - xs[static_cast<std::size_t>(i)];
            const double q = std::fabs(us[static_cast<std::size_t>(j)] -
                                       us[static_cast<std::size_t>(i)]) /
                             (ell == 2 ? std::sqrt(d) : std::pow(d, inv_ell));
            best = std::max(best, q);
        }
        return best;
    });
    if (rep.empirical < 0.0) rep.empirical = 0.0;

    // sup-oscillation omega(h) over dyadic h, via per-lag maxima
    const double W = window_hi - window_lo;
    const double dxs = field.dx() * stride;
    const int max_lag = std::min(m - 1, static_cast<int>(std::floor(0.5 * W / dxs)));
    std::vector<double> osc(static_cast<std::size_t>(std::max(max_lag, 0)) + 1, 0.0);
    for (int d = 1; d <= max_lag; ++d) {
        double worst = 0.0;
        for (int i = 0; i + d < m; ++i)
            worst = std::max(worst, std::fabs(us[static_cast<std::size_t>(i + d)] -
                                              us[static_cast<std::size_t>(i)]));
        osc[static_cast<std::size_t>(d)] = std::max(osc[static_cast<std::size_t>(d - 1)], worst);
    }
    std::vector<double> log_h, log_w;
    for (int k = 1;; ++k) {
        const double h = W / std::pow(2.0, k);
        const int lag = static_cast<int>(std::floor(h / dxs));
        if (lag < 3) break;
        const double w = osc[static_cast<std::size_t>(std::min(lag, max_lag))];
        if (w <= 0.0) break;
        log_h.push_back(std::log(h));
        log_w.push_back(std::log(w));
    }
    rep.scales_used = static_cast<int>(log_h.size());
    rep.fit_reliable = rep.scales_used >= 8;
    if (rep.scales_used >= 2) {
        double sx = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < log_h.size(); ++i) {
            sx += log_h[i];
            sy += log_w[i];
        }
        const double n = static_cast<double>(log_h.size());
        const double mx = sx / n, my = sy / n;
        double sxx = 0.0, sxy = 0.0, syy = 0.0;
        for (std::size_t i = 0; i < log_h.size(); ++i) {
            sxx += (log_h[i] - mx) * (log_h[i] - mx);
            sxy += (log_h[i] - mx) * (log_w[i] - my);
            syy += (log_w[i] - my) * (log_w[i] - my);
        }
        rep.exponent_fit = sxy / sxx;
        rep.fit_r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    }

    // theoretical constant from flux statistics over the window's value range
    double um = us[0], uM = us[0];
    for (double v : us) {
        um = std::min(um, v);
        uM = std::max(uM, v);
    }
    if (uM - um > 1e-14 * (1.0 + std::fabs(uM))) {
        try {
            const Interval I{um, uM};
            const IntervalStats stats = convexity_ratio_q(field.flux(), I);
            double c = field.flux().c_ell().value_or(0.0);
            if (!(c > 0.0)) c = nonlinearity_constant(field.flux(), ell, I, 512);
            if (c > 0.0 && stats.q > 0.0) {
                rep.theoretical_applicable = true;
                const double G = field.g_inf();
                if (G > 0.0) {
                    rep.theoretical = std::pow(4.0 * G / (stats.q * c), inv_ell);
                } else {
                    rep.theoretical = 0.0;
                    rep.degenerate_source = true;
                }
            }
        } catch (const DomainError&) {
            rep.theoretical_applicable = false;
        }
    }
    return rep;
}

namespace {

double oscillation_core(const SolutionField& field, int it, double rt, double x, double u0,
                        int ell, double delta) {
    const auto& xg = field.x_grid();
    const int nx = field.nx();
    const double slack = 1e-12 * std::max(1.0, field.rect().x.length());
    int jlo = static_cast<int>(std::ceil((x - delta - xg.front() - slack) / field.dx()));
    int jhi = static_cast<int>(std::floor((x + delta - xg.front() + slack) / field.dx()));
    jlo = std::clamp(jlo, 0, nx - 1);
    jhi = std::clamp(jhi, 0, nx - 1);
    const std::size_t row0 = static_cast<std::size_t>(it) * nx;
    const std::size_t row1 = row0 + (rt > 0.0 ? nx : 0);
    const auto& u = field.u_values();
    double best = 0.0;
    const double inv_ell = 1.0 / static_cast<double>(ell);
    for (int j = jlo; j <= jhi; ++j) {
        const double d = std::fabs(xg[static_cast<std::size_t>(j)] - x);
        if (!(d > 0.0) || d > delta + slack) continue;
        const double uj = (1.0 - rt) * u[row0 + j] + rt * u[row1 + j];
        const double q =
            std::fabs(uj - u0) / (ell == 2 ? std::sqrt(d) : std::pow(d, inv_ell));
        best = std::max(best, q);
    }
    return best;
}

}  // namespace

double oscillation_a(const SolutionField& field, double t, double x, int ell, double delta) {
    if (ell < 2) throw DomainError("oscillation_a: ell must be >= 2");
    if (delta < 2.0 * field.dx())
        throw DomainError("oscillation_a: delta must be at least two cells");
    if (x - delta < field.rect().x.lo - 1e-12 || x + delta > field.rect().x.hi + 1e-12)
        throw DomainError("oscillation_a: [x - delta, x + delta] leaves the window");
    if (!field.rect().t.contains(t, 1e-12))
        throw DomainError("oscillation_a: t outside the rectangle");

    const double dt = field.dt();
    int it = static_cast<int>(std::floor((t - field.t_grid().front()) / dt));
    it = std::clamp(it, 0, field.nt() - 2);
    double rt = (t - field.t_grid()[static_cast<std::size_t>(it)]) / dt;
    rt = std::clamp(rt, 0.0, 1.0);
    const double u0 = field.u(t, x);
    return oscillation_core(field, it, rt, x, u0, ell, delta);
}

std::vector<SurveyRow> oscillation_survey(const SolutionField& field, int sample_count,
                                          std::span<const double> deltas, double threshold,
                                          int ell, std::uint64_t seed) {
    if (sample_count < 1) throw DomainError("oscillation_survey: need samples");
    if (deltas.empty()) throw DomainError("oscillation_survey: need at least one delta");
    double delta_max = 0.0;
    for (double d : deltas) {
        if (d < 2.0 * field.dx())
            throw DomainError("oscillation_survey: every delta must span at least two cells");
        delta_max = std::max(delta_max, d);
    }
    const Rect& rect = field.rect();
    const double x_lo = rect.x.lo + delta_max, x_hi = rect.x.hi - delta_max;
    if (!(x_hi > x_lo)) throw DomainError("oscillation_survey: rectangle too small for deltas");

    Rng rng(seed);
    std::vector<double> ts(static_cast<std::size_t>(sample_count));
    std::vector<double> xs(static_cast<std::size_t>(sample_count));
    for (int i = 0; i < sample_count; ++i) {
        ts[static_cast<std::size_t>(i)] = rng.uniform(rect.t.lo, rect.t.hi);
        xs[static_cast<std::size_t>(i)] = rng.uniform(x_lo, x_hi);
    }

    const int nd = static_cast<int>(deltas.size());
    std::vector<std::vector<long>> counts(static_cast<std::size_t>(worker_count()),
                                          std::vector<long>(static_cast<std::size_t>(nd), 0));
    for_stripes(sample_count, [&](int w, std::int64_t b, std::int64_t e) {
        auto& local = counts[static_cast<std::size_t>(w)];
        for (std::int64_t i = b; i < e; ++i) {
            const double t = ts[static_cast<std::size_t>(i)];
            const double x = xs[static_cast<std::size_t>(i)];
            const double dtg = field.dt();
            int it = std::clamp(
                static_cast<int>(std::floor((t - field.t_grid().front()) / dtg)), 0,
                field.nt() - 2);
            double rt = std::clamp(
                (t - field.t_grid()[static_cast<std::size_t>(it)]) / dtg, 0.0, 1.0);
            const double u0 = field.u(t, x);
            for (int k = 0; k < nd; ++k) {
                const double a = oscillation_core(field, it, rt, x, u0, ell, deltas[k]);
                if (a > threshold) ++local[static_cast<std::size_t>(k)];
            }
        }
    });

    std::vector<SurveyRow> rows(static_cast<std::size_t>(nd));
    for (int k = 0; k < nd; ++k) {
        long total = 0;
        for (const auto& local : counts) total += local[static_cast<std::size_t>(k)];
        rows[static_cast<std::size_t>(k)] = {deltas[k],
                                             static_cast<double>(total) / sample_count};
    }
    return rows;
}

}  // namespace balance_lab
