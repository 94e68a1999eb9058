#include "balance_lab/flux.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "balance_lab/parallel.hpp"

namespace balance_lab {

namespace {

double horner(std::span<const double> c, double v) {
    double acc = 0.0;
    for (std::size_t i = c.size(); i-- > 0;) acc = acc * v + c[i];
    return acc;
}

std::vector<double> differentiate(std::span<const double> c) {
    std::vector<double> d;
    for (std::size_t k = 1; k < c.size(); ++k) d.push_back(c[k] * static_cast<double>(k));
    if (d.empty()) d.push_back(0.0);
    return d;
}

// Coefficients b_k = p^(k)(v)/k! of p(v + h) as a polynomial in h,
// by the repeated-Horner Taylor shift.
std::vector<double> taylor_shift(std::span<const double> c, double v) {
    std::vector<double> a(c.begin(), c.end());
    if (a.empty()) a.push_back(0.0);
    const std::size_t d = a.size() - 1;
    for (std::size_t j = 0; j <= d; ++j)
        for (std::size_t i = d; i-- > j;) a[i] += v * a[i + 1];
    return a;
}

void require_subinterval(const FluxModel& flux, Interval I, const char* who) {
    if (!I.valid()) throw DomainError(std::string(who) + ": degenerate interval");
    if (!flux.interval().contains(I, 1e-12 * (1.0 + flux.interval().length())))
        throw DomainError(std::string(who) + ": interval not inside flux working interval");
}

}  // namespace

FluxModel FluxModel::polynomial(std::vector<double> coeffs, Interval interval, int order) {
    if (!interval.valid()) throw DomainError("flux: working interval must satisfy a < b");
    if (order < 2) throw DomainError("flux: nonlinearity order must be >= 2");
    while (coeffs.size() > 1 && coeffs.back() == 0.0) coeffs.pop_back();
    if (coeffs.empty()) coeffs.push_back(0.0);
    FluxModel m;
    m.polynomial_ = true;
    m.coeffs_ = std::move(coeffs);
    m.d1_ = differentiate(m.coeffs_);
    m.d2_ = differentiate(m.d1_);
    m.interval_ = interval;
    m.order_ = order;
    return m;
}

FluxModel FluxModel::callables(std::function<double(double)> f, std::function<double(double)> f1,
                               std::function<double(double)> f2, Interval interval, int order) {
    if (!interval.valid()) throw DomainError("flux: working interval must satisfy a < b");
    if (order < 2) throw DomainError("flux: nonlinearity order must be >= 2");
    if (!f || !f1 || !f2) throw DomainError("flux: f, f', f'' are all required");
    FluxModel m;
    m.fn_ = std::move(f);
    m.fn1_ = std::move(f1);
    m.fn2_ = std::move(f2);
    m.interval_ = interval;
    m.order_ = order;
    return m;
}

FluxModel FluxModel::builtin(std::string_view name, Interval interval) {
    if (name == "burgers") return polynomial({0.0, 0.0, 0.5}, interval, 2);
    if (name == "cubic") return polynomial({0.0, 0.0, 0.0, 1.0}, interval, 3);
    if (name == "quartic") return polynomial({0.0, 0.0, 0.0, 0.0, 1.0}, interval, 2);
    throw ConfigError("unknown builtin flux '" + std::string(name) + "'");
}

double FluxModel::f(double u) const { return polynomial_ ? horner(coeffs_, u) : fn_(u); }
double FluxModel::f1(double u) const { return polynomial_ ? horner(d1_, u) : fn1_(u); }
double FluxModel::f2(double u) const { return polynomial_ ? horner(d2_, u) : fn2_(u); }

int FluxModel::degree() const { return polynomial_ ? static_cast<int>(coeffs_.size()) - 1 : -1; }

double FluxModel::taylor_remainder(double v, double h) const {
    if (polynomial_) {
        const auto b = taylor_shift(coeffs_, v);
        double acc = 0.0;
        for (std::size_t k = b.size(); k-- > 2;) acc = acc * h + b[k];
        return acc * h * h;
    }
    return fn_(v + h) - fn_(v) - fn1_(v) * h;
}

std::vector<double> FluxModel::remainder_coefficients(double v) const {
    if (!polynomial_) return {};
    auto b = taylor_shift(coeffs_, v);
    if (b.size() > 2) {
        b.erase(b.begin(), b.begin() + 2);
    } else {
        b.clear();
    }
    return b;
}

double FluxModel::derivative(int k, double v) const {
    if (k < 0) throw DomainError("flux: derivative order must be >= 0");
    if (polynomial_) {
        std::vector<double> c = coeffs_;
        for (int i = 0; i < k; ++i) c = differentiate(c);
        return horner(c, v);
    }
    switch (k) {
        case 0: return fn_(v);
        case 1: return fn1_(v);
        case 2: return fn2_(v);
        default: throw DomainError("flux: derivatives above 2 need a polynomial flux");
    }
}

FluxModel FluxModel::with_c_ell(double c, double tol) const {
    if (!(c > 0.0)) throw DomainError("flux: c_ell must be positive");
    const int n = 128;
    NonlinearityScan scan = nonlinearity_scan(*this, order_, interval_, n);
    if (scan.c < c - tol)
        throw DomainError("flux: declared c_ell fails the nonlinearity inequality (grid value " +
                          std::to_string(scan.c) + ")");
    FluxModel copy = *this;
    copy.c_ell_ = c;
    return copy;
}

double FluxModel::max_f1(Interval range, int n) const {
    if (n < 2) n = 2;
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = range.lo + range.length() * i / (n - 1);
        worst = std::max(worst, std::fabs(f1(v)));
    }
    return worst;
}

NonlinearityScan nonlinearity_scan(const FluxModel& flux, int ell, Interval I, int n) {
    if (ell < 2) throw DomainError("nonlinearity_constant: ell must be >= 2");
    if (n < 64) throw DomainError("nonlinearity_constant: grid size must be >= 64");
    require_subinterval(flux, I, "nonlinearity_constant");

    const double len = I.length();
    const double h_min = 1e-6 * len;
    const int n_mag = n / 2;
    const double ratio_step = std::pow(len / h_min, 1.0 / (n_mag - 1));

    std::vector<double> hs, h_pows;
    hs.reserve(2 * static_cast<std::size_t>(n_mag));
    double mag = h_min;
    for (int j = 0; j < n_mag; ++j, mag *= ratio_step) {
        hs.push_back(mag);
        hs.push_back(-mag);
        const double p = std::pow(mag, static_cast<double>(ell));
        h_pows.push_back(p);
        h_pows.push_back(p);
    }

    struct Best {
        double c = std::numeric_limits<double>::infinity();
        double v = 0.0, h = 0.0;
        long pairs = 0;
    };
    std::vector<Best> partial(static_cast<std::size_t>(worker_count()));
    const double slack = 1e-12 * len;
    const bool poly = flux.is_polynomial();
    for_stripes(n, [&](int w, std::int64_t b, std::int64_t e) {
        Best best;
        for (std::int64_t i = b; i < e; ++i) {
            const double v = I.lo + len * static_cast<double>(i) / (n - 1);
            const std::vector<double> coeff = flux.remainder_coefficients(v);
            for (std::size_t jh = 0; jh < hs.size(); ++jh) {
                const double h = hs[jh];
                const double vh = v + h;
                if (vh < I.lo - slack || vh > I.hi + slack) continue;
                double remainder;
                if (poly) {
                    double acc = 0.0;
                    for (std::size_t k = coeff.size(); k-- > 0;) acc = acc * h + coeff[k];
                    remainder = acc * h * h;
                } else {
                    remainder = flux.taylor_remainder(v, h);
                }
                const double c = std::fabs(remainder) / h_pows[jh];
                ++best.pairs;
                if (c < best.c) {
                    best.c = c;
                    best.v = v;
                    best.h = h;
                }
            }
        }
        partial[static_cast<std::size_t>(w)] = best;
    });

    NonlinearityScan out;
    out.c = std::numeric_limits<double>::infinity();
    for (const Best& b : partial) {
        out.pairs += b.pairs;
        if (b.c < out.c) {
            out.c = b.c;
            out.worst_v = b.v;
            out.worst_h = b.h;
        }
    }
    if (out.pairs == 0) throw DomainError("nonlinearity_constant: no admissible grid pairs");
    return out;
}

double nonlinearity_constant(const FluxModel& flux, int ell, Interval I, int n) {
    return nonlinearity_scan(flux, ell, I, n).c;
}

double nonlinearity_constant_at(const FluxModel& flux, double v, int ell, Interval I, int n) {
    if (ell < 2) throw DomainError("nonlinearity_constant_at: ell must be >= 2");
    if (n < 64) throw DomainError("nonlinearity_constant_at: grid size must be >= 64");
    require_subinterval(flux, I, "nonlinearity_constant_at");
    if (!I.contains(v)) throw DomainError("nonlinearity_constant_at: v outside interval");

    const double len = I.length();
    const double h_min = 1e-6 * len;
    const double ratio_step = std::pow(len / h_min, 1.0 / (n - 1));
    double best = std::numeric_limits<double>::infinity();
    double mag = h_min;
    const double slack = 1e-12 * len;
    for (int j = 0; j < n; ++j, mag *= ratio_step) {
        for (double h : {mag, -mag}) {
            const double vh = v + h;
            if (vh < I.lo - slack || vh > I.hi + slack) continue;
            best = std::min(best, std::fabs(flux.taylor_remainder(v, h)) /
                                      std::pow(std::fabs(h), static_cast<double>(ell)));
        }
    }
    if (!std::isfinite(best)) throw DomainError("nonlinearity_constant_at: no admissible pairs");
    return best;
}

MinOrderResult min_order_at_point(const FluxModel& flux, double v, int max_order) {
    if (max_order < 2) throw DomainError("min_order_at_point: max order must be >= 2");
    MinOrderResult out;

    auto factorial = [](int k) {
        double acc = 1.0;
        for (int i = 2; i <= k; ++i) acc *= i;
        return acc;
    };

    if (flux.is_polynomial()) {
        double scale = 1.0;
        for (double c : flux.coefficients()) scale = std::max(scale, std::fabs(c));
        for (int k = 2; k <= max_order; ++k) {
            const double dk = flux.derivative(k, v);
            if (std::fabs(dk) > 1e-10 * scale) {
                out.k = k;
                out.c0 = std::fabs(dk) / factorial(k);
                out.found = true;
                return out;
            }
        }
        return out;  // no finite order up to max_order
    }

    // Callable flux: f'' is exact, higher orders by central differences on f''.
    const double f2v = flux.f2(v);
    const double scale = 1.0 + std::fabs(flux.f(v)) + std::fabs(flux.f1(v));
    if (std::fabs(f2v) > 1e-10 * scale) {
        out.k = 2;
        out.c0 = std::fabs(f2v) / 2.0;
        out.found = true;
        return out;
    }
    if (max_order == 2)
        throw DomainError("min_order_at_point: derivatives above 2 unavailable; "
                          "declare a larger max order to enable finite differences");
    const double step =
        std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + std::fabs(v));
    std::vector<double> samples;  // f'' on a centered stencil wide enough for max_order - 2 diffs
    const int half = max_order - 2;
    for (int i = -half; i <= half; ++i) samples.push_back(flux.f2(v + i * step));
    out.approximate = true;
    std::vector<double> diff = samples;
    for (int k = 3; k <= max_order; ++k) {
        // one central first-difference per extra order
        std::vector<double> next(diff.size() - 2);
        for (std::size_t i = 0; i + 2 < diff.size(); ++i)
            next[i] = (diff[i + 2] - diff[i]) / (2.0 * step);
        diff = std::move(next);
        const double dk = diff[diff.size() / 2];
        if (std::fabs(dk) > 1e-5 * scale) {
            out.k = k;
            out.c0 = std::fabs(dk) / factorial(k);
            out.found = true;
            return out;
        }
    }
    return out;
}

std::vector<double> inflection_zeros(const FluxModel& flux, Interval J, int n) {
    if (n < 128) throw DomainError("inflection_zeros: scan size must be >= 128");
    require_subinterval(flux, J, "inflection_zeros");

    const double len = J.length();
    std::vector<double> xs(n), ys(n);
    double y_scale = 0.0;
    for (int i = 0; i < n; ++i) {
        xs[i] = J.lo + len * i / (n - 1);
        ys[i] = flux.f2(xs[i]);
        y_scale = std::max(y_scale, std::fabs(ys[i]));
    }
    const double ztol = 1e-13 * std::max(1.0, y_scale);
    if (y_scale <= ztol) throw DomainError("degenerate flux: f'' vanishes on the scanned interval");

    std::vector<double> zeros;
    for (int i = 0; i + 1 < n; ++i) {
        const bool zi = std::fabs(ys[i]) <= ztol;
        const bool zn = std::fabs(ys[i + 1]) <= ztol;
        if (zi && zn)
            throw DomainError("degenerate flux: f'' vanishes on a scanned sub-segment");
        if (zi) {
            if (zeros.empty() || xs[i] - zeros.back() > 1e-12 * len) zeros.push_back(xs[i]);
            continue;
        }
        if (zn) continue;  // recorded at the next iteration
        if (ys[i] * ys[i + 1] < 0.0) {
            double lo = xs[i], hi = xs[i + 1];
            double flo = ys[i];
            while (hi - lo > 1e-12 * len) {
                const double mid = 0.5 * (lo + hi);
                const double fm = flux.f2(mid);
                if (fm == 0.0) {
                    lo = hi = mid;
                    break;
                }
                if (flo * fm < 0.0) {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            zeros.push_back(0.5 * (lo + hi));
        }
    }
    if (n - 1 >= 0 && std::fabs(ys[n - 1]) <= ztol &&
        (zeros.empty() || xs[n - 1] - zeros.back() > 1e-12 * len))
        zeros.push_back(xs[n - 1]);
    std::sort(zeros.begin(), zeros.end());
    return zeros;
}

IntervalStats convexity_ratio_q(const FluxModel& flux, Interval I, Interval J, int n) {
    if (n < 512) n = 512;
    require_subinterval(flux, J, "convexity_ratio_q");
    if (!J.contains(I, 1e-12 * (1.0 + J.length())))
        throw DomainError("convexity_ratio_q: I must be contained in J");

    IntervalStats stats;
    stats.min_f2 = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        const double v = I.lo + I.length() * i / (n - 1);
        const double d2 = flux.f2(v);
        if (d2 <= 0.0) throw DomainError("convexity_ratio_q: interval crosses inflection");
        stats.min_f2 = std::min(stats.min_f2, d2);
    }
    stats.max_f2 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double v = J.lo + J.length() * i / (n - 1);
        stats.max_f2 = std::max(stats.max_f2, std::fabs(flux.f2(v)));
    }
    if (!(stats.max_f2 > 0.0)) throw DomainError("convexity_ratio_q: f'' vanishes on J");
    stats.q = std::min(1.0, stats.min_f2 / stats.max_f2);
    stats.zeros = inflection_zeros(flux, J, std::max(128, n / 2));
    return stats;
}

IntervalStats convexity_ratio_q(const FluxModel& flux, Interval I) {
    const double pad = 0.5 * I.length();
    Interval J = I.inflated(pad);
    J.lo = std::max(J.lo, flux.interval().lo);
    J.hi = std::min(J.hi, flux.interval().hi);
    return convexity_ratio_q(flux, I, J);
}

SeparationReport check_fprime_separation(const FluxModel& flux, int ell, double c, Interval I,
                                         int n) {
    if (ell < 2) throw DomainError("check_fprime_separation: ell must be >= 2");
    if (n < 2) throw DomainError("check_fprime_separation: grid size must be >= 2");
    require_subinterval(flux, I, "check_fprime_separation");

    const double len = I.length();
    std::vector<double> vs(n), f1s(n);
    for (int i = 0; i < n; ++i) {
        vs[i] = I.lo + len * i / (n - 1);
        f1s[i] = flux.f1(vs[i]);
    }

    struct Best {
        double margin = std::numeric_limits<double>::infinity();
        double v = 0.0, w = 0.0;
        long pairs = 0;
    };
    std::vector<Best> partial(static_cast<std::size_t>(worker_count()));
    for_stripes(n, [&](int wk, std::int64_t b, std::int64_t e) {
        Best best;
        for (std::int64_t i = b; i < e; ++i) {
            for (int j = static_cast<int>(i) + 1; j < n; ++j) {
                const double lhs = std::fabs(f1s[j] - f1s[i]);
                const double d = vs[j] - vs[i];
                const double rhs =
                    2.0 * c * (ell == 2 ? d : std::pow(d, static_cast<double>(ell - 1)));
                const double margin = lhs - rhs;
                ++best.pairs;
                if (margin < best.margin) {
                    best.margin = margin;
                    best.v = vs[i];
                    best.w = vs[j];
                }
            }
        }
        partial[static_cast<std::size_t>(wk)] = best;
    });

    SeparationReport out;
    out.worst_margin = std::numeric_limits<double>::infinity();
    for (const Best& b : partial) {
        out.pairs += b.pairs;
        if (b.margin < out.worst_margin) {
            out.worst_margin = b.margin;
            out.worst_v = b.v;
            out.worst_w = b.w;
        }
    }
    return out;
}

}  // namespace balance_lab
