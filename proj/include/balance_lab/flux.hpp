#ifndef BALANCE_LAB_FLUX_HPP
#define BALANCE_LAB_FLUX_HPP

#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "balance_lab/common.hpp"

namespace balance_lab {

/// A flux f with its first two derivatives, a working interval of solution
/// values, a declared nonlinearity order ell >= 2, and (optionally) the
/// nonlinearity constant once it has been computed.
///
/// Polynomial fluxes carry exact coefficient arrays for f' and f'' and
/// evaluate the Taylor remainder f(v+h) - f(v) - f'(v) h without
/// cancellation; caller-supplied fluxes fall back to direct evaluation.
class FluxModel {
public:
    static FluxModel polynomial(std::vector<double> coeffs, Interval interval, int order);
    static FluxModel callables(std::function<double(double)> f, std::function<double(double)> f1,
                               std::function<double(double)> f2, Interval interval, int order);
    /// burgers = u^2/2, cubic = u^3, quartic = u^4.
    static FluxModel builtin(std::string_view name, Interval interval);

    double f(double u) const;
    double f1(double u) const;
    double f2(double u) const;

    const Interval& interval() const { return interval_; }
    int order() const { return order_; }
    std::optional<double> c_ell() const { return c_ell_; }
    bool is_polynomial() const { return polynomial_; }
    int degree() const;
    std::span<const double> coefficients() const { return coeffs_; }

    /// f(v+h) - f(v) - f'(v) h; exact Taylor-shift evaluation for polynomials.
    double taylor_remainder(double v, double h) const;

    /// Taylor coefficients p^(k)(v)/k! for k >= 2, reusable across h values at
    /// a fixed v; empty for non-polynomial fluxes.
    std::vector<double> remainder_coefficients(double v) const;

    /// k-th derivative at v; exact for polynomials, k <= 2 otherwise.
    double derivative(int k, double v) const;

    /// Copy with c_ell recorded after re-checking the defining inequality
    /// |f(v+h)-f(v)-f'(v)h| >= (c - tol) |h|^ell on a verification grid.
    FluxModel with_c_ell(double c, double tol = 1e-9) const;

    /// Scan of max |f'| over an interval (n samples).
    double max_f1(Interval range, int n = 512) const;

private:
    FluxModel() = default;

    bool polynomial_ = false;
    std::vector<double> coeffs_, d1_, d2_;
    std::function<double(double)> fn_, fn1_, fn2_;
    Interval interval_{};
    int order_ = 2;
    std::optional<double> c_ell_;
};

/// Statistics of f'' over a pair of nested intervals I <= J, per the
/// convexity-ratio construction: q = min_I f'' / max_J |f''|.
struct IntervalStats {
    double min_f2 = 0.0;
    double max_f2 = 0.0;
    double q = 0.0;
    std::vector<double> zeros;
};

/// inf over an n x n grid of pairs (v, v+h) within I, h != 0, of
/// |f(v+h) - f(v) - f'(v) h| / |h|^ell. The v grid is uniform; the |h| grid
/// is logarithmic down to 1e-6 |I|, both signs.
struct NonlinearityScan {
    double c = 0.0;
    double worst_v = 0.0;
    double worst_h = 0.0;
    long pairs = 0;
};
NonlinearityScan nonlinearity_scan(const FluxModel& flux, int ell, Interval I, int n);
double nonlinearity_constant(const FluxModel& flux, int ell, Interval I, int n);

/// Same scan with v pinned: inf over the h grid only. Probes the pointwise
/// order constant at v.
double nonlinearity_constant_at(const FluxModel& flux, double v, int ell, Interval I, int n);

/// Smallest k >= 2 with nonzero k-th derivative at v, and c0 = |f^(k)(v)|/k!.
/// found == false when every derivative in [2, max_order] vanishes.
/// Non-polynomial fluxes use central differences above order 2 and set
/// approximate = true; they require max_order to be declared (> 2) or throw.
struct MinOrderResult {
    int k = 0;
    double c0 = 0.0;
    bool found = false;
    bool approximate = false;
};
MinOrderResult min_order_at_point(const FluxModel& flux, double v, int max_order);

/// All sign-change roots of f'' on an n-point scan of J, refined by bisection
/// to width <= 1e-12 |J|, ascending. Throws "degenerate flux" when f''
/// vanishes identically on a scanned sub-segment.
std::vector<double> inflection_zeros(const FluxModel& flux, Interval J, int n);

/// q = min_I f'' / max_J |f''| with f'' > 0 required on I (scanned).
IntervalStats convexity_ratio_q(const FluxModel& flux, Interval I, Interval J, int n = 512);
/// Default J: I inflated by half its length on each side, clipped to the
/// flux working interval.
IntervalStats convexity_ratio_q(const FluxModel& flux, Interval I);

/// Worst margin over n^2 scanned pairs of
///   |f'(v) - f'(w)| - 2 c |v - w|^(ell-1);
/// nonnegative (within tolerance) whenever the defining nonlinearity
/// inequality holds on I with constant c.
struct SeparationReport {
    double worst_margin = 0.0;
    double worst_v = 0.0;
    double worst_w = 0.0;
    long pairs = 0;
};
SeparationReport check_fprime_separation(const FluxModel& flux, int ell, double c, Interval I,
                                         int n);

}  // namespace balance_lab

#endif
