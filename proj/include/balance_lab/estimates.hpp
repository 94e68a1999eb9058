#ifndef BALANCE_LAB_ESTIMATES_HPP
#define BALANCE_LAB_ESTIMATES_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "balance_lab/field.hpp"

namespace balance_lab {

/// Integral balances over the bands S+ (right of gamma) and S- (left of
/// gamma) of width h between times t1 < t2:
///   lhs_plus  = difference of the band integrals of u at t2 and t1,
///   rhs_plus  = double integral of g over S+,
/// and likewise on the minus side. For a flux convex on the band's value
/// range, lhs_plus <= rhs_plus + bound and lhs_minus >= rhs_minus - bound;
/// a concave flux reverses both (concave flag).
struct BalanceReport {
    double lhs_plus = 0.0, rhs_plus = 0.0;
    double lhs_minus = 0.0, rhs_minus = 0.0;
    double width = 0.0, t1 = 0.0, t2 = 0.0;
    double quad_error_bound = 0.0;
    bool concave = false;

    bool holds() const {
        if (concave)
            return lhs_plus >= rhs_plus - quad_error_bound &&
                   lhs_minus <= rhs_minus + quad_error_bound;
        return lhs_plus <= rhs_plus + quad_error_bound &&
               lhs_minus >= rhs_minus - quad_error_bound;
    }
};

BalanceReport dafermos_balance(const SolutionField& field, const Characteristic& gamma,
                               double width, double t1, double t2);

/// Largest difference quotient |u_j - u_i| / (t_j - t_i) along the curve.
/// Bounded by ||g||_inf plus scheme error for true characteristics.
double lipschitz_along(const SolutionField& field, const Characteristic& gamma);

/// Spatial 1/ell-Holder diagnostics at a fixed time over an x-window:
///   empirical    sup over scanned grid pairs of |u(x)-u(y)| / |x-y|^(1/ell)
///   theoretical  (4G / (q c_ell))^(1/ell) from scanned flux statistics,
///                when the window's value range avoids inflection zeros
///   exponent_fit slope of log sup-oscillation vs log h over dyadic scales
struct HolderReport {
    double empirical = 0.0;
    double theoretical = 0.0;
    double exponent_fit = 0.0;
    double fit_r2 = 0.0;
    long pairs_scanned = 0;
    int stride = 1;
    int scales_used = 0;
    bool theoretical_applicable = false;
    bool degenerate_source = false;  // g == 0: theoretical pinned to 0
    bool fit_reliable = false;       // fewer than 8 dyadic scales otherwise
};

HolderReport holder_seminorm(const SolutionField& field, double t, int ell, double window_lo,
                             double window_hi);

/// Finite-scale pointwise oscillation
///   A_delta = max over grid y, 0 < |y-x| <= delta, of
///             |u(t,y) - u(t,x)| / |y-x|^(1/ell).
double oscillation_a(const SolutionField& field, double t, double x, int ell, double delta);

struct SurveyRow {
    double delta = 0.0;
    double fraction = 0.0;
};

/// Fraction of seeded sample points with A_delta > threshold, per delta.
/// The same samples are reused for every delta, so the fractions are
/// nonincreasing as delta decreases.
std::vector<SurveyRow> oscillation_survey(const SolutionField& field, int sample_count,
                                          std::span<const double> deltas, double threshold,
                                          int ell, std::uint64_t seed);

}  // namespace balance_lab

#endif
