#ifndef BALANCE_LAB_SOLVER_HPP
#define BALANCE_LAB_SOLVER_HPP

#include <cstdint>
#include <string_view>

#include "balance_lab/field.hpp"

namespace balance_lab {

/// CFL-like default integration step: dx / (1 + max |f'|) over the field's
/// value range, so one step moves at most one cell sideways.
double default_trace_step(const SolutionField& field);

/// RK4 integration of gamma' = f'(u(t, gamma)) through (t0, x0) over
/// [span_lo, span_hi] (t0 inside), backward and forward; u is read from the
/// interpolated field. A curve leaving the rectangle is truncated and
/// flagged, not an error. dt <= 0 picks the default step.
Characteristic trace_characteristic(const SolutionField& field, double t0, double x0,
                                    double span_lo, double span_hi, double dt = 0.0);

struct SolveOptions {
    double dt = 0.0;  // internal step; 0 = CFL default
};

struct SolveOutcome {
    SolutionField field;
    bool clipped = false;  // true when characteristics left the requested rectangle
};

/// Method of characteristics for u_t + [f(u)]_x = g: integrates the coupled
/// feet system gamma' = f'(U), U' = g(t, gamma) from every x-grid node with
/// RK4 and resamples (gamma, U) onto the fixed x grid by monotone (piecewise
/// linear) interpolation. Throws CrossingError when the feet lose strict
/// monotonicity; shrinks the rectangle (clipped = true) when feet drift off
/// the requested x range.
SolveOutcome solve_characteristics(const FluxModel& flux, const std::vector<double>& u0,
                                   const SourceTerm& g, const GridSpec& grid,
                                   const SolveOptions& opt = {});

/// Max over a family of random tensor-product bumps psi = (1-s^2)^3 x (1-s^2)^3
/// of |integral of u psi_t + f(u) psi_x + g psi| / ||psi||_L1, by per-cell
/// Gauss-Legendre quadrature aligned with the field grid (and split at the
/// declared discontinuity lines of g).
double weak_residual(const SolutionField& field, int bump_count, std::uint64_t seed);

/// Exact reference fields sampled on the requested grid:
///   example33      u = sgn(x) sqrt|x|,  f(u) = u^2,   g = sgn x
///   linear_decay   u = x / (1+t),       f(u) = u^2/2, g = 0
///   uniform_source u = t,               f(u) = u^2/2, g = 1
///   constant       u = c,               f(u) = u^2/2, g = 0
SolutionField analytic_library(std::string_view name, const GridSpec& grid,
                               double constant_value = 0.0);

}  // namespace balance_lab

#endif
