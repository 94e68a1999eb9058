#ifndef BALANCE_LAB_QUADRATURE_HPP
#define BALANCE_LAB_QUADRATURE_HPP

#include <functional>
#include <span>
#include <vector>

namespace balance_lab {

using Fn1 = std::function<double(double)>;

/// Composite Simpson on [a, b] with m subintervals (m is rounded up to even).
double simpson(const Fn1& f, double a, double b, int m);

/// Composite Simpson on [a, b], splitting at the interior break points so
/// that discontinuity lines of the integrand never fall inside a panel.
double simpson_split(const Fn1& f, double a, double b, std::span<const double> breaks,
                     int m_per_piece);

/// Gauss-Legendre nodes/weights on [-1, 1] for n in {2, 3, 4, 5}.
std::span<const double> gauss_nodes(int n);
std::span<const double> gauss_weights(int n);

/// Conservative composite-rule error estimate for equally spaced samples y
/// spanning a width W: (W / 12) * max |second difference of y|, the standard
/// trapezoid bound with f'' replaced by scanned second differences.
double second_difference_bound(std::span<const double> y, double width);

}  // namespace balance_lab

#endif
