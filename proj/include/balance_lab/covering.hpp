#ifndef BALANCE_LAB_COVERING_HPP
#define BALANCE_LAB_COVERING_HPP

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "balance_lab/field.hpp"

namespace balance_lab {

/// A scalar function of (t, x) to be averaged, with the x-lines where it
/// jumps (or kinks) so quadrature can split panels there, and an optional
/// domain rectangle to validate region containment against.
struct Scalar2D {
    std::function<double(double, double)> fn;
    std::vector<double> x_breaks;
    std::optional<Rect> domain;

    static Scalar2D of_field_u(const SolutionField& field);
    static Scalar2D of_field_g(const SolutionField& field);
};

/// One tilted set of the covering family: height 2 eps in time around sigma,
/// width 2 rho eps^ell around the traced characteristic. Its area is exactly
/// 4 rho eps^(ell+1).
struct CoveringRegion {
    Characteristic center;
    double sigma = 0.0;
    double eps = 0.0;
    double rho = 0.0;
    int ell = 2;

    double half_width() const;
    double area() const;               // closed form 4 rho eps^(ell+1)
    Interval t_span() const { return {sigma - eps, sigma + eps}; }
};

/// Region centered on the characteristic through (sigma, x0); throws when the
/// trace cannot cover the full time span inside the rectangle.
CoveringRegion make_region(const SolutionField& field, double sigma, double x0, double eps,
                           double rho);

/// Slice-quadrature area of the region; validates the integrator against the
/// closed form.
double region_area_quadrature(const CoveringRegion& region);

struct RegionAverage {
    double mean = 0.0;
    double mean_abs_dev = 0.0;  // mean of |q - reference|
};

RegionAverage average_over(const Scalar2D& q, const CoveringRegion& region, double reference);

struct LebesgueCell {
    double rho = 0.0;
    double eps = 0.0;
    double dev = 0.0;
    bool present = false;
};

struct LebesgueTable {
    std::vector<double> rho_list, eps_list;  // eps in the given order
    std::vector<LebesgueCell> cells;         // row-major by rho then eps

    const LebesgueCell& cell(std::size_t ir, std::size_t ie) const {
        return cells[ir * eps_list.size() + ie];
    }
    /// Smallest-eps present cell of each rho-column is below tol.
    bool passes(double tol) const;
};

/// Convergence table of mean |q - q(t,x)| over regions centered at (t, x),
/// for every (rho, eps) pair; cells whose region cannot be built are absent.
LebesgueTable lebesgue_point_test(const SolutionField& field, const Scalar2D& q, double t,
                                  double x, std::span<const double> rho_list,
                                  std::span<const double> eps_list);

}  // namespace balance_lab

#endif
