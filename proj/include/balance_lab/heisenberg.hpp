#ifndef BALANCE_LAB_HEISENBERG_HPP
#define BALANCE_LAB_HEISENBERG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "balance_lab/field.hpp"

namespace balance_lab {

/// Point of the first Heisenberg group, P = [x + iy, t] = (x, y, t).
struct HPoint {
    double x = 0.0, y = 0.0, t = 0.0;
};

/// Group product [z,t]*[z',t'] = [z + z', t + t' - Im(z conj(z'))/2], i.e.
/// the twist is +(x y' - y x')/2. This is the convention under which the
/// left-invariant frame is X = d_x - (y/2) d_t, Y = d_y + (x/2) d_t with
/// [X, Y] = T; the sign lives only here.
HPoint group_mul(const HPoint& p, const HPoint& q);
HPoint group_inverse(const HPoint& p);
HPoint dilate(double r, const HPoint& p);

/// max(|z|, |t|^(1/2)); homogeneous of degree 1 under dilations.
double norm_inf(const HPoint& p);
/// Left-invariant distance ||P^{-1} Q||_inf.
double dist_inf(const HPoint& p, const HPoint& q);

/// Point of the vertical plane W = {x = 0}, written A = (y, t).
struct WPoint {
    double y = 0.0, t = 0.0;
};

/// Intrinsic graph phi over a (y, t) rectangle with its source g. Internally
/// the surface is the balance-law field under the coordinate swap (evolution
/// variable y, state variable t, flux u^2/2), so every PDE-side operation is
/// shared with the solver verbatim.
class GraphSurface {
public:
    GraphSurface(std::vector<double> y_grid, std::vector<double> t_grid,
                 std::vector<double> phi, SourceTerm g);

    double phi(double y, double t) const { return swapped_.u(y, t); }
    double g(double y, double t) const { return swapped_.g(y, t); }
    double g_inf() const { return swapped_.g_inf(); }
    const std::vector<double>& y_grid() const { return swapped_.t_grid(); }
    const std::vector<double>& t_grid() const { return swapped_.x_grid(); }
    /// Rectangle with .t = y-range and .x = t-range (swapped layout).
    const Rect& rect() const { return swapped_.rect(); }
    double max_abs_phi() const;

    /// Copy carrying a declared intrinsic Lipschitz constant, re-checked
    /// against |phi(A) - phi(B)| <= L d_phi(A, B) on a seeded pair sample.
    GraphSurface with_lip_constant(double L, int pairs = 2000, std::uint64_t seed = 1) const;
    std::optional<double> lip_constant() const { return lip_const_; }

    const SolutionField& as_field() const { return swapped_; }

    void export_csv(const std::filesystem::path& path) const;
    static GraphSurface import_csv(const std::filesystem::path& path,
                                   std::vector<double> g_breaks = {});

private:
    SolutionField swapped_;
    std::optional<double> lip_const_;
};

/// Graph quasidistance
///   d_phi(A, B) = |y - y'| + |t' - t - (phi(A)+phi(B))(y'-y)/2|^(1/2).
double d_phi(const GraphSurface& surface, const WPoint& a, const WPoint& b);
/// Same formula from already-known phi values.
double d_phi_values(const WPoint& a, double phi_a, const WPoint& b, double phi_b);

/// sup over seeded sample pairs of |phi(A) - phi(B)| / d_phi(A, B), pairs
/// with d_phi below min_sep * diam(omega) are skipped.
double intrinsic_lip_constant(const GraphSurface& surface, int pair_count, double min_sep,
                              std::uint64_t seed);

/// Weak residual of phi_y + [phi^2/2]_t = g, delegated to the balance-law
/// weak residual of the swapped field (identical code path).
double graph_balance_residual(const GraphSurface& surface, int bump_count, std::uint64_t seed);

/// Empirical quasi-triangle constant max d(A,C) / (d(A,B) + d(B,C)) over
/// seeded triples; reported, never asserted.
double quasi_triangle_constant(const GraphSurface& surface, int triple_count, std::uint64_t seed);

struct RademacherRow {
    double s = 0.0;
    double r = 0.0;
    bool present = false;  // false when no grid point satisfies 0 < d_phi <= s
};

/// Intrinsic differentiability residual at a0: for each scale s,
///   R(s) = max over grid A with 0 < d_phi(a0, A) <= s of
///          |phi(A) - phi(a0) - w_hat (y - y0)| / d_phi(a0, A),
/// with w_hat = g(a0) unless overridden (declared Lebesgue value).
std::vector<RademacherRow> rademacher_residual(const GraphSurface& surface, const WPoint& a0,
                                               std::span<const double> scales,
                                               std::optional<double> w_hat = std::nullopt);

/// Worst-case errors of the algebraic identities over seeded samples with
/// coordinates in [-2, 2]: associativity, identity, inverse, the dilation
/// homomorphism, and left-invariance / homogeneity of d_inf. All are exact
/// identities, so the errors are pure rounding (<= 1e-12 at this scale).
/// triangle_violation reports max(d(P,R) - d(P,Q) - d(Q,R), 0).
struct HeisenbergAudit {
    double associativity_err = 0.0;
    double identity_err = 0.0;
    double inverse_err = 0.0;
    double dilation_err = 0.0;
    double dinf_left_err = 0.0;
    double dinf_homog_err = 0.0;
    double triangle_violation = 0.0;
};
HeisenbergAudit heisenberg_audit(int cases, std::uint64_t seed);

/// Builtin surfaces:
///   sqrt2t  phi = sgn(t) sqrt(2|t|), g = sgn t
///   linear  phi = w y,               g = w
///   zero    phi = 0,                 g = 0
/// The grid spec is read as t_span = y-range, x_span = t-range.
GraphSurface analytic_surface(std::string_view name, const GridSpec& grid, double w = 1.0);

/// Coordinate swap in both directions (bitwise inverse of each other).
SolutionField field_from_surface(const GraphSurface& surface);
GraphSurface surface_from_field(const SolutionField& field);

}  // namespace balance_lab

#endif
