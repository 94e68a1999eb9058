#ifndef BALANCE_LAB_FIELD_HPP
#define BALANCE_LAB_FIELD_HPP

#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "balance_lab/common.hpp"
#include "balance_lab/flux.hpp"

namespace balance_lab {

/// Source term g(t, x): either node values on the field grid or a callable
/// with a declared sup bound and a list of x-lines where it jumps (quadrature
/// splits panels at those lines instead of smearing them).
class SourceTerm {
public:
    static SourceTerm zero();
    static SourceTerm on_grid(std::vector<double> values, std::vector<double> x_breaks = {});
    static SourceTerm function(std::function<double(double, double)> fn, double sup_bound,
                               std::vector<double> x_breaks = {});

    bool is_grid() const { return !fn_; }
    std::span<const double> grid_values() const { return values_; }
    const std::vector<double>& x_breaks() const { return breaks_; }
    double declared_bound() const { return bound_; }
    double eval(double t, double x) const { return fn_(t, x); }
    bool has_fn() const { return static_cast<bool>(fn_); }

private:
    std::vector<double> values_;
    std::function<double(double, double)> fn_;
    double bound_ = 0.0;
    std::vector<double> breaks_;
};

struct GridSpec {
    int nt = 2;
    int nx = 2;
    Interval t_span;
    Interval x_span;
};

/// A sampled continuous solution u(t, x) on a rectangle, with its source and
/// flux. Values between nodes come from bilinear interpolation. Immutable
/// after construction and safe to share across threads.
class SolutionField {
public:
    SolutionField(std::vector<double> t_grid, std::vector<double> x_grid, std::vector<double> u,
                  SourceTerm g, FluxModel flux);

    int nt() const { return static_cast<int>(t_grid_.size()); }
    int nx() const { return static_cast<int>(x_grid_.size()); }
    double dt() const { return dt_; }
    double dx() const { return dx_; }
    const std::vector<double>& t_grid() const { return t_grid_; }
    const std::vector<double>& x_grid() const { return x_grid_; }
    const std::vector<double>& u_values() const { return u_; }
    const Rect& rect() const { return rect_; }
    const FluxModel& flux() const { return flux_; }
    const SourceTerm& source() const { return g_; }

    double u_node(int it, int ix) const { return u_[static_cast<std::size_t>(it) * nx() + ix]; }
    double g_node(int it, int ix) const;

    /// Bilinear interpolation; (t, x) is clamped into the rectangle.
    double u(double t, double x) const;
    double g(double t, double x) const;
    double g_inf() const { return g_inf_; }
    std::span<const double> source_breaks() const { return g_.x_breaks(); }

    /// u(t, x_j) for every grid column at a fixed (possibly off-node) time.
    std::vector<double> u_row(double t) const;

    /// Index range [jlo, jhi] of grid columns inside [lo, hi].
    std::pair<int, int> column_range(double lo, double hi) const;

    int nearest_time_index(double t) const;
    double u_range_min() const { return u_min_; }
    double u_range_max() const { return u_max_; }

    void export_csv(const std::filesystem::path& path) const;
    /// Reads the `t,x,u,g` layout written by export_csv.
    static SolutionField import_csv(const std::filesystem::path& path, FluxModel flux,
                                    std::vector<double> g_breaks = {});

private:
    std::vector<double> t_grid_, x_grid_, u_;
    SourceTerm g_;
    FluxModel flux_;
    Rect rect_{};
    double dt_ = 0.0, dx_ = 0.0;
    double g_inf_ = 0.0;
    double u_min_ = 0.0, u_max_ = 0.0;
};

/// A time-sampled curve gamma with the solution values along it.
struct Characteristic {
    std::vector<double> times;      // strictly increasing
    std::vector<double> positions;  // gamma(t_i)
    std::vector<double> values;     // u(t_i, gamma(t_i))
    double step = 0.0;              // nominal integration step
    bool exited = false;            // true when the curve left the rectangle

    double t_min() const { return times.front(); }
    double t_max() const { return times.back(); }
    /// Linear interpolation of gamma between samples.
    double position(double t) const;
    std::size_t size() const { return times.size(); }
};

}  // namespace balance_lab

#endif
