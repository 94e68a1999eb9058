#include "balance_lab/field.hpp"

#include <algorithm>
#include <cmath>

#include "balance_lab/csv.hpp"

namespace balance_lab {

namespace {

void require_uniform(const std::vector<double>& grid, const char* name) {
    if (grid.size() < 2) throw DomainError(std::string(name) + " grid needs at least 2 nodes");
    const double h = grid[1] - grid[0];
    if (!(h > 0.0)) throw DomainError(std::string(name) + " grid must be strictly increasing");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double step = grid[i] - grid[i - 1];
        if (std::fabs(step - h) > 1e-9 * std::max(1.0, std::fabs(h)))
            throw DomainError(std::string(name) + " grid must be uniformly spaced");
    }
}

// Cell index and local coordinate for a uniform grid, clamped to the range.
inline std::pair<int, double> locate(const std::vector<double>& grid, double h, double v) {
    const int cells = static_cast<int>(grid.size()) - 1;
    int i = static_cast<int>(std::floor((v - grid.front()) / h));
    i = std::clamp(i, 0, cells - 1);
    double r = (v - grid[static_cast<std::size_t>(i)]) / h;
    r = std::clamp(r, 0.0, 1.0);
    return {i, r};
}

}  // namespace

SourceTerm SourceTerm::zero() {
    return function([](double, double) { return 0.0; }, 0.0);
}

SourceTerm SourceTerm::on_grid(std::vector<double> values, std::vector<double> x_breaks) {
    SourceTerm s;
    s.values_ = std::move(values);
    for (double v : s.values_) {
        if (!std::isfinite(v)) throw DomainError("source grid contains a non-finite value");
        s.bound_ = std::max(s.bound_, std::fabs(v));
    }
    s.breaks_ = std::move(x_breaks);
    std::sort(s.breaks_.begin(), s.breaks_.end());
    return s;
}

SourceTerm SourceTerm::function(std::function<double(double, double)> fn, double sup_bound,
                                std::vector<double> x_breaks) {
    if (!fn) throw DomainError("source callable is empty");
    if (!(sup_bound >= 0.0)) throw DomainError("source bound must be >= 0");
    SourceTerm s;
    s.fn_ = std::move(fn);
    s.bound_ = sup_bound;
    s.breaks_ = std::move(x_breaks);
    std::sort(s.breaks_.begin(), s.breaks_.end());
    return s;
}

SolutionField::SolutionField(std::vector<double> t_grid, std::vector<double> x_grid,
                             std::vector<double> u, SourceTerm g, FluxModel flux)
    : t_grid_(std::move(t_grid)),
      x_grid_(std::move(x_grid)),
      u_(std::move(u)),
      g_(std::move(g)),
      flux_(std::move(flux)) {
    require_uniform(t_grid_, "t");
    require_uniform(x_grid_, "x");
    if (u_.size() != t_grid_.size() * x_grid_.size())
        throw DomainError("u values do not match the grid shape");
    if (g_.is_grid() && g_.grid_values().size() != u_.size())
        throw DomainError("g values do not match the grid shape");
    u_min_ = u_[0];
    u_max_ = u_[0];
    for (double v : u_) {
        if (!std::isfinite(v)) throw DomainError("u contains a non-finite value");
        u_min_ = std::min(u_min_, v);
        u_max_ = std::max(u_max_, v);
    }
    dt_ = t_grid_[1] - t_grid_[0];
    dx_ = x_grid_[1] - x_grid_[0];
    rect_ = {{t_grid_.front(), t_grid_.back()}, {x_grid_.front(), x_grid_.back()}};
    g_inf_ = g_.declared_bound();
}

double SolutionField::g_node(int it, int ix) const {
    if (g_.is_grid()) return g_.grid_values()[static_cast<std::size_t>(it) * nx() + ix];
    return g_.eval(t_grid_[static_cast<std::size_t>(it)], x_grid_[static_cast<std::size_t>(ix)]);
}

double SolutionField::u(double t, double x) const {
    const auto [it, rt] = locate(t_grid_, dt_, t);
    const auto [ix, rx] = locate(x_grid_, dx_, x);
    const std::size_t base = static_cast<std::size_t>(it) * nx() + ix;
    const double u00 = u_[base], u01 = u_[base + 1];
    const double u10 = u_[base + nx()], u11 = u_[base + nx() + 1];
    return (1.0 - rt) * ((1.0 - rx) * u00 + rx * u01) + rt * ((1.0 - rx) * u10 + rx * u11);
}

double SolutionField::g(double t, double x) const {
    if (!g_.is_grid()) return g_.eval(t, x);
    const auto [it, rt] = locate(t_grid_, dt_, t);
    const auto [ix, rx] = locate(x_grid_, dx_, x);
    auto gv = [&](int a, int b) {
        return g_.grid_values()[static_cast<std::size_t>(a) * nx() + b];
    };
    return (1.0 - rt) * ((1.0 - rx) * gv(it, ix) + rx * gv(it, ix + 1)) +
           rt * ((1.0 - rx) * gv(it + 1, ix) + rx * gv(it + 1, ix + 1));
}

std::vector<double> SolutionField::u_row(double t) const {
    const auto [it, rt] = locate(t_grid_, dt_, t);
    std::vector<double> row(static_cast<std::size_t>(nx()));
    const std::size_t base = static_cast<std::size_t>(it) * nx();
    for (int j = 0; j < nx(); ++j)
        row[static_cast<std::size_t>(j)] =
            (1.0 - rt) * u_[base + j] + rt * u_[base + nx() + j];
    return row;
}

std::pair<int, int> SolutionField::column_range(double lo, double hi) const {
    const double slack = 1e-12 * std::max(1.0, rect_.x.length());
    int jlo = static_cast<int>(std::ceil((lo - x_grid_.front() - slack) / dx_));
    int jhi = static_cast<int>(std::floor((hi - x_grid_.front() + slack) / dx_));
    jlo = std::clamp(jlo, 0, nx() - 1);
    jhi = std::clamp(jhi, 0, nx() - 1);
    if (jhi < jlo) throw DomainError("window contains no grid columns");
    return {jlo, jhi};
}

int SolutionField::nearest_time_index(double t) const {
    int i = static_cast<int>(std::lround((t - t_grid_.front()) / dt_));
    return std::clamp(i, 0, nt() - 1);
}

void SolutionField::export_csv(const std::filesystem::path& path) const {
    CsvWriter out(path, {"t", "x", "u", "g"});
    for (int it = 0; it < nt(); ++it)
        for (int ix = 0; ix < nx(); ++ix)
            out.row({format_double(t_grid_[static_cast<std::size_t>(it)]),
                     format_double(x_grid_[static_cast<std::size_t>(ix)]),
                     format_double(u_node(it, ix)), format_double(g_node(it, ix))});
}

SolutionField SolutionField::import_csv(const std::filesystem::path& path, FluxModel flux,
                                        std::vector<double> g_breaks) {
    const CsvTable table = read_csv(path);
    if (table.header != std::vector<std::string>{"t", "x", "u", "g"})
        throw ConfigError("field csv must have header t,x,u,g");

    std::vector<double> ts, xs, us, gs;
    for (const auto& r : table.rows) {
        ts.push_back(std::stod(r[0]));
        xs.push_back(std::stod(r[1]));
        us.push_back(std::stod(r[2]));
        gs.push_back(std::stod(r[3]));
    }
    if (ts.empty()) throw ConfigError("field csv has no rows");

    // Row-major by t then x: x cycles fastest.
    std::size_t nx = 1;
    while (nx < xs.size() && xs[nx] > xs[nx - 1]) ++nx;
    if (nx < 2 || ts.size() % nx != 0)
        throw ConfigError("field csv rows are not row-major by t then x");
    const std::size_t nt = ts.size() / nx;
    if (nt < 2) throw ConfigError("field csv needs at least two time rows");

    std::vector<double> t_grid(nt), x_grid(xs.begin(), xs.begin() + static_cast<long>(nx));
    for (std::size_t i = 0; i < nt; ++i) t_grid[i] = ts[i * nx];
    SourceTerm g = SourceTerm::on_grid(std::move(gs), std::move(g_breaks));
    return SolutionField(std::move(t_grid), std::move(x_grid), std::move(us), std::move(g),
                         std::move(flux));
}

double Characteristic::position(double t) const {
    if (times.empty()) throw DomainError("empty characteristic");
    if (t <= times.front()) return positions.front();
    if (t >= times.back()) return positions.back();
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - times.begin()) - 1;
    const double r = (t - times[i]) / (times[i + 1] - times[i]);
    return (1.0 - r) * positions[i] + r * positions[i + 1];
}

}  // namespace balance_lab
