#ifndef BALANCE_LAB_COMMON_HPP
#define BALANCE_LAB_COMMON_HPP

#include <cmath>
#include <stdexcept>
#include <string>

namespace balance_lab {

/// Base error type for all library failures.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad scenario file, bad key, bad CLI usage.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Geometry or precondition violation (point outside rectangle, degenerate
/// interval, region not constructible, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Traced characteristic feet lost strict monotonicity in x.
class CrossingError : public Error {
public:
    explicit CrossingError(double t)
        : Error("characteristic crossing detected at t = " + std::to_string(t)), time(t) {}
    double time;
};

/// Closed interval [lo, hi].
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double length() const { return hi - lo; }
    double mid() const { return 0.5 * (lo + hi); }
    bool valid() const { return std::isfinite(lo) && std::isfinite(hi) && lo < hi; }
    bool contains(double v, double slack = 0.0) const { return v >= lo - slack && v <= hi + slack; }
    bool contains(const Interval& other, double slack = 0.0) const {
        return other.lo >= lo - slack && other.hi <= hi + slack;
    }
    Interval inflated(double pad) const { return {lo - pad, hi + pad}; }
};

/// Axis-aligned rectangle [t0,t1] x [x0,x1] in the (t, x) plane.
struct Rect {
    Interval t;
    Interval x;
    bool contains(double tv, double xv, double slack = 0.0) const {
        return t.contains(tv, slack) && x.contains(xv, slack);
    }
};

inline double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

/// |x|^(1/ell) with a fast path for the common quadratic case.
inline double root_ell(double x, int ell) {
    x = std::fabs(x);
    if (ell == 2) return std::sqrt(x);
    if (ell == 1) return x;
    return std::pow(x, 1.0 / static_cast<double>(ell));
}

}  // namespace balance_lab

#endif
