#include "balance_lab/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "balance_lab/common.hpp"

namespace balance_lab {

double simpson(const Fn1& f, double a, double b, int m) {
    if (!(b > a)) return 0.0;
    if (m < 2) m = 2;
    if (m % 2) ++m;
    const double h = (b - a) / m;
    double odd = 0.0, even = 0.0;
    for (int i = 1; i < m; i += 2) odd += f(a + i * h);
    for (int i = 2; i < m; i += 2) even += f(a + i * h);
    return h / 3.0 * (f(a) + f(b) + 4.0 * odd + 2.0 * even);
}

double simpson_split(const Fn1& f, double a, double b, std::span<const double> breaks,
                     int m_per_piece) {
    if (!(b > a)) return 0.0;
    std::vector<double> cuts;
    cuts.push_back(a);
    for (double c : breaks)
        if (c > a && c < b) cuts.push_back(c);
    cuts.push_back(b);
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double lo = cuts[i], hi = cuts[i + 1];
        if (hi - lo <= 0.0) continue;
        // endpoint samples stay strictly inside the piece so a jump sitting on
        // the cut contributes its one-sided values
        const double nudge = 1e-13 * (hi - lo);
        auto inside = [&](double x) { return f(std::clamp(x, lo + nudge, hi - nudge)); };
        total += simpson(inside, lo, hi, m_per_piece);
    }
    return total;
}

namespace {

constexpr std::array<double, 2> kNodes2 = {-0.5773502691896257645, 0.5773502691896257645};
constexpr std::array<double, 2> kWeights2 = {1.0, 1.0};

constexpr std::array<double, 3> kNodes3 = {-0.7745966692414833770, 0.0, 0.7745966692414833770};
constexpr std::array<double, 3> kWeights3 = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};

constexpr std::array<double, 4> kNodes4 = {-0.8611363115940525752, -0.3399810435848562648,
                                           0.3399810435848562648, 0.8611363115940525752};
constexpr std::array<double, 4> kWeights4 = {0.3478548451374538574, 0.6521451548625461426,
                                             0.6521451548625461426, 0.3478548451374538574};

constexpr std::array<double, 5> kNodes5 = {-0.9061798459386639928, -0.5384693101056830910, 0.0,
                                           0.5384693101056830910, 0.9061798459386639928};
constexpr std::array<double, 5> kWeights5 = {0.2369268850561890875, 0.4786286704993664680,
                                             0.5688888888888888889, 0.4786286704993664680,
                                             0.2369268850561890875};

}  // namespace

std::span<const double> gauss_nodes(int n) {
    switch (n) {
        case 2: return kNodes2;
        case 3: return kNodes3;
        case 4: return kNodes4;
        case 5: return kNodes5;
        default: throw DomainError("gauss_nodes: order must be in [2, 5]");
    }
}

std::span<const double> gauss_weights(int n) {
    switch (n) {
        case 2: return kWeights2;
        case 3: return kWeights3;
        case 4: return kWeights4;
        case 5: return kWeights5;
        default: throw DomainError("gauss_weights: order must be in [2, 5]");
    }
}

double second_difference_bound(std::span<const double> y, double width) {
    if (y.size() < 3) return 0.0;
    double worst = 0.0;
    for (std::size_t i = 1; i + 1 < y.size(); ++i)
        worst = std::max(worst, std::fabs(y[i + 1] - 2.0 * y[i] + y[i - 1]));
    return width * worst / 12.0;
}

}  // namespace balance_lab
