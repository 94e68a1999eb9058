#include <doctest.h>

#include <cmath>

#include "balance_lab/estimates.hpp"
#include "balance_lab/rng.hpp"
#include "balance_lab/solver.hpp"

using namespace balance_lab;

namespace {

GridSpec grid(int nt, int nx, Interval t, Interval x) { return {nt, nx, t, x}; }

}  // namespace

TEST_CASE("dafermos balance: constant field is identically zero") {
    const SolutionField field =
        analytic_library("constant", grid(21, 201, {0.0, 1.0}, {-2.0, 2.0}), 0.4);
    const Characteristic gamma = trace_characteristic(field, 0.0, 0.0, 0.0, 1.0);
    const BalanceReport rep = dafermos_balance(field, gamma, 0.25, 0.1, 0.9);
    CHECK(std::fabs(rep.lhs_plus) <= 1e-12);
    CHECK(std::fabs(rep.rhs_plus) <= 1e-12);
    CHECK(std::fabs(rep.lhs_minus) <= 1e-12);
    CHECK(std::fabs(rep.rhs_minus) <= 1e-12);
    CHECK(rep.holds());
}

TEST_CASE("dafermos balance: uniform source is the closed-form equality case") {
    const SolutionField field =
        analytic_library("uniform_source", grid(26, 401, {0.0, 0.5}, {-1.0, 1.0}));
    const Characteristic gamma = trace_characteristic(field, 0.0, 0.0, 0.0, 0.5);
    const BalanceReport rep = dafermos_balance(field, gamma, 0.1, 0.0, 0.5);
    // both sides equal h (t2 - t1) = 0.05
    CHECK(rep.lhs_plus == doctest::Approx(0.05).epsilon(1e-10));
    CHECK(std::fabs(rep.lhs_plus - rep.rhs_plus) <= 1e-8);
    CHECK(std::fabs(rep.lhs_minus - rep.rhs_minus) <= 1e-8);
    CHECK(rep.holds());
    CHECK_FALSE(rep.concave);
}

TEST_CASE("dafermos balance: example33 inequality with nonnegative margin") {
    const SolutionField field =
        analytic_library("example33", grid(26, 4001, {0.0, 0.25}, {-1.0, 1.3}));
    const Characteristic gamma = trace_characteristic(field, 0.0, 0.5, 0.0, 0.25);
    const BalanceReport rep = dafermos_balance(field, gamma, 0.05, 0.0, 0.2);
    CHECK(rep.holds());
    CHECK(rep.lhs_plus <= rep.rhs_plus + rep.quad_error_bound);
    // two-resolution consistency: the same quantities on a finer trace agree
    const Characteristic fine = trace_characteristic(field, 0.0, 0.5, 0.0, 0.25,
                                                     gamma.step / 4.0);
    const BalanceReport rep2 = dafermos_balance(field, fine, 0.05, 0.0, 0.2);
    CHECK(std::fabs(rep2.lhs_plus - rep.lhs_plus) <=
          rep.quad_error_bound + rep2.quad_error_bound);
}

TEST_CASE("dafermos balance: concave flux flips the inequalities") {
    // u = t solves u_t + [-u^2/2]_x = 1 as well: the x-derivative vanishes
    const GridSpec gs = grid(26, 401, {0.0, 0.5}, {-1.0, 1.0});
    const FluxModel flux = FluxModel::polynomial({0.0, 0.0, -0.5}, {-2.0, 2.0}, 2);
    std::vector<double> u(static_cast<std::size_t>(gs.nt) * gs.nx);
    std::vector<double> tg(static_cast<std::size_t>(gs.nt)), xg(static_cast<std::size_t>(gs.nx));
    for (int i = 0; i < gs.nt; ++i) tg[static_cast<std::size_t>(i)] = 0.5 * i / (gs.nt - 1);
    for (int j = 0; j < gs.nx; ++j)
        xg[static_cast<std::size_t>(j)] = -1.0 + 2.0 * j / (gs.nx - 1);
    for (int i = 0; i < gs.nt; ++i)
        for (int j = 0; j < gs.nx; ++j)
            u[static_cast<std::size_t>(i) * gs.nx + j] = tg[static_cast<std::size_t>(i)];
    const SolutionField field(tg, xg, u,
                              SourceTerm::function([](double, double) { return 1.0; }, 1.0),
                              flux);
    const Characteristic gamma = trace_characteristic(field, 0.0, 0.2, 0.0, 0.5);
    const BalanceReport rep = dafermos_balance(field, gamma, 0.1, 0.0, 0.4);
    CHECK(rep.concave);
    CHECK(rep.holds());
    CHECK(std::fabs(rep.lhs_plus - rep.rhs_plus) <= 1e-8);
}

TEST_CASE("dafermos balance error paths") {
    const SolutionField field =
        analytic_library("constant", grid(11, 101, {0.0, 1.0}, {-1.0, 1.0}), 0.0);
    const Characteristic gamma = trace_characteristic(field, 0.0, 0.0, 0.0, 1.0);
    CHECK_THROWS_AS(dafermos_balance(field, gamma, 3.0, 0.1, 0.9), DomainError);   // band exits
    CHECK_THROWS_AS(dafermos_balance(field, gamma, 0.1, 0.9, 0.1), DomainError);   // t1 >= t2
    CHECK_THROWS_AS(dafermos_balance(field, gamma, -0.1, 0.1, 0.9), DomainError);  // width
    // mixed-sign f'' over the band's value range
    std::vector<double> tg(11), xg(101), u(11 * 101);
    for (int i = 0; i < 11; ++i) tg[static_cast<std::size_t>(i)] = i / 10.0;
    for (int j = 0; j < 101; ++j) xg[static_cast<std::size_t>(j)] = -1.0 + j / 50.0;
    for (int i = 0; i < 11; ++i)
        for (int j = 0; j < 101; ++j)
            u[static_cast<std::size_t>(i) * 101 + j] = xg[static_cast<std::size_t>(j)];
    const SolutionField skew(tg, xg, u, SourceTerm::zero(),
                             FluxModel::builtin("cubic", {-2.0, 2.0}));
    const Characteristic vertical = trace_characteristic(skew, 0.0, 0.0, 0.0, 1.0, 0.05);
    CHECK_THROWS_WITH_AS(dafermos_balance(skew, vertical, 0.3, 0.1, 0.9),
                         "flux not convex on solution range", DomainError);
}

TEST_CASE("balance divided by width approaches the endpoint difference of u") {
    const SolutionField field =
        analytic_library("linear_decay", grid(51, 1001, {0.0, 0.5}, {-1.0, 1.0}));
    const Characteristic gamma = trace_characteristic(field, 0.0, 0.2, 0.0, 0.5);
    const double exact = field.u(0.4, gamma.position(0.4)) - field.u(0.1, gamma.position(0.1));
    double previous = 1e300;
    for (double h : {0.2, 0.1, 0.05, 0.025}) {
        const BalanceReport rep = dafermos_balance(field, gamma, h, 0.1, 0.4);
        const double dev = std::fabs(rep.lhs_plus / h - exact);
        CHECK(dev <= previous + 1e-12);
        previous = dev;
    }
    CHECK(previous <= 0.02);
}

TEST_CASE("lipschitz along curves") {
    SUBCASE("constant field gives zero") {
        const SolutionField field =
            analytic_library("constant", grid(11, 101, {0.0, 1.0}, {-1.0, 1.0}), 0.3);
        const Characteristic gamma = trace_characteristic(field, 0.0, 0.0, 0.0, 1.0);
        CHECK(lipschitz_along(field, gamma) <= 1e-12);
    }
    SUBCASE("example33 curve from (0,1): u = 1 + t, quotient 1") {
        const SolutionField field =
            analytic_library("example33", grid(11, 13601, {0.0, 0.2}, {-1.7, 1.7}));
        const Characteristic gamma = trace_characteristic(field, 0.0, 1.0, 0.0, 0.2, 0.02);
        CHECK(std::fabs(lipschitz_along(field, gamma) - 1.0) <= 1e-6);
    }
    SUBCASE("uniform source: quotient is exactly the source bound") {
        const SolutionField field =
            analytic_library("uniform_source", grid(21, 201, {0.0, 1.0}, {-1.0, 1.0}));
        const Characteristic gamma = trace_characteristic(field, 0.0, -0.5, 0.0, 0.8);
        CHECK(lipschitz_along(field, gamma) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("adjacent-gap maximum equals the all-pairs maximum") {
        Characteristic gamma;
        gamma.times = {0.0, 0.1, 0.25, 0.3, 0.5, 0.8};
        gamma.positions = {0.0, 0.0, 0.0, 0.0, 0.0, 0.0};
        gamma.values = {0.0, 0.3, -0.1, 0.2, 0.15, 0.4};
        const SolutionField dummy =
            analytic_library("constant", grid(3, 3, {0.0, 1.0}, {-1.0, 1.0}), 0.0);
        double brute = 0.0;
        for (std::size_t i = 0; i < gamma.size(); ++i)
            for (std::size_t j = i + 1; j < gamma.size(); ++j)
                brute = std::max(brute, std::fabs(gamma.values[j] - gamma.values[i]) /
                                            (gamma.times[j] - gamma.times[i]));
        CHECK(lipschitz_along(dummy, gamma) == doctest::Approx(brute).epsilon(1e-14));
    }
}

TEST_CASE("holder seminorm on example33 at t = 0") {
    const SolutionField field =
        analytic_library("example33", grid(3, 4001, {0.0, 0.5}, {-1.0, 1.0}));
    const HolderReport rep = holder_seminorm(field, 0.0, 2, -1.0, 1.0);
    CHECK(std::fabs(rep.empirical - std::sqrt(2.0)) <= 0.01 * std::sqrt(2.0));
    CHECK(rep.exponent_fit >= 0.48);
    CHECK(rep.exponent_fit <= 0.52);
    CHECK(rep.fit_reliable);
    CHECK(rep.pairs_scanned <= 2'000'000);
    // theoretical constant for f = u^2: q = 1, c_ell = 1, G = 1
    CHECK(rep.theoretical_applicable);
    CHECK_FALSE(rep.degenerate_source);
    CHECK(rep.theoretical == doctest::Approx(2.0).epsilon(1e-6));
    CHECK(rep.empirical <= rep.theoretical);

    // time-translation invariance: u does not depend on t
    const HolderReport later = holder_seminorm(field, 0.5, 2, -1.0, 1.0);
    CHECK(later.empirical == doctest::Approx(rep.empirical).epsilon(1e-12));
}

TEST_CASE("holder seminorm with cubic-order exponent") {
    // |u(x) - u(y)| / |x - y|^(1/3) on the square-root field peaks at the
    // antisymmetric endpoints: 2 / 2^(1/3) = 2^(2/3)
    const SolutionField field =
        analytic_library("example33", grid(3, 2001, {0.0, 0.5}, {-1.0, 1.0}));
    const HolderReport rep = holder_seminorm(field, 0.0, 3, -1.0, 1.0);
    CHECK(rep.empirical == doctest::Approx(std::pow(2.0, 2.0 / 3.0)).epsilon(1e-6));
}

TEST_CASE("holder seminorm on degenerate and smooth fields") {
    SUBCASE("constant field: zero seminorm, no usable fit") {
        const SolutionField field =
            analytic_library("constant", grid(3, 257, {0.0, 1.0}, {-1.0, 1.0}), 2.0);
        const HolderReport rep = holder_seminorm(field, 0.0, 2, -1.0, 1.0);
        CHECK(rep.empirical == 0.0);
        CHECK(rep.scales_used == 0);
        CHECK_FALSE(rep.fit_reliable);
    }
    SUBCASE("linear_decay: Lipschitz field fits exponent 1") {
        const SolutionField field =
            analytic_library("linear_decay", grid(3, 4001, {0.0, 0.5}, {-1.0, 1.0}));
        const HolderReport rep = holder_seminorm(field, 0.0, 2, -1.0, 1.0);
        CHECK(rep.exponent_fit >= 0.95);
        CHECK(rep.degenerate_source);
        CHECK(rep.theoretical == 0.0);
    }
    SUBCASE("uniform_source: flat rows, theoretical not applicable") {
        const SolutionField field =
            analytic_library("uniform_source", grid(5, 513, {0.0, 1.0}, {-1.0, 1.0}));
        const HolderReport rep = holder_seminorm(field, 0.5, 2, -1.0, 1.0);
        CHECK(rep.empirical <= 1e-12);
        // value range degenerates to a point; flux stats are not applicable
        CHECK_FALSE(rep.theoretical_applicable);
    }
    SUBCASE("off-grid time is rejected") {
        const SolutionField field =
            analytic_library("constant", grid(3, 257, {0.0, 1.0}, {-1.0, 1.0}), 0.0);
        CHECK_THROWS_AS(holder_seminorm(field, 0.123, 2, -1.0, 1.0), DomainError);
    }
}

TEST_CASE("oscillation functional A_delta") {
    const SolutionField field =
        analytic_library("example33", grid(3, 4001, {0.0, 0.5}, {-1.0, 1.0}));
    SUBCASE("at the kink the ratio is exactly 1") {
        for (double delta : {0.5, 0.25, 0.125})
            CHECK(oscillation_a(field, 0.0, 0.0, 2, delta) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("at (0, 1/2) with delta = 1/8 the maximum is 2 - sqrt(3)") {
        // max of |sqrt(y) - sqrt(1/2)| / sqrt(|y - 1/2|) over |y - 1/2| <= 1/8
        // is attained at y = 3/8 and equals 2 - sqrt(3); y = 3/8 is a grid node
        const double a = oscillation_a(field, 0.0, 0.5, 2, 0.125);
        CHECK(a == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-9));
    }
    SUBCASE("constant field gives zero") {
        const SolutionField c =
            analytic_library("constant", grid(3, 257, {0.0, 1.0}, {-1.0, 1.0}), 1.0);
        CHECK(oscillation_a(c, 0.5, 0.0, 2, 0.25) == 0.0);
    }
    SUBCASE("monotone in delta and below the window seminorm") {
        const HolderReport rep = holder_seminorm(field, 0.0, 2, -1.0, 1.0);
        double previous = 0.0;
        for (double delta : {0.01, 0.05, 0.1, 0.2, 0.4}) {
            const double a = oscillation_a(field, 0.0, 0.3, 2, delta);
            CHECK(a >= previous - 1e-15);
            CHECK(a <= rep.empirical + 1e-12);
            previous = a;
        }
    }
    SUBCASE("preconditions") {
        CHECK_THROWS_AS(oscillation_a(field, 0.0, 0.95, 2, 0.2), DomainError);
        CHECK_THROWS_AS(oscillation_a(field, 0.0, 0.0, 2, 1e-5), DomainError);
    }
}

TEST_CASE("oscillation survey fractions") {
    SUBCASE("constant field: all fractions zero") {
        const SolutionField field =
            analytic_library("constant", grid(5, 513, {0.0, 1.0}, {-1.0, 1.0}), 0.2);
        const double deltas[] = {0.2, 0.1, 0.05};
        for (const SurveyRow& row : oscillation_survey(field, 500, deltas, 0.5, 2, 9))
            CHECK(row.fraction == 0.0);
    }
    SUBCASE("example33: fraction decays linearly in delta") {
        const SolutionField field =
            analytic_library("example33", grid(5, 1601, {0.0, 0.5}, {-1.0, 1.0}));
        const double deltas[] = {0.2, 0.1, 0.05, 0.025, 0.0125};
        const auto rows = oscillation_survey(field, 2000, deltas, 0.5, 2, 123);
        // exceptional set is |x| < (25/16) delta inside the sampled band of
        // width 1.6; allow a factor for sampling noise and grid blur
        for (const SurveyRow& row : rows) {
            CHECK(row.fraction <= 3.0 * row.delta);
            CHECK(row.fraction > 0.0);
        }
        for (std::size_t i = 1; i < rows.size(); ++i)
            CHECK(rows[i].fraction <= rows[i - 1].fraction);
    }
    SUBCASE("linear_decay with threshold 1/4: zero below delta = 1/16") {
        const SolutionField field =
            analytic_library("linear_decay", grid(5, 1601, {0.0, 1.0}, {-1.0, 1.0}));
        const double deltas[] = {0.05, 0.025, 0.0125};
        for (const SurveyRow& row : oscillation_survey(field, 1000, deltas, 0.25, 2, 77))
            CHECK(row.fraction == 0.0);
    }
}
