#include <doctest.h>

#include <cmath>

#include "spde/boundary_layer.hpp"
#include "spde/grid.hpp"

using namespace spde;

TEST_CASE("zeta solve: residual, box bounds, concavity") {
    Grid g(1.0, 127);
    for (double delta : {0.2, 0.1, 0.05, 0.01}) {
        const auto bl = solve_zeta(g, delta);
        CHECK(bl.residual <= 1e-12);
        const double inv_h2 = 1.0 / (g.h() * g.h());
        for (int j = 0; j < g.n_interior(); ++j) {
            CHECK(bl.zeta[j] >= -1e-12);
            CHECK(bl.zeta[j] <= 1.0 + 1e-12);
            const double left = j > 0 ? bl.zeta[j - 1] : 0.0;
            const double right = j + 1 < g.n_interior() ? bl.zeta[j + 1] : 0.0;
            const double lap = (left - 2.0 * bl.zeta[j] + right) * inv_h2;
            CHECK(lap <= 1e-12);
        }
    }
    CHECK_THROWS(solve_zeta(g, 0.0));
}

TEST_CASE("zeta matches the closed form at second order") {
    // the error constant scales like h^2/delta^2, so fix delta and refine h
    const double delta = 0.1;
    double prev_err = 1e100;
    for (int n : {31, 63, 127, 255}) {
        Grid g(1.0, n);
        const auto bl = solve_zeta(g, delta);
        double err = 0.0;
        for (int j = 0; j < n; ++j)
            err = std::max(err, std::abs(bl.zeta[j] - zeta_closed_form(g.node(j), 1.0, delta)));
        CHECK(err < prev_err);
        // second order: error / h^2 stays bounded by a modest constant
        CHECK(err <= 5.0 * g.h() * g.h());
        prev_err = err;
    }
}

TEST_CASE("closed form satisfies the equation and the center value bound") {
    const double delta = 0.05;
    // -delta^2 zeta'' + zeta = 1 by substitution, sampled
    for (double x : {0.1, 0.3, 0.5, 0.8}) {
        const double dd = 1e-4;
        const double z = zeta_closed_form(x, 1.0, delta);
        const double zpp = (zeta_closed_form(x - dd, 1.0, delta) - 2.0 * z +
                            zeta_closed_form(x + dd, 1.0, delta)) /
                           (dd * dd);
        CHECK(-delta * delta * zpp + z == doctest::Approx(1.0).epsilon(1e-5));
    }
    CHECK(zeta_closed_form(0.0, 1.0, delta) == doctest::Approx(0.0).epsilon(1e-12));
    // delta = 0.05 at the center of (0,1): 1 - 1/cosh(10) >= 0.99
    CHECK(zeta_closed_form(0.5, 1.0, delta) >= 0.99);
    Grid g(1.0, 127);
    const auto bl = solve_zeta(g, delta);
    CHECK(bl.zeta[63] >= 0.99);
}

TEST_CASE("zeta is pointwise monotone toward 1 as delta decreases") {
    Grid g(1.0, 63);
    const auto d1 = solve_zeta(g, 0.2);
    const auto d2 = solve_zeta(g, 0.1);
    const auto d3 = solve_zeta(g, 0.02);
    for (int j = 0; j < g.n_interior(); ++j) {
        CHECK(d2.zeta[j] >= d1.zeta[j] - 1e-12);
        CHECK(d3.zeta[j] >= d2.zeta[j] - 1e-12);
    }
    // large delta: the operator dominates and zeta collapses toward 0
    const auto big = solve_zeta(g, 50.0);
    for (int j = 0; j < g.n_interior(); ++j) CHECK(big.zeta[j] <= 5e-4);
}

TEST_CASE("flux limit: constant, linear, and boundary-vanishing test fields") {
    Grid g(1.0, 511);
    const std::vector<double> deltas = {0.2, 0.1, 0.05, 0.02, 0.01};

    const auto const_rep =
        flux_limit_check(g, [](double) { return 1.0; }, deltas);
    CHECK(const_rep.boundary_target == doctest::Approx(0.0));
    for (const auto& row : const_rep.rows)
        CHECK(row.integral == doctest::Approx(0.0).epsilon(1e-10));

    const auto lin_rep = flux_limit_check(g, [](double x) { return x; }, deltas);
    CHECK(lin_rep.boundary_target == doctest::Approx(-1.0));
    // integral = -(1 - 2 delta tanh(1/(2 delta))) in the continuum; converges to -1
    double prev_gap = 1e100;
    for (const auto& row : lin_rep.rows) {
        const double gap = std::abs(row.integral - (-1.0));
        CHECK(gap < prev_gap);
        CHECK(row.integral ==
              doctest::Approx(-(1.0 - 2.0 * row.delta * std::tanh(0.5 / row.delta)))
                  .epsilon(2e-3));
        prev_gap = gap;
    }
    // the continuum defect at delta is exactly 2 delta tanh(1/(2 delta)), so
    // the gap floor at delta = 0.01 is 2%; the quadrature excess is O(h^2/delta)
    const double floor_001 = 2.0 * 0.01 * std::tanh(0.5 / 0.01);
    const double quad_excess = g.h() * g.h() / (6.0 * 0.01);
    CHECK(std::abs(lin_rep.rows.back().integral - (-1.0)) <=
          floor_001 + 3.0 * quad_excess);

    const auto vanishing =
        flux_limit_check(g, [](double x) { return x * (1.0 - x); }, deltas);
    CHECK(vanishing.boundary_target == doctest::Approx(0.0));
    CHECK(std::abs(vanishing.rows.back().integral) <= 0.02);
}
