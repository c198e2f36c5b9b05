#include <doctest.h>

#include <cmath>

#include "spde/grid.hpp"
#include "spde/rng.hpp"
#include "support/oracles.hpp"

using namespace spde;

TEST_CASE("grid construction and node layout") {
    Grid g(1.0, 99);
    CHECK(g.h() == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(g.node(49) == doctest::Approx(0.5).epsilon(1e-14));  // x_50 in 1-based counting

    Grid g2(2.0, 3);
    CHECK(g2.node(0) == doctest::Approx(0.5));
    CHECK(g2.node(1) == doctest::Approx(1.0));
    CHECK(g2.node(2) == doctest::Approx(1.5));

    CHECK_THROWS(Grid(0.0, 10));
    CHECK_THROWS(Grid(-1.0, 10));
    CHECK_THROWS(Grid(1.0, 2));
}

TEST_CASE("laplacian: zero field, spike stencil, eigenmode decay") {
    Grid g(1.0, 63);
    GridFunction zero(g);
    auto lz = laplacian_apply(zero);
    for (int j = 0; j < lz.size(); ++j) CHECK(lz[j] == 0.0);

    GridFunction spike(g);
    const int jc = 31;
    spike[jc] = 1.0;
    auto ls = laplacian_apply(spike);
    const double w = 1.0 / (g.h() * g.h());
    CHECK(ls[jc - 1] == doctest::Approx(w));
    CHECK(ls[jc] == doctest::Approx(-2.0 * w));
    CHECK(ls[jc + 1] == doctest::Approx(w));
    CHECK(ls[jc + 2] == doctest::Approx(0.0));

    // discrete first eigenmode: Lap e1 = -alpha1 e1 exactly, and alpha1 -> pi^2
    GridFunction e1(g);
    e1.v = g.eigenvector(1);
    auto le = laplacian_apply(e1);
    const double a1 = g.eigenvalue(1);
    for (int j = 0; j < e1.size(); ++j)
        CHECK(le[j] == doctest::Approx(-a1 * e1[j]).epsilon(1e-10));
    CHECK(a1 == doctest::Approx(M_PI * M_PI).epsilon(2e-4));
}

TEST_CASE("eigenpairs against the dense Jacobi oracle") {
    for (int n : {31, 64, 256}) {
        Grid g(1.0, n);
        const auto dense = oracles::jacobi_eigensolve(oracles::neg_laplacian_matrix(n, g.h()));
        const auto pairs = eigenpairs(g, n);
        for (int i = 0; i < n; ++i) {
            const double ref = dense.values[static_cast<std::size_t>(i)];
            CHECK(std::abs(pairs[static_cast<std::size_t>(i)].alpha - ref) <=
                  1e-10 * std::abs(ref));
        }
        // eigenvector agreement up to sign, through the H inner product
        for (int i : {0, 1, n / 2, n - 1}) {
            const auto& mode = pairs[static_cast<std::size_t>(i)].mode;
            double dot = 0.0, nrm = 0.0;
            for (int j = 0; j < n; ++j) {
                dot += mode[j] * dense.vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
                nrm += dense.vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] *
                       dense.vectors[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            }
            const double cosine = std::abs(dot) / (std::sqrt(nrm) * norm_h(mode) / std::sqrt(g.h()));
            CHECK(cosine == doctest::Approx(1.0).epsilon(1e-8));
        }
    }
    Grid g(1.0, 16);
    CHECK_THROWS(eigenpairs(g, 17));
}

TEST_CASE("eigenpairs are H-orthonormal") {
    Grid g(1.0, 32);
    const auto pairs = eigenpairs(g, 32);
    for (int i = 0; i < 32; i += 5) {
        for (int j = 0; j < 32; j += 7) {
            const double ip = inner_h(pairs[static_cast<std::size_t>(i)].mode,
                                      pairs[static_cast<std::size_t>(j)].mode);
            CHECK(ip == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("norms: zero field, eigenvector identities, Poincare chain") {
    Grid g(1.0, 64);
    GridFunction zero(g);
    CHECK(norm_lp(zero, 1.0) == 0.0);
    CHECK(norm_lp(zero, 3.5) == 0.0);
    CHECK(norm_h(zero) == 0.0);
    CHECK(norm_h1(zero) == 0.0);
    CHECK(norm_hminus(zero, 1.0) == 0.0);
    CHECK_THROWS(norm_lp(zero, 0.5));

    GridFunction e1(g);
    e1.v = g.eigenvector(1);
    const double a1 = g.eigenvalue(1);
    CHECK(norm_hminus(e1, 1.0) == doctest::Approx(1.0 / std::sqrt(a1)).epsilon(1e-10));

    // random fields: ||f||_Hminus1 <= ||f||_H / sqrt(a1) <= ||f||_H1 / a1
    for (int trial = 0; trial < 20; ++trial) {
        GridFunction f(g);
        for (int j = 0; j < f.size(); ++j)
            f[j] = counter_gaussian(42, 0, static_cast<std::uint64_t>(trial),
                                    static_cast<std::uint64_t>(j));
        const double hm = norm_hminus(f, 1.0);
        const double h0 = norm_h(f);
        const double h1 = norm_h1(f);
        CHECK(hm <= h0 / std::sqrt(a1) * (1.0 + 1e-12));
        CHECK(h0 <= h1 / std::sqrt(a1) * (1.0 + 1e-12));
        CHECK(hm <= h1 / a1 * (1.0 + 1e-12));
    }
}

TEST_CASE("laplacian is H-symmetric") {
    Grid g(1.0, 48);
    for (int trial = 0; trial < 10; ++trial) {
        GridFunction f(g), p(g);
        for (int j = 0; j < f.size(); ++j) {
            f[j] = counter_gaussian(1, 0, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(j));
            p[j] = counter_gaussian(2, 0, static_cast<std::uint64_t>(trial), static_cast<std::uint64_t>(j));
        }
        const double lhs = inner_h(laplacian_apply(f), p);
        const double rhs = inner_h(f, laplacian_apply(p));
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
    }
}

TEST_CASE("positive part gap") {
    Grid g(1.0, 99);
    GridFunction f(g, 1.0), z(g);
    CHECK(positive_part_gap(f, f) == 0.0);
    CHECK(positive_part_gap(f, z) == doctest::Approx(0.99).epsilon(1e-12));
    CHECK(positive_part_gap(z, f) == 0.0);  // f <= g pointwise

    // gap(f,g) + gap(g,f) = ||f - g||_L1
    GridFunction a(g), b(g);
    for (int j = 0; j < a.size(); ++j) {
        a[j] = counter_gaussian(3, 0, 0, static_cast<std::uint64_t>(j));
        b[j] = counter_gaussian(4, 0, 0, static_cast<std::uint64_t>(j));
    }
    GridFunction diff(g);
    for (int j = 0; j < a.size(); ++j) diff[j] = a[j] - b[j];
    CHECK(positive_part_gap(a, b) + positive_part_gap(b, a) ==
          doctest::Approx(norm_l1(diff)).epsilon(1e-12));
}

TEST_CASE("philox known-answer vectors") {
    const auto z = Philox4x32::block({0, 0, 0, 0}, {0, 0});
    CHECK(z[0] == 0x6627e8d5u);
    CHECK(z[1] == 0xe169c58du);
    CHECK(z[2] == 0xbc57ac4cu);
    CHECK(z[3] == 0x9b00dbd8u);
    const auto o = Philox4x32::block({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                     {0xffffffffu, 0xffffffffu});
    CHECK(o[0] == 0x408f276du);
    CHECK(o[1] == 0x41c83b0eu);
    CHECK(o[2] == 0xa20bc7c6u);
    CHECK(o[3] == 0x6d5451fdu);
}
