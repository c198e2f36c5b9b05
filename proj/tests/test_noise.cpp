#include <doctest.h>

#include <cmath>

#include "spde/grid.hpp"
#include "spde/noise.hpp"
#include "spde/stats.hpp"

using namespace spde;

namespace {

NoiseSpec additive_spec(int n_modes, double lambda_bar, std::uint64_t seed = 1) {
    NoiseSpec ns;
    ns.mode = NoiseMode::Additive;
    ns.n_modes = n_modes;
    ns.lambda_bar = lambda_bar;
    ns.decay_q = 1.0;
    ns.profile = StateProfile::One;
    ns.seed = seed;
    return ns;
}

NoiseSpec multiplicative_spec(int n_modes, double lambda_bar, StateProfile p,
                              std::uint64_t seed = 1) {
    NoiseSpec ns = additive_spec(n_modes, lambda_bar, seed);
    ns.mode = NoiseMode::Multiplicative;
    ns.profile = p;
    return ns;
}

}  // namespace

TEST_CASE("sigma_sq: additive is state-independent; midpoint value for N=1") {
    Grid g(1.0, 127);
    NoiseOp op(g, additive_spec(8, 0.7));
    const int j = 50;
    CHECK(op.sigma_sq(j, 0.0) == doctest::Approx(op.sigma_sq(j, 17.3)).epsilon(1e-14));

    // N = 1, g1 = e1, s == 1 at the midpoint of (0,1): e1(1/2)^2 = 2
    NoiseOp op1(g, additive_spec(1, 0.7));
    const int mid = 63;  // x = 0.5
    CHECK(g.node(mid) == doctest::Approx(0.5));
    CHECK(op1.sigma_sq(mid, 0.0) == doctest::Approx(0.7 * 0.7 * 2.0).epsilon(1e-12));

    // profiles vanish toward the boundary
    CHECK(op.sigma_sq(0, 1.0) < 0.02 * op.sigma_sq(mid, 1.0));

    // Sigma^2 <= D (1 + xi^2) on a sample
    const double D = op.D();
    for (int jj = 0; jj < g.n_interior(); jj += 9)
        for (double xi : {-5.0, -1.0, 0.0, 0.4, 3.0})
            CHECK(op.sigma_sq(jj, xi) <= D * (1.0 + xi * xi) * (1.0 + 1e-12));
}

TEST_CASE("sample_increment: zero path, additive state-independence, MC variance") {
    Grid g(1.0, 63);
    NoiseOp op(g, additive_spec(8, 0.0));  // lambda_bar = 0 -> zero field
    NoisePath path(1, 0, 1e-3);
    GridFunction u(g, 0.3);
    auto inc = op.sample_increment(path, 0, u);
    for (int j = 0; j < inc.size(); ++j) CHECK(inc[j] == 0.0);

    NoiseOp op2(g, additive_spec(8, 0.9));
    GridFunction u1(g, -1.0), u2(g, 4.0);
    auto i1 = op2.sample_increment(path, 3, u1);
    auto i2 = op2.sample_increment(path, 3, u2);
    for (int j = 0; j < i1.size(); ++j) CHECK(i1[j] == i2[j]);

    // variance at a node over resampled paths matches Sigma^2(x, u(x)) * dt
    NoiseOp op3(g, multiplicative_spec(6, 0.8, StateProfile::InvSqrt));
    const double dt = 1e-3;
    const int node = 31;
    GridFunction state(g, 0.7);
    const int samples = 100000;
    double sum = 0.0, sumsq = 0.0;
    std::vector<double> mixed, out;
    for (int s = 0; s < samples; ++s) {
        NoisePath p(9, static_cast<std::uint64_t>(s), dt);
        op3.mix(p, 0, mixed);
        op3.apply_profile(mixed, state, out);
        sum += out[node];
        sumsq += out[node] * out[node];
    }
    const double mean = sum / samples;
    const double var = sumsq / samples - mean * mean;
    const double target = op3.sigma_sq(node, 0.7) * dt;
    const double se = target * std::sqrt(2.0 / samples);
    CHECK(std::abs(var - target) <= 3.0 * se);
}

TEST_CASE("path replay is bit-exact") {
    NoisePath a(123, 7, 1e-4);
    NoisePath b(123, 7, 1e-4);
    for (std::uint64_t step : {0ull, 5ull, 99999ull})
        for (std::uint64_t mode : {0ull, 3ull, 63ull})
            CHECK(a.increment(step, mode) == b.increment(step, mode));

    NoisePath other(123, 8, 1e-4);
    bool any_diff = false;
    for (std::uint64_t mode = 0; mode < 16; ++mode)
        any_diff |= other.increment(0, mode) != a.increment(0, mode);
    CHECK(any_diff);

    // order independence: querying out of order changes nothing
    const double first = a.increment(42, 5);
    (void)a.increment(1000, 2);
    (void)a.increment(0, 0);
    CHECK(a.increment(42, 5) == first);
}

TEST_CASE("Lipschitz bound on random quadruples for shipped families") {
    Grid g(1.0, 63);
    for (StateProfile p : {StateProfile::One, StateProfile::InvSqrt, StateProfile::Sin,
                           StateProfile::Tanh}) {
        NoiseSpec ns = p == StateProfile::One ? additive_spec(12, 1.1)
                                              : multiplicative_spec(12, 1.1, p);
        NoiseOp op(g, ns);
        const auto rep = check_lipschitz(op, 3000);
        CHECK(rep.ok);
        CHECK(rep.worst_ratio <= 1.0 + 1e-9);
    }
}

TEST_CASE("sublinear growth check: additive passes, bounded s passes, linear fails gate") {
    Grid g(1.0, 63);
    NoiseOp add(g, additive_spec(8, 0.9));
    const auto ra = check_sublinear_growth(add, 0.0, 0.5, std::sqrt(add.D()), 1.0);
    CHECK(ra.bound_ok);
    CHECK(ra.gate_ok);
    CHECK(std::abs(ra.lambda_estimate) < 0.05);

    NoiseOp bounded(g, multiplicative_spec(8, 0.9, StateProfile::InvSqrt));
    const auto rb = check_sublinear_growth(bounded, 0.0, 0.5, std::sqrt(bounded.D()), 1.0);
    CHECK(rb.bound_ok);
    CHECK(rb.gate_ok);

    // linear profile: ||sigma(h)||_HS grows linearly in ||h||; the measured
    // slope must trip the smallness gate for small b0
    NoiseOp lin(g, multiplicative_spec(8, 2.0, StateProfile::Linear));
    const auto rl = check_sublinear_growth(lin, 0.0, 0.5, 1.0, 1.0);
    CHECK(rl.lambda_estimate > 0.5);
    const double b0_small = 1e-4;
    const auto gate = check_sublinear_growth(lin, rl.lambda_estimate, 0.5, 1.0, b0_small);
    CHECK_FALSE(gate.gate_ok);
}

TEST_CASE("noise spec validation") {
    Grid g(1.0, 15);
    NoiseSpec bad = additive_spec(16, 1.0);
    CHECK_THROWS(NoiseOp(g, bad));  // N > n_interior
    NoiseSpec bad2 = additive_spec(4, 1.0);
    bad2.profile = StateProfile::Sin;  // additive forces s == 1
    CHECK_THROWS(NoiseOp(g, bad2));
    NoiseSpec ok = additive_spec(4, 1.0);
    CHECK(NoiseOp(g, ok).truncation_tail() ==
          doctest::Approx(1.0 / 4.0).epsilon(0.01));  // integral estimate of tail
}
