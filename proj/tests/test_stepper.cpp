#include <doctest.h>

#include <cmath>

#include "spde/initial_data.hpp"
#include "spde/stepper.hpp"
#include "support/oracles.hpp"

using namespace spde;

namespace {

SolverConfig quick_cfg(double dt, double T, int record_every = 1) {
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.T = T;
    cfg.record_every = record_every;
    return cfg;
}

}  // namespace

TEST_CASE("implicit heat step: exact per-step eigenmode decay") {
    Grid g(1.0, 63);
    const double b0 = 1.7, dt = 1e-3;
    auto spec = make_constant(b0);
    SolverConfig cfg = quick_cfg(dt, 10 * dt);
    Stepper st(g, cfg, spec);

    GridFunction u(g);
    u.v = g.eigenvector(1);
    const double rho = 1.0 / (1.0 + dt * b0 * g.eigenvalue(1));
    double amp = 1.0;
    for (int n = 0; n < 10; ++n) {
        REQUIRE(st.step(u, nullptr));
        amp *= rho;
        for (int j = 0; j < u.size(); ++j)
            CHECK(u[j] == doctest::Approx(amp * g.eigenvector(1)[static_cast<std::size_t>(j)])
                              .epsilon(1e-12));
    }
}

TEST_CASE("zero state with zero noise is a fixed point") {
    Grid g(1.0, 31);
    auto spec = make_porous_floor(1.0, 1.0, 3.0);
    SolverConfig cfg = quick_cfg(1e-3, 1e-2);
    Stepper st(g, cfg, spec);
    GridFunction u(g);
    for (int n = 0; n < 10; ++n) REQUIRE(st.step(u, nullptr));
    for (int j = 0; j < u.size(); ++j) CHECK(u[j] == 0.0);
}

TEST_CASE("mass balance telescopes to the boundary fluxes") {
    Grid g(1.0, 63);
    auto spec = make_porous_floor(0.5, 1.0, 3.0);
    SolverConfig cfg = quick_cfg(1e-3, 1e-3);
    Stepper st(g, cfg, spec);
    GridFunction u = make_initial_data(g, "bump:1.0,0.5,0.12");

    double mass_before = 0.0;
    for (int j = 0; j < u.size(); ++j) mass_before += u[j];
    mass_before *= g.h();

    REQUIRE(st.step(u, nullptr));
    double mass_after = 0.0;
    for (int j = 0; j < u.size(); ++j) mass_after += u[j];
    mass_after *= g.h();

    // h * sum(L_a u') = -(a_{1/2} u'_1 + a_{n+1/2} u'_n)/h
    const auto& faces = st.faces();
    const double flux = -(faces.front() * u[0] + faces.back() * u[u.size() - 1]) / g.h();
    CHECK(mass_after - mass_before ==
          doctest::Approx(cfg.dt * flux).epsilon(1e-10));
    CHECK(mass_after <= mass_before);  // nonnegative state, outflow only
}

TEST_CASE("dissipation ledger: exact discrete energy identity per implicit step") {
    Grid g(1.0, 63);
    auto spec = make_porous_floor(1.0, 1.0, 3.0);
    SolverConfig cfg = quick_cfg(5e-4, 5e-4);
    Stepper st(g, cfg, spec);
    GridFunction u = make_initial_data(g, "bump:1.3,0.4,0.1");

    auto ledger_defect = [&](double dt) {
        SolverConfig c = quick_cfg(dt, dt);
        Stepper stp(g, c, spec);
        GridFunction state = u;
        GridFunction before = state;
        REQUIRE(stp.step(state, nullptr));
        const double e_before = 0.5 * inner_h(before, before);
        const double e_after = 0.5 * inner_h(state, state);
        GridFunction incr = state;
        for (int j = 0; j < state.size(); ++j) incr[j] = state[j] - before[j];
        // exact: dE = -dt <a grad u', grad u'> - 1/2 ||u' - u||^2
        const double exact = -c.dt * stp.dissipation(state) - 0.5 * inner_h(incr, incr);
        CHECK(e_after - e_before == doctest::Approx(exact).epsilon(1e-10));
        // defect of the continuum rate identity dE/dt = -dissipation
        return std::abs((e_after - e_before) / c.dt + stp.dissipation(state));
    };
    // the defect is the 1/2 ||du||^2 / dt term: first order in dt
    const double coarse = ledger_defect(5e-4);
    const double fine = ledger_defect(5e-4 / 8.0);
    CHECK(fine <= 0.35 * coarse);
}

TEST_CASE("explicit scheme honors the CFL guard") {
    Grid g(1.0, 63);
    auto spec = make_constant(1.0);
    SolverConfig cfg = quick_cfg(1e-3, 1e-3);  // dt * b / h^2 = 4.1 >> 1/2
    cfg.scheme = Scheme::Explicit;
    Stepper st(g, cfg, spec);
    GridFunction u = make_initial_data(g, "bump:1,0.5,0.1");
    CHECK_FALSE(st.step(u, nullptr));

    SolverConfig safe = quick_cfg(1e-4 * 0.5, 1e-3);
    safe.scheme = Scheme::Explicit;
    Stepper st2(g, safe, spec);
    CHECK(st2.step(u, nullptr));
}

TEST_CASE("integrate: T = 0 trajectory is just the initial state") {
    Grid g(1.0, 31);
    auto spec = make_constant(1.0);
    SolverConfig cfg = quick_cfg(1e-3, 0.0);
    auto traj = integrate(make_initial_data(g, "bump:1,0.5,0.1"), cfg, spec, nullptr, NoisePath());
    CHECK(traj.snapshots.size() == 1);
    CHECK(traj.status == TrajectoryStatus::Completed);
    CHECK(traj.times[0] == 0.0);
}

TEST_CASE("snapshot count matches 1 + floor(steps / record_every)") {
    Grid g(1.0, 31);
    auto spec = make_constant(1.0);
    SolverConfig cfg = quick_cfg(1e-3, 0.01, 3);  // 10 steps, stride 3
    auto traj = integrate(make_initial_data(g, "bump:1,0.5,0.1"), cfg, spec, nullptr, NoisePath());
    CHECK(traj.snapshots.size() == 1 + 10 / 3);
    CHECK(traj.status == TrajectoryStatus::Completed);
}

TEST_CASE("porous bump against a fine-grid explicit reference") {
    Grid g(1.0, 127);
    auto spec = make_porous(1.0, 3.0);  // b(r) = r^2
    SolverConfig cfg = quick_cfg(2e-5, 0.05);
    cfg.record_every = cfg.steps();
    GridFunction u0 = make_initial_data(g, "bump:1.2,0.5,0.08");
    auto traj = integrate(u0, cfg, spec, nullptr, NoisePath());
    REQUIRE(traj.status == TrajectoryStatus::Completed);
    const GridFunction& ours = traj.snapshots.back();

    // reference on a 4x finer grid, explicit stepping, sampled back down
    const int refine = 4;
    const int nf = (g.n_interior() + 1) * refine - 1;
    const double hf = 1.0 / (nf + 1);
    std::vector<double> uf(static_cast<std::size_t>(nf));
    for (int j = 0; j < nf; ++j) {
        const double x = (j + 1) * hf;
        uf[static_cast<std::size_t>(j)] = 1.2 * std::exp(-0.5 * (x - 0.5) * (x - 0.5) / (0.08 * 0.08));
    }
    const double bmax = 1.2 * 1.2 * 1.5;
    const double dt_ref = 0.2 * hf * hf / bmax;
    const auto ref = oracles::explicit_reference([](double r) { return r * r; }, uf, hf, 0.05,
                                                 dt_ref);
    double l1 = 0.0;
    for (int j = 0; j < g.n_interior(); ++j) {
        const int jf = (j + 1) * refine - 1;
        l1 += std::abs(ours[j] - ref[static_cast<std::size_t>(jf)]);
    }
    l1 *= g.h();
    CHECK(l1 <= 1e-3);

    // qualitative porous behavior: max decays, L1 non-increasing
    double max0 = 0.0, maxT = 0.0;
    for (int j = 0; j < u0.size(); ++j) {
        max0 = std::max(max0, u0[j]);
        maxT = std::max(maxT, ours[j]);
    }
    CHECK(maxT < max0);
    CHECK(norm_l1(ours) <= norm_l1(u0) * (1.0 + 1e-9));
}

TEST_CASE("weak-form residual shrinks at first order under joint refinement") {
    auto run = [](int n, double dt) {
        Grid g(1.0, n);
        auto spec = make_porous_floor(1.0, 1.0, 3.0);
        SolverConfig cfg = quick_cfg(dt, 0.05);
        cfg.record_every = cfg.steps();
        cfg.track_weak_residual = true;
        GridFunction u = make_initial_data(g, "bump:1,0.5,0.1");
        double residual = 0.0;
        TrajectoryStatus st = integrate_observe(u, cfg, spec, nullptr, NoisePath(), {},
                                                nullptr, nullptr, &residual);
        REQUIRE(st == TrajectoryStatus::Completed);
        return std::abs(residual);
    };
    const double coarse = run(32, 4e-4);
    const double fine = run(64, 2e-4);
    const double finer = run(128, 1e-4);
    CHECK(fine < coarse);
    CHECK(finer < fine);
    CHECK(fine <= 0.75 * coarse);  // at least first-order-ish
}

TEST_CASE("coupled integration: identical data stay bit-identical; additive difference is deterministic") {
    Grid g(1.0, 63);
    auto spec = make_constant(1.3);
    NoiseSpec ns;
    ns.mode = NoiseMode::Additive;
    ns.n_modes = 8;
    ns.lambda_bar = 0.5;
    NoiseOp op(g, ns);
    SolverConfig cfg = quick_cfg(1e-3, 0.05);
    cfg.record_every = cfg.steps();

    GridFunction a = make_initial_data(g, "bump:1,0.5,0.1");
    auto trajs = integrate_coupled({a, a}, cfg, spec, &op, NoisePath(ns.seed, 0, cfg.dt));
    REQUIRE(trajs[0].status == TrajectoryStatus::Completed);
    for (std::size_t k = 0; k < trajs[0].snapshots.size(); ++k)
        for (int j = 0; j < a.size(); ++j)
            CHECK(trajs[0].snapshots[k][j] == trajs[1].snapshots[k][j]);

    // with constant b and shared additive noise, the difference follows the
    // deterministic implicit heat flow exactly
    GridFunction b = make_initial_data(g, "two_bump:0.7,0.3,0.7,0.08");
    auto pair = integrate_coupled({a, b}, cfg, spec, &op, NoisePath(ns.seed, 1, cfg.dt));
    GridFunction d0(g);
    for (int j = 0; j < a.size(); ++j) d0[j] = a[j] - b[j];
    SolverConfig det = cfg;
    auto dref = integrate(d0, det, spec, nullptr, NoisePath());
    const auto& dT = dref.snapshots.back();
    for (int j = 0; j < a.size(); ++j) {
        const double diff = pair[0].snapshots.back()[j] - pair[1].snapshots.back()[j];
        CHECK(diff == doctest::Approx(dT[j]).epsilon(1e-9));
    }
}

TEST_CASE("coupled additive pair with ordered data stays ordered") {
    Grid g(1.0, 63);
    auto spec = make_bounded(1.0, 2.0);
    NoiseSpec ns;
    ns.mode = NoiseMode::Additive;
    ns.n_modes = 8;
    ns.lambda_bar = 0.4;
    NoiseOp op(g, ns);
    SolverConfig cfg = quick_cfg(1e-3, 0.1);
    cfg.record_every = 10;

    GridFunction loff(g);  // zero
    GridFunction hif = make_initial_data(g, "bump:1,0.5,0.12");
    auto trajs = integrate_coupled({loff, hif}, cfg, spec, &op, NoisePath(ns.seed, 2, cfg.dt));
    for (std::size_t k = 0; k < trajs[0].snapshots.size(); ++k) {
        const double gap = positive_part_gap(trajs[0].snapshots[k], trajs[1].snapshots[k]);
        CHECK(gap <= 5e-3);
    }
}

TEST_CASE("determinism: identical config and seed reproduce bit-identical trajectories") {
    Grid g(1.0, 31);
    auto spec = make_porous_floor(1.0, 1.0, 3.0);
    NoiseSpec ns;
    ns.mode = NoiseMode::Multiplicative;
    ns.profile = StateProfile::InvSqrt;
    ns.n_modes = 6;
    ns.lambda_bar = 0.7;
    NoiseOp op(g, ns);
    SolverConfig cfg = quick_cfg(1e-3, 0.05);
    cfg.record_every = 10;
    GridFunction u0 = make_initial_data(g, "bump:1,0.5,0.1");
    auto t1 = integrate(u0, cfg, spec, &op, NoisePath(ns.seed, 5, cfg.dt));
    auto t2 = integrate(u0, cfg, spec, &op, NoisePath(ns.seed, 5, cfg.dt));
    REQUIRE(t1.snapshots.size() == t2.snapshots.size());
    for (std::size_t k = 0; k < t1.snapshots.size(); ++k)
        for (int j = 0; j < u0.size(); ++j)
            CHECK(t1.snapshots[k][j] == t2.snapshots[k][j]);
}

TEST_CASE("linear additive regime matches exact discrete OU statistics") {
    Grid g(1.0, 31);
    const double b0 = 1.0, dt = 2e-3, T = 0.5;
    auto spec = make_constant(b0);
    NoiseSpec ns;
    ns.mode = NoiseMode::Additive;
    ns.n_modes = 4;
    ns.lambda_bar = 0.8;
    NoiseOp op(g, ns);
    SolverConfig cfg = quick_cfg(dt, T);
    cfg.record_every = cfg.steps();

    const int paths = 4000;
    const int steps = cfg.steps();
    std::vector<std::vector<double>> coeffs(4);
    GridFunction u0(g);  // start at zero
    for (int p = 0; p < paths; ++p) {
        GridFunction u = u0;
        TrajectoryStatus st =
            integrate_observe(u, cfg, spec, &op, NoisePath(ns.seed, static_cast<std::uint64_t>(p), dt), {});
        REQUIRE(st == TrajectoryStatus::Completed);
        const auto c = spectral_coefficients(u, 4);
        for (int i = 0; i < 4; ++i) coeffs[static_cast<std::size_t>(i)].push_back(c[static_cast<std::size_t>(i)]);
    }
    for (int i = 1; i <= 4; ++i) {
        const double rho = 1.0 / (1.0 + dt * b0 * g.eigenvalue(i));
        const double lam = op.lambda(i);
        // a^{n+1} = rho (a^n + lam dbeta): stationary AR(1) variance after n steps
        const double r2 = rho * rho;
        const double var_exact =
            lam * lam * dt * r2 * (1.0 - std::pow(r2, steps)) / (1.0 - r2);
        const auto& sample = coeffs[static_cast<std::size_t>(i - 1)];
        double mean = 0.0;
        for (double x : sample) mean += x;
        mean /= sample.size();
        double var = 0.0;
        for (double x : sample) var += (x - mean) * (x - mean);
        var /= (sample.size() - 1);
        const double se_mean = std::sqrt(var / sample.size());
        const double se_var = var * std::sqrt(2.0 / (sample.size() - 1));
        CHECK(std::abs(mean - 0.0) <= 3.0 * se_mean);
        CHECK(std::abs(var - var_exact) <= 3.0 * se_var);
    }
}

TEST_CASE("stochastic convolution: zero noise, OU mode variance, dt-stability") {
    Grid g(1.0, 31);
    NoiseSpec ns;
    ns.mode = NoiseMode::Additive;
    ns.n_modes = 4;
    ns.lambda_bar = 0.0;
    NoiseOp zero_op(g, ns);
    auto wz = stochastic_convolution(zero_op, 1e-2, 0.1, NoisePath(1, 0, 1e-2));
    for (const auto& s : wz.snapshots)
        for (int j = 0; j < s.size(); ++j) CHECK(s[j] == 0.0);

    ns.lambda_bar = 1.0;
    NoiseOp op(g, ns);
    const double dt = 5e-3, T = 0.5;
    const int paths = 10000;
    std::vector<double> c1;
    c1.reserve(paths);
    for (int p = 0; p < paths; ++p) {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.T = T;
        cfg.record_every = cfg.steps();
        GridFunction w(g);
        integrate_observe(w, cfg, make_constant(1.0), &op,
                          NoisePath(ns.seed, static_cast<std::uint64_t>(p), dt), {});
        c1.push_back(spectral_coefficients(w, 1)[0]);
    }
    double mean = 0.0;
    for (double x : c1) mean += x;
    mean /= c1.size();
    double var = 0.0;
    for (double x : c1) var += (x - mean) * (x - mean);
    var /= (c1.size() - 1);
    const int steps = static_cast<int>(std::llround(T / dt));
    const double rho2 = std::pow(1.0 / (1.0 + dt * g.eigenvalue(1)), 2);
    const double var_disc = 1.0 * dt * rho2 * (1.0 - std::pow(rho2, steps)) / (1.0 - rho2);
    const double var_cont =
        1.0 * (1.0 - std::exp(-2.0 * g.eigenvalue(1) * T)) / (2.0 * g.eigenvalue(1));
    const double se_var = var * std::sqrt(2.0 / (c1.size() - 1));
    CHECK(std::abs(var - var_disc) <= 3.0 * se_var);
    // continuum formula agrees with the discrete one at this resolution
    CHECK(var_disc == doctest::Approx(var_cont).epsilon(0.05));

    // running max of H1 norm is recorded and finite
    auto w1 = stochastic_convolution(op, dt, 0.2, NoisePath(2, 0, dt), 5);
    CHECK(w1.max_h1 > 0.0);
    CHECK(std::isfinite(w1.max_h1));

    // statistics stable under dt-halving: mean running max over an ensemble
    auto mean_max = [&](double step) {
        double acc = 0.0;
        for (int p = 0; p < 64; ++p)
            acc += stochastic_convolution(op, step, 0.5, NoisePath(3, static_cast<std::uint64_t>(p), step),
                                          64)
                       .max_h1;
        return acc / 64.0;
    };
    const double coarse = mean_max(5e-3);
    const double fine = mean_max(2.5e-3);
    CHECK(fine == doctest::Approx(coarse).epsilon(0.15));
}
