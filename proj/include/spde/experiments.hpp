#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "spde/boundary_layer.hpp"
#include "spde/config.hpp"
#include "spde/initial_data.hpp"
#include "spde/kinetics.hpp"
#include "spde/report.hpp"
#include "spde/stats.hpp"
#include "spde/stepper.hpp"

namespace spde {

// Path-level parallelism: workers pull indices from a shared counter and
// write only to their own slot, so the aggregation below is independent of
// scheduling and thread count.
template <class Fn>
inline void parallel_paths(int paths, int threads, Fn&& fn) {
    threads = std::max(1, threads);
    if (threads == 1) {
        for (int p = 0; p < paths; ++p) fn(p);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (int p = next.fetch_add(1); p < paths; p = next.fetch_add(1)) fn(p);
        });
    for (auto& th : pool) th.join();
}

// Everything an experiment needs, built once from the materialized config.
struct Lab {
    RunConfig cfg;
    Grid grid;
    DiffusionSpec diffusion;
    NoiseSpec noise_spec;
    NoiseOp noise;
    SolverConfig solver;

    explicit Lab(const RunConfig& c)
        : cfg(c),
          grid(c.make_grid()),
          diffusion(c.make_diffusion()),
          noise_spec(c.make_noise_spec()),
          noise(grid, noise_spec),
          solver(c.make_solver()) {}

    Lab(const Lab&) = delete;

    double slack() const { return cfg.experiment_slack_c * (solver.dt + grid.h()); }

    NoisePath path(std::uint64_t id) const { return NoisePath(noise_spec.seed, id, solver.dt); }

    ExperimentReport base_report(const std::string& kind) const {
        ExperimentReport rep;
        rep.kind = kind;
        rep.config_hash = cfg.hash_hex();
        rep.seed = noise_spec.seed;
        rep.total_paths = static_cast<int>(cfg.experiment_paths);
        if (diffusion.bypass_validation) rep.labels["validator_bypass"] = "true";
        return rep;
    }
};

namespace detail {

inline void require_valid_diffusion(const Lab& lab) {
    if (lab.diffusion.bypass_validation) return;
    const auto rep = validate_hypotheses(lab.diffusion, 8.0, 2000);
    if (!rep.pass())
        throw ConfigError("diffusion spec fails its hypothesis validation on [-8,8]; "
                          "fix the spec or set diffusion.bypass_validation for a "
                          "negative-control run");
}

struct GapEnsemble {
    std::vector<double> times;
    std::vector<std::vector<double>> per_path;  // [path][record]
    std::vector<char> diverged;
    int divergence_count = 0;
};

using GapEnsembleObserver =
    std::function<void(int path, std::size_t record, const GridFunction& u1,
                       const GridFunction& u2)>;

// Coupled two-solution run recording the positive-part L1 gap per record.
inline GapEnsemble coupled_gap_ensemble(const Lab& lab, const GridFunction& u10,
                                        const GridFunction& u20, const SolverConfig& solver,
                                        int paths, int threads,
                                        const GapEnsembleObserver* extra = nullptr) {
    GapEnsemble ens;
    const int records = solver.steps() / solver.record_every + 1;
    ens.times.resize(static_cast<std::size_t>(records));
    for (int k = 0; k < records; ++k)
        ens.times[static_cast<std::size_t>(k)] = k * solver.record_every * solver.dt;
    ens.per_path.assign(static_cast<std::size_t>(paths),
                        std::vector<double>(static_cast<std::size_t>(records), 0.0));
    ens.diverged.assign(static_cast<std::size_t>(paths), 0);

    parallel_paths(paths, threads, [&](int p) {
        std::vector<GridFunction> us = {u10, u20};
        std::size_t idx = 0;
        auto observe = [&](int, double, const std::vector<GridFunction>& states) {
            if (idx < ens.per_path[static_cast<std::size_t>(p)].size()) {
                ens.per_path[static_cast<std::size_t>(p)][idx] =
                    positive_part_gap(states[0], states[1]);
                if (extra) (*extra)(p, idx, states[0], states[1]);
                ++idx;
            }
        };
        const auto status = integrate_coupled_observe(us, solver, lab.diffusion, &lab.noise,
                                                      lab.path(static_cast<std::uint64_t>(p)),
                                                      observe);
        if (status[0] == TrajectoryStatus::Diverged || status[1] == TrajectoryStatus::Diverged)
            ens.diverged[static_cast<std::size_t>(p)] = 1;
    });
    for (char d : ens.diverged) ens.divergence_count += d;
    return ens;
}

struct MeanCurve {
    std::vector<double> mean;
    std::vector<double> stderr_;
};

inline MeanCurve ensemble_mean_curve(const GapEnsemble& ens) {
    const std::size_t records = ens.times.size();
    MeanCurve mc;
    mc.mean.resize(records);
    mc.stderr_.resize(records);
    for (std::size_t k = 0; k < records; ++k) {
        std::vector<double> vals;
        for (std::size_t p = 0; p < ens.per_path.size(); ++p)
            if (!ens.diverged[p]) vals.push_back(ens.per_path[p][k]);
        const auto ms = mean_stderr(vals);
        mc.mean[k] = ms.mean;
        mc.stderr_[k] = ms.stderr_;
    }
    return mc;
}

inline Curve gap_curve(const GapEnsemble& ens, const MeanCurve& mc) {
    Curve c;
    c.name = "gap_l1";
    c.columns = {"t", "mean", "stderr"};
    for (std::size_t k = 0; k < ens.times.size(); ++k)
        c.rows.push_back({ens.times[k], mc.mean[k], mc.stderr_[k]});
    return c;
}

inline bool pathwise_ok(const std::vector<double>& gap, double slack) {
    for (std::size_t k = 0; k < gap.size(); ++k) {
        if (gap[k] > gap[0] + slack) return false;
        if (k + 1 < gap.size() && gap[k + 1] > gap[k] + slack) return false;
    }
    return true;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// L1 contraction: ensemble mean of ||(u1-u2)^+||_L1 must never exceed its
// initial value (up to scheme slack + 2 SE) and must be non-increasing; with
// additive noise the pathwise version must hold on >= 99% of paths.
inline ExperimentReport run_contraction(const Lab& lab, int threads) {
    detail::require_valid_diffusion(lab);
    ExperimentReport rep = lab.base_report("contract");
    const auto u10 = make_initial_data(lab.grid, lab.cfg.experiment_initial);
    const auto u20 = make_initial_data(lab.grid, lab.cfg.experiment_initial2);
    const int paths = static_cast<int>(lab.cfg.experiment_paths);
    const double slack = lab.slack();

    const auto ens = detail::coupled_gap_ensemble(lab, u10, u20, lab.solver, paths, threads);
    const auto mc = detail::ensemble_mean_curve(ens);
    rep.curves.push_back(detail::gap_curve(ens, mc));
    rep.diverged_paths = ens.divergence_count;

    const double div_frac = static_cast<double>(ens.divergence_count) / paths;
    rep.add_criterion("divergence_fraction", div_frac <= 0.01, div_frac, 0.01);

    const double gap0 = positive_part_gap(u10, u20);
    double worst_excess = -1e300;
    double worst_step = -1e300;
    for (std::size_t k = 0; k < mc.mean.size(); ++k) {
        worst_excess = std::max(worst_excess, mc.mean[k] - (gap0 + slack + 2.0 * mc.stderr_[k]));
        if (k + 1 < mc.mean.size())
            worst_step = std::max(worst_step, mc.mean[k + 1] - mc.mean[k] - slack -
                                                  2.0 * (mc.stderr_[k] + mc.stderr_[k + 1]));
    }
    rep.add_criterion("mean_gap_bounded", worst_excess <= 0.0, worst_excess, 0.0,
                      "max_t mean gap - (initial + slack + 2SE); slack = " +
                          std::to_string(slack));
    rep.add_criterion("mean_gap_monotone", worst_step <= 0.0, worst_step, 0.0,
                      "max_t one-step increase - (slack + 2SE)");

    if (lab.noise_spec.mode == NoiseMode::Additive) {
        int ok = 0, counted = 0;
        for (std::size_t p = 0; p < ens.per_path.size(); ++p) {
            if (ens.diverged[p]) continue;
            ++counted;
            if (detail::pathwise_ok(ens.per_path[p], slack)) ++ok;
        }
        const double frac = counted ? static_cast<double>(ok) / counted : 0.0;
        rep.add_criterion("pathwise_gap_fraction", frac >= 0.99, frac, 0.99,
                          "fraction of paths with non-increasing gap within slack");
    }
    return rep;
}

// Comparison principle: ordered initial data keep E||(u1-u2)^+|| below slack.
inline ExperimentReport run_comparison(const Lab& lab, int threads) {
    detail::require_valid_diffusion(lab);
    ExperimentReport rep = lab.base_report("compare");
    const auto u10 = make_initial_data(lab.grid, lab.cfg.experiment_initial);
    const auto u20 = make_initial_data(lab.grid, lab.cfg.experiment_initial2);
    for (int j = 0; j < u10.size(); ++j)
        if (u10[j] > u20[j])
            throw ConfigError("comparison experiment requires ordered initial data "
                              "(experiment.initial <= experiment.initial2 nodally)");
    const int paths = static_cast<int>(lab.cfg.experiment_paths);
    const double slack = lab.slack();

    const auto ens = detail::coupled_gap_ensemble(lab, u10, u20, lab.solver, paths, threads);
    const auto mc = detail::ensemble_mean_curve(ens);
    rep.curves.push_back(detail::gap_curve(ens, mc));
    rep.diverged_paths = ens.divergence_count;

    const double div_frac = static_cast<double>(ens.divergence_count) / paths;
    rep.add_criterion("divergence_fraction", div_frac <= 0.01, div_frac, 0.01);

    double worst = -1e300;
    for (double m : mc.mean) worst = std::max(worst, m);
    rep.add_criterion("ordered_gap_below_slack", worst <= slack, worst, slack,
                      "max_t E||(u1-u2)^+||_L1");
    return rep;
}

// ---------------------------------------------------------------------------
// Energy sweep: E sup_t ||u||_p^p across a sweep of initial sizes; the
// log-log slope against ||u0||_p^p must not exceed 1.1 and nothing may blow
// up. The dissipation functional is reported alongside.
inline ExperimentReport run_energy(const Lab& lab, int threads) {
    detail::require_valid_diffusion(lab);
    ExperimentReport rep = lab.base_report("energy");
    const auto p_list = lab.cfg.parse_list(lab.cfg.experiment_p_list);
    const auto sweep = lab.cfg.parse_list(lab.cfg.experiment_norm_sweep);
    const int paths = static_cast<int>(lab.cfg.experiment_paths);
    const auto base = make_initial_data(lab.grid, lab.cfg.experiment_initial);

    const double theta_cap = lab.diffusion.regime.kind == Regime::Kind::NonDegenerate
                                 ? 2.0 * lab.diffusion.regime.theta
                                 : 2.0 * lab.diffusion.regime.theta2;
    Curve sup_curve{"energy_sup", {"p", "u0_norm", "mean", "stderr"}, {}};
    Curve diss_curve{"energy_dissipation", {"p", "u0_norm", "mean", "stderr"}, {}};
    int diverged_total = 0;

    for (double p : p_list) {
        if (p < 1.0 || p > theta_cap)
            throw ConfigError("energy experiment: p must lie in [1, 2*theta] for the regime");
        std::vector<double> log_norm, log_sup;
        for (double target : sweep) {
            const auto u0 = scaled_to_lp(base, p, target);
            std::vector<double> sup_vals(static_cast<std::size_t>(paths), 0.0);
            std::vector<double> diss_vals(static_cast<std::size_t>(paths), 0.0);
            std::vector<char> div(static_cast<std::size_t>(paths), 0);
            parallel_paths(paths, threads, [&](int pp) {
                GridFunction u = u0;
                double sup_p = 0.0, diss = 0.0;
                const double stride_dt = lab.solver.dt * lab.solver.record_every;
                auto observe = [&](int, double, const GridFunction& state,
                                   const StepDiagnostics&) {
                    sup_p = std::max(sup_p, std::pow(norm_lp(state, p), p));
                    double s = 0.0;
                    for (int j = 0; j < state.size(); ++j) {
                        const double g = node_gradient(state, j);
                        s += std::pow(1.0 + state[j] * state[j], 0.5 * p - 1.0) *
                             lab.diffusion.b(state[j]) * g * g;
                    }
                    diss += s * lab.grid.h() * stride_dt;
                };
                const auto status = integrate_observe(
                    u, lab.solver, lab.diffusion, &lab.noise,
                    lab.path(static_cast<std::uint64_t>(pp)), observe);
                sup_vals[static_cast<std::size_t>(pp)] = sup_p;
                diss_vals[static_cast<std::size_t>(pp)] = diss;
                if (status == TrajectoryStatus::Diverged) div[static_cast<std::size_t>(pp)] = 1;
            });
            std::vector<double> sup_ok, diss_ok;
            for (int pp = 0; pp < paths; ++pp) {
                if (div[static_cast<std::size_t>(pp)]) {
                    ++diverged_total;
                    continue;
                }
                sup_ok.push_back(sup_vals[static_cast<std::size_t>(pp)]);
                diss_ok.push_back(diss_vals[static_cast<std::size_t>(pp)]);
            }
            const auto ms = mean_stderr(sup_ok);
            const auto md = mean_stderr(diss_ok);
            sup_curve.rows.push_back({p, target, ms.mean, ms.stderr_});
            diss_curve.rows.push_back({p, target, md.mean, md.stderr_});
            if (ms.mean > 0.0) {
                log_norm.push_back(std::log(std::pow(target, p)));
                log_sup.push_back(std::log(ms.mean));
            }
        }
        const double slope =
            log_norm.size() >= 2 ? fit_line(log_norm, log_sup).slope : 0.0;
        char name[32];
        std::snprintf(name, sizeof(name), "slope_p%g", p);
        rep.add_criterion(name, slope <= 1.1, slope, 1.1,
                          "log-log slope of E sup ||u||_p^p vs ||u0||_p^p");
    }
    rep.curves.push_back(sup_curve);
    rep.curves.push_back(diss_curve);
    rep.diverged_paths = diverged_total;
    rep.add_criterion("no_divergence", diverged_total == 0,
                      static_cast<double>(diverged_total), 0.0);
    return rep;
}

// ---------------------------------------------------------------------------
// Ergodic coupling: additive noise and bounded diffusion; the pathwise L1
// gap must be monotone and reach <= 1% of its initial value by T_long on at
// least 95% of paths. With multiplicative noise (out-of-scope probe) only
// the mean behavior is gated and the report is labeled accordingly.
inline ExperimentReport run_ergodic(const Lab& lab, int threads) {
    detail::require_valid_diffusion(lab);
    ExperimentReport rep = lab.base_report("ergodic");
    const auto u10 = make_initial_data(lab.grid, lab.cfg.experiment_initial);
    const auto u20 = make_initial_data(lab.grid, lab.cfg.experiment_initial2);
    const int paths = static_cast<int>(lab.cfg.experiment_paths);
    const double slack = lab.slack();
    const bool in_scope = lab.noise_spec.mode == NoiseMode::Additive;
    if (!in_scope) rep.labels["scope"] = "outside theorem scope: multiplicative noise";

    SolverConfig solver = lab.solver;
    solver.T = lab.cfg.experiment_t_long;

    // diagnostic only: the exponential H^-1 contraction of the coupled pair
    // rides along as a curve, never as a gate
    const int records = solver.steps() / solver.record_every + 1;
    std::vector<std::vector<double>> hminus(static_cast<std::size_t>(paths),
                                            std::vector<double>(static_cast<std::size_t>(records), 0.0));

    detail::GapEnsembleObserver extra = [&](int p, std::size_t record, const GridFunction& a,
                                            const GridFunction& b) {
        GridFunction d = a;
        for (int j = 0; j < d.size(); ++j) d[j] -= b[j];
        hminus[static_cast<std::size_t>(p)][record] = norm_hminus(d, 1.0);
    };
    const auto ens =
        detail::coupled_gap_ensemble(lab, u10, u20, solver, paths, threads, &extra);
    const auto mc = detail::ensemble_mean_curve(ens);
    rep.curves.push_back(detail::gap_curve(ens, mc));

    Curve hm{"gap_hminus1", {"t", "mean", "stderr"}, {}};
    for (std::size_t k = 0; k < ens.times.size(); ++k) {
        std::vector<double> vals;
        for (std::size_t p = 0; p < hminus.size(); ++p)
            if (!ens.diverged[p]) vals.push_back(hminus[p][k]);
        const auto ms = mean_stderr(vals);
        hm.rows.push_back({ens.times[k], ms.mean, ms.stderr_});
    }
    rep.curves.push_back(hm);
    rep.labels["gap_hminus1"] = "diagnostic curve, not a gate";

    rep.diverged_paths = ens.divergence_count;
    rep.add_criterion("no_divergence", ens.divergence_count == 0,
                      static_cast<double>(ens.divergence_count), 0.0);

    const double gap0 = positive_part_gap(u10, u20);
    double worst_step = -1e300;
    for (std::size_t k = 0; k + 1 < mc.mean.size(); ++k)
        worst_step = std::max(worst_step, mc.mean[k + 1] - mc.mean[k] - slack -
                                              2.0 * (mc.stderr_[k] + mc.stderr_[k + 1]));
    rep.add_criterion("mean_gap_monotone", worst_step <= 0.0, worst_step, 0.0);

    if (in_scope) {
        int reached = 0, monotone = 0, counted = 0;
        for (std::size_t p = 0; p < ens.per_path.size(); ++p) {
            if (ens.diverged[p]) continue;
            ++counted;
            if (ens.per_path[p].back() <= 0.01 * gap0) ++reached;
            if (detail::pathwise_ok(ens.per_path[p], slack)) ++monotone;
        }
        const double frac_reached = counted ? static_cast<double>(reached) / counted : 0.0;
        const double frac_monotone = counted ? static_cast<double>(monotone) / counted : 0.0;
        rep.add_criterion("terminal_gap_fraction", frac_reached >= 0.95, frac_reached, 0.95,
                          "fraction of paths with terminal gap <= 1% of initial");
        rep.add_criterion("pathwise_monotone_fraction", frac_monotone >= 1.0, frac_monotone,
                          1.0, "fraction of paths with gap non-increasing within slack");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Invariant measure via time averages: two initial data must produce the
// same long-run averages, and the H1 occupation tail must decay like R^-2.
inline ExperimentReport run_invariant(const Lab& lab, int threads) {
    detail::require_valid_diffusion(lab);
    if (lab.diffusion.regime.kind != Regime::Kind::NonDegenerate)
        throw ConfigError("invariant-measure experiment requires non-degenerate diffusion");

    // smallness gate: the measured growth slope of ||sigma(h)||_HS must stay
    // below sqrt(2 alpha1 b0)
    const auto growth = check_sublinear_growth(lab.noise, 0.0, 0.5, 1.0 + std::sqrt(lab.noise.D()),
                                               lab.diffusion.regime.b0);
    const double lambda_est = std::max(0.0, growth.lambda_estimate);
    if (lambda_est >= growth.gate_threshold)
        throw ConfigError(
            "noise growth gate failed: measured lambda " + std::to_string(lambda_est) +
            " is not below sqrt(2 alpha1 b0) = " + std::to_string(growth.gate_threshold) +
            "; the dissipation cannot dominate the noise input");

    ExperimentReport rep = lab.base_report("invariant");
    rep.labels["growth_lambda_estimate"] = std::to_string(lambda_est);
    rep.labels["growth_gate_threshold"] = std::to_string(growth.gate_threshold);

    const auto r_levels = lab.cfg.parse_list(lab.cfg.experiment_r_levels);
    const int paths = static_cast<int>(lab.cfg.experiment_paths);
    const int n_funcs = 4 + static_cast<int>(r_levels.size());
    SolverConfig solver = lab.solver;
    solver.T = lab.cfg.experiment_t_long;
    const int records = solver.steps() / solver.record_every + 1;
    const int burn_records =
        static_cast<int>(lab.cfg.experiment_burn_in * static_cast<double>(records));

    const std::string inits[2] = {lab.cfg.experiment_initial, lab.cfg.experiment_initial2};
    std::vector<std::vector<MeanStderr>> averages(2);
    Curve avg_curve{"invariant_averages", {"init", "functional", "mean", "stderr"}, {}};
    Curve occ_curve{"occupation", {"R", "init", "fraction", "stderr"}, {}};
    int diverged_total = 0;

    for (int e = 0; e < 2; ++e) {
        const auto u0 = make_initial_data(lab.grid, inits[e]);
        std::vector<std::vector<double>> path_avgs(
            static_cast<std::size_t>(paths),
            std::vector<double>(static_cast<std::size_t>(n_funcs), 0.0));
        std::vector<char> div(static_cast<std::size_t>(paths), 0);
        parallel_paths(paths, threads, [&](int p) {
            GridFunction u = u0;
            std::vector<double> acc(static_cast<std::size_t>(n_funcs), 0.0);
            int seen = 0, used = 0;
            auto observe = [&](int, double, const GridFunction& state, const StepDiagnostics& d) {
                if (seen++ < burn_records) return;
                ++used;
                acc[0] += d.l1;
                acc[1] += d.h * d.h;
                const auto modes = spectral_coefficients(state, 2);
                acc[2] += modes[0];
                acc[3] += modes[1];
                for (std::size_t r = 0; r < r_levels.size(); ++r)
                    acc[4 + r] += d.h1 > r_levels[r] ? 1.0 : 0.0;
            };
            const auto status = integrate_observe(
                u, solver, lab.diffusion, &lab.noise,
                lab.path(static_cast<std::uint64_t>(p) + (e ? 0x80000000ull : 0ull)), observe);
            if (status == TrajectoryStatus::Diverged) {
                div[static_cast<std::size_t>(p)] = 1;
                return;
            }
            for (int f = 0; f < n_funcs; ++f)
                path_avgs[static_cast<std::size_t>(p)][static_cast<std::size_t>(f)] =
                    acc[static_cast<std::size_t>(f)] / std::max(1, used);
        });
        averages[static_cast<std::size_t>(e)].resize(static_cast<std::size_t>(n_funcs));
        for (int f = 0; f < n_funcs; ++f) {
            std::vector<double> vals;
            for (int p = 0; p < paths; ++p)
                if (!div[static_cast<std::size_t>(p)])
                    vals.push_back(path_avgs[static_cast<std::size_t>(p)][static_cast<std::size_t>(f)]);
            averages[static_cast<std::size_t>(e)][static_cast<std::size_t>(f)] = mean_stderr(vals);
            avg_curve.rows.push_back({static_cast<double>(e), static_cast<double>(f),
                                      averages[static_cast<std::size_t>(e)][static_cast<std::size_t>(f)].mean,
                                      averages[static_cast<std::size_t>(e)][static_cast<std::size_t>(f)].stderr_});
        }
        for (std::size_t r = 0; r < r_levels.size(); ++r)
            occ_curve.rows.push_back(
                {r_levels[r], static_cast<double>(e),
                 averages[static_cast<std::size_t>(e)][4 + r].mean,
                 averages[static_cast<std::size_t>(e)][4 + r].stderr_});
        for (char d : div) diverged_total += d;
    }
    rep.curves.push_back(avg_curve);
    rep.curves.push_back(occ_curve);
    rep.diverged_paths = diverged_total;
    rep.labels["functionals"] = "l1,h_sq,mode1,mode2,occupation(R_levels)";
    rep.add_criterion("no_divergence", diverged_total == 0,
                      static_cast<double>(diverged_total), 0.0);

    const char* func_names[4] = {"l1", "h_sq", "mode1", "mode2"};
    for (int f = 0; f < 4; ++f) {
        const auto& a = averages[0][static_cast<std::size_t>(f)];
        const auto& b = averages[1][static_cast<std::size_t>(f)];
        const double diff = std::abs(a.mean - b.mean);
        const double tol = 3.0 * std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
        rep.add_criterion(std::string("agree_") + func_names[f], diff <= tol, diff, tol,
                          "|avg(init A) - avg(init B)|, 3 combined SE");
    }
    for (std::size_t r = 0; r < r_levels.size(); ++r) {
        const auto& a = averages[0][4 + r];
        const auto& b = averages[1][4 + r];
        const double diff = std::abs(a.mean - b.mean);
        const double tol = 3.0 * std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
        char name[32];
        std::snprintf(name, sizeof(name), "agree_occ_R%g", r_levels[r]);
        rep.add_criterion(name, diff <= tol, diff, tol);
    }

    // occupation tail: pooled fraction vs R in log-log
    std::vector<double> lx, ly;
    for (std::size_t r = 0; r < r_levels.size(); ++r) {
        const double pooled = 0.5 * (averages[0][4 + r].mean + averages[1][4 + r].mean);
        if (pooled > 0.0) {
            lx.push_back(std::log(r_levels[r]));
            ly.push_back(std::log(pooled));
        }
    }
    if (lx.size() >= 3) {
        const double slope = fit_line(lx, ly).slope;
        rep.add_criterion("occupation_slope", slope <= -1.5, slope, -1.5,
                          "log-log slope of P(||u||_H1 > R) vs R");
    } else {
        rep.add_criterion("occupation_slope", false, 0.0, -1.5,
                          "insufficient nonzero occupation levels for a fit");
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Irreducibility probe: joint simulation of u^z and the stochastic
// convolution W_A on the same path; small recorded noise should predict a
// small terminal state.
inline ExperimentReport run_irreducibility(const Lab& lab, int threads) {
    detail::require_valid_diffusion(lab);
    ExperimentReport rep = lab.base_report("irreducible");
    const int paths = static_cast<int>(lab.cfg.experiment_paths);
    const double eps_target = lab.cfg.experiment_epsilon_target;
    const double m_ball = lab.cfg.experiment_ball_radius;
    const auto base = make_initial_data(lab.grid, lab.cfg.experiment_initial);
    const DiffusionSpec unit = make_constant(1.0);

    std::vector<double> sup_wa(static_cast<std::size_t>(paths), 0.0);
    std::vector<double> terminal(static_cast<std::size_t>(paths), 0.0);
    std::vector<char> div(static_cast<std::size_t>(paths), 0);

    parallel_paths(paths, threads, [&](int p) {
        // sweep ||z||_H over {1/4, 1/2, 3/4, 1} * M_ball
        const double mag = m_ball * static_cast<double>((p % 4) + 1) / 4.0;
        GridFunction z = base;
        const double nh = norm_h(base);
        for (int j = 0; j < z.size(); ++j) z[j] *= mag / nh;
        GridFunction w(lab.grid);

        Stepper stepper_u(lab.grid, lab.solver, lab.diffusion, -4.0 * m_ball, 4.0 * m_ball);
        Stepper stepper_w(lab.grid, lab.solver, unit);
        const auto path = lab.path(static_cast<std::uint64_t>(p));
        std::vector<double> mixed;
        double sup = norm_h1(w);
        const int steps = lab.solver.steps();
        for (int n = 0; n < steps; ++n) {
            lab.noise.mix(path, static_cast<std::uint64_t>(n), mixed);
            if (!stepper_u.step(z, &mixed) || !stepper_w.step(w, &mixed)) {
                div[static_cast<std::size_t>(p)] = 1;
                return;
            }
            sup = std::max(sup, norm_h1(w));
        }
        sup_wa[static_cast<std::size_t>(p)] = sup;
        terminal[static_cast<std::size_t>(p)] = norm_h(z);
    });

    Curve scatter{"irreducibility_scatter", {"sup_wa_h1", "terminal_h"}, {}};
    std::vector<double> xs, ind;
    int below = 0, counted = 0;
    for (int p = 0; p < paths; ++p) {
        if (div[static_cast<std::size_t>(p)]) continue;
        ++counted;
        scatter.rows.push_back({sup_wa[static_cast<std::size_t>(p)], terminal[static_cast<std::size_t>(p)]});
        xs.push_back(sup_wa[static_cast<std::size_t>(p)]);
        const bool hit = terminal[static_cast<std::size_t>(p)] < eps_target;
        ind.push_back(hit ? 1.0 : 0.0);
        below += hit ? 1 : 0;
    }
    rep.curves.push_back(scatter);
    rep.diverged_paths = paths - counted;

    const double frac = counted ? static_cast<double>(below) / counted : 0.0;
    rep.add_criterion("positive_fraction", frac > 0.0, frac, 0.0,
                      "fraction of paths with ||u(T)||_H < epsilon_target");

    if (counted >= 10 && below > 0 && below < counted) {
        const auto rc = spearman(xs, ind);
        rep.add_criterion("noise_size_anticorrelation",
                          rc.rho < 0.0 && rc.p_one_sided_negative < 0.01, rc.rho, 0.0,
                          "Spearman rho of (sup||W_A||_H1, hit indicator); p = " +
                              std::to_string(rc.p_one_sided_negative));
    } else {
        rep.add_criterion("noise_size_anticorrelation", false, 0.0, 0.0,
                          "degenerate indicator split; adjust epsilon_target");
    }

    // conditional hit probability by noise-size quantile
    std::vector<std::size_t> order(xs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    Curve cond{"conditional_hit", {"sup_wa_quantile", "hit_probability", "count"}, {}};
    for (double q : {0.1, 0.25, 0.5, 0.75, 1.0}) {
        const std::size_t m = std::max<std::size_t>(1, static_cast<std::size_t>(q * order.size()));
        double hits = 0.0;
        for (std::size_t i = 0; i < m; ++i) hits += ind[order[i]];
        cond.rows.push_back({q, hits / static_cast<double>(m), static_cast<double>(m)});
    }
    rep.curves.push_back(cond);
    return rep;
}

// ---------------------------------------------------------------------------
// Finite-time ball entry: K0 is measured from pilot windows (K0 = 4 c0hat),
// then every path must realize the third entry time before the horizon.
inline ExperimentReport run_ball_entry(const Lab& lab, int threads) {
    detail::require_valid_diffusion(lab);
    ExperimentReport rep = lab.base_report("ball-entry");
    const auto u10 = make_initial_data(lab.grid, lab.cfg.experiment_initial);
    const auto u20 = make_initial_data(lab.grid, lab.cfg.experiment_initial2);
    const int paths = static_cast<int>(lab.cfg.experiment_paths);
    const double spacing = lab.cfg.experiment_entry_spacing;
    const double horizon = lab.cfg.experiment_horizon;

    // pilot: measured constant c0hat in the window bound
    //   int_t^{t+T} (||u1||^2 + ||u2||^2) ds <= c0 (||u1(t)||^2 + ||u2(t)||^2 + T)
    double c0hat = 0.0;
    {
        SolverConfig pilot = lab.solver;
        pilot.T = std::max(6.0 * spacing, 4.0);
        const int window = std::max(1, static_cast<int>(std::llround(
                                           spacing / (pilot.dt * pilot.record_every))));
        for (std::uint64_t pp = 0; pp < 4; ++pp) {
            std::vector<GridFunction> us = {u10, u20};
            std::vector<double> vals;
            auto observe = [&](int, double, const std::vector<GridFunction>& states) {
                const double a = norm_h(states[0]), b = norm_h(states[1]);
                vals.push_back(a * a + b * b);
            };
            integrate_coupled_observe(us, pilot, lab.diffusion, &lab.noise,
                                      lab.path(0xC0000000ull + pp), observe);
            const double rec_dt = pilot.dt * pilot.record_every;
            for (std::size_t s = 0; s + static_cast<std::size_t>(window) < vals.size(); ++s) {
                double integral = 0.0;
                for (int k = 0; k < window; ++k) integral += vals[s + static_cast<std::size_t>(k)] * rec_dt;
                c0hat = std::max(c0hat, integral / (vals[s] + spacing));
            }
        }
    }
    const double K0 = 4.0 * c0hat;
    rep.labels["c0hat"] = std::to_string(c0hat);
    rep.labels["K0"] = std::to_string(K0);

    SolverConfig solver = lab.solver;
    solver.T = horizon;
    std::vector<std::array<double, 3>> taus(static_cast<std::size_t>(paths),
                                            {horizon + 1.0, horizon + 1.0, horizon + 1.0});
    std::vector<char> div(static_cast<std::size_t>(paths), 0);
    parallel_paths(paths, threads, [&](int p) {
        std::vector<GridFunction> us = {u10, u20};
        int level = 0;
        double gate_time = 0.0;  // tau_{l-1} + spacing
        auto observe = [&](int, double t, const std::vector<GridFunction>& states) {
            if (level >= 3 || t < gate_time) return;
            const double a = norm_h(states[0]), b = norm_h(states[1]);
            if (a * a + b * b <= K0) {
                taus[static_cast<std::size_t>(p)][static_cast<std::size_t>(level)] = t;
                gate_time = t + spacing;
                ++level;
            }
        };
        const auto status = integrate_coupled_observe(us, solver, lab.diffusion, &lab.noise,
                                                      lab.path(static_cast<std::uint64_t>(p)),
                                                      observe);
        if (status[0] == TrajectoryStatus::Diverged || status[1] == TrajectoryStatus::Diverged)
            div[static_cast<std::size_t>(p)] = 1;
    });

    Curve times{"entry_times", {"path", "tau1", "tau2", "tau3"}, {}};
    int entered = 0, diverged = 0;
    for (int p = 0; p < paths; ++p) {
        if (div[static_cast<std::size_t>(p)]) {
            ++diverged;
            continue;
        }
        const auto& t = taus[static_cast<std::size_t>(p)];
        times.rows.push_back({static_cast<double>(p), t[0], t[1], t[2]});
        if (t[2] <= horizon) ++entered;
    }
    rep.curves.push_back(times);
    rep.diverged_paths = diverged;
    rep.add_criterion("no_divergence", diverged == 0, static_cast<double>(diverged), 0.0);
    const double frac = paths > 0 ? static_cast<double>(entered) / (paths - diverged) : 0.0;
    rep.add_criterion("all_paths_enter", frac >= 1.0, frac, 1.0,
                      "fraction of paths with tau_3 < horizon; K0 = " + std::to_string(K0));
    return rep;
}

// ---------------------------------------------------------------------------
// Kinetic diagnostics: dyadic tail decay of the dissipation measure, and the
// moment-growth sweep of the band-limited mass against ||u0||_L1.
inline ExperimentReport run_kinetic(const Lab& lab, int threads) {
    detail::require_valid_diffusion(lab);
    ExperimentReport rep = lab.base_report("kinetic");
    const int paths = static_cast<int>(lab.cfg.experiment_paths);
    const auto u0 = make_initial_data(lab.grid, lab.cfg.experiment_initial);
    SolverConfig solver = lab.solver;
    solver.record_every = 1;  // deposits are per step

    // pilot for the bin range
    double range = 1.0;
    {
        GridFunction u = u0;
        double m = 0.0;
        auto observe = [&](int, double, const GridFunction& state, const StepDiagnostics&) {
            for (int j = 0; j < state.size(); ++j) m = std::max(m, std::abs(state[j]));
        };
        SolverConfig pilot = solver;
        pilot.record_every = 20;
        integrate_observe(u, pilot, lab.diffusion, &lab.noise, lab.path(0xD0000000ull), observe);
        range = 2.0 * m + 1.0;
    }

    const int nbins = static_cast<int>(lab.cfg.experiment_nbins);
    std::vector<KineticHistogram> ensemble(
        static_cast<std::size_t>(paths), KineticHistogram(-range, range, nbins));
    std::vector<std::vector<double>> abs_samples(static_cast<std::size_t>(paths));
    std::vector<char> div(static_cast<std::size_t>(paths), 0);
    const double tau = solver.regularization == Regularization::Viscous ? solver.tau : 0.0;

    parallel_paths(paths, threads, [&](int p) {
        GridFunction u = u0;
        RegularizedCoefficient coef(lab.diffusion, solver, -range, range);
        auto& histo = ensemble[static_cast<std::size_t>(p)];
        auto& samples = abs_samples[static_cast<std::size_t>(p)];
        int step_count = 0;
        auto observe = [&](int step, double, const GridFunction& state, const StepDiagnostics&) {
            if (step == 0) return;
            const double h = lab.grid.h();
            for (int j = 0; j < state.size(); ++j) {
                const double g = node_gradient(state, j);
                const double g2 = g * g * h * solver.dt;
                histo.deposit(state[j], coef.n1_coefficient(state[j]) * g2, tau * g2);
            }
            if (++step_count % 50 == 0)
                for (int j = 0; j < state.size(); j += 7) samples.push_back(std::abs(state[j]));
        };
        const auto status = integrate_observe(u, solver, lab.diffusion, &lab.noise,
                                              lab.path(static_cast<std::uint64_t>(p)), observe);
        if (status == TrajectoryStatus::Diverged) div[static_cast<std::size_t>(p)] = 1;
    });

    std::vector<double> pooled;
    KineticHistogram mean_histo(-range, range, nbins);
    int diverged = 0;
    std::vector<const KineticHistogram*> ok;
    for (int p = 0; p < paths; ++p) {
        if (div[static_cast<std::size_t>(p)]) {
            ++diverged;
            continue;
        }
        mean_histo.merge(ensemble[static_cast<std::size_t>(p)]);
        ok.push_back(&ensemble[static_cast<std::size_t>(p)]);
        for (double v : abs_samples[static_cast<std::size_t>(p)]) pooled.push_back(v);
    }
    rep.diverged_paths = diverged;
    rep.add_criterion("no_divergence", diverged == 0, static_cast<double>(diverged), 0.0);
    if (ok.empty() || pooled.empty()) {
        rep.add_criterion("dyadic_monotone", false, 0.0, 0.0, "no completed paths");
        return rep;
    }

    const double p99 = percentile(pooled, 0.99);
    const int l0 = static_cast<int>(std::ceil(std::log2(std::max(p99, 1e-6))));
    const double mean_total = mean_histo.total / static_cast<double>(ok.size());
    rep.labels["p99_abs_u"] = std::to_string(p99);
    rep.labels["l0"] = std::to_string(l0);

    Curve dyadic{"dyadic_decay", {"l", "mean", "stderr"}, {}};
    std::vector<double> band_means;
    for (int l = l0 - 4; l <= l0 + 6; ++l) {
        std::vector<double> vals;
        for (const auto* h : ok) vals.push_back(dyadic_decay(*h, l));
        const auto ms = mean_stderr(vals);
        dyadic.rows.push_back({static_cast<double>(l), ms.mean, ms.stderr_});
        if (l >= l0) band_means.push_back(ms.mean);
    }
    rep.curves.push_back(dyadic);

    double worst_increase = -1e300;
    for (std::size_t k = 0; k + 1 < band_means.size(); ++k)
        worst_increase = std::max(worst_increase, band_means[k + 1] - band_means[k]);
    rep.add_criterion("dyadic_monotone", worst_increase <= 1e-15, worst_increase, 0.0,
                      "max band-to-band increase of 2^-l m(A_l) beyond the 99th percentile");
    const double tail = band_means.size() > 3 ? band_means[3] : 0.0;
    rep.add_criterion("dyadic_tail_small", tail <= 1e-6 * mean_total, tail,
                      1e-6 * mean_total, "2^-l m(A_l) three bands past the bulk");

    // moment sweep of band-limited mass vs ||u0||_L1
    const auto sweep = lab.cfg.parse_list(lab.cfg.experiment_norm_sweep);
    if (sweep.size() >= 3) {
        const double k_cut = lab.cfg.experiment_cutoff_k;
        const double moment_p = lab.cfg.experiment_moment_p;
        std::vector<double> lx, ly;
        Curve moments{"mass_moments", {"u0_l1", "moment", "stderr"}, {}};
        const int sweep_paths = std::max(8, paths / 4);
        for (double target : sweep) {
            const auto scaled = scaled_to_lp(u0, 1.0, target);
            std::vector<KineticHistogram> hs(static_cast<std::size_t>(sweep_paths),
                                             KineticHistogram(-32.0 * range, 32.0 * range, nbins));
            parallel_paths(sweep_paths, threads, [&](int p) {
                GridFunction u = scaled;
                RegularizedCoefficient coef(lab.diffusion, solver, -32.0 * range, 32.0 * range);
                auto& histo = hs[static_cast<std::size_t>(p)];
                auto observe = [&](int step, double, const GridFunction& state,
                                   const StepDiagnostics&) {
                    if (step == 0) return;
                    for (int j = 0; j < state.size(); ++j) {
                        const double g = node_gradient(state, j);
                        const double g2 = g * g * lab.grid.h() * solver.dt;
                        histo.deposit(state[j], coef.n1_coefficient(state[j]) * g2, tau * g2);
                    }
                };
                integrate_observe(u, solver, lab.diffusion, &lab.noise,
                                  lab.path(0xE0000000ull + static_cast<std::uint64_t>(p)),
                                  observe);
            });
            const auto ms = measure_bound_report(hs, k_cut, moment_p);
            moments.rows.push_back({target, ms.mean, ms.stderr_});
            if (ms.mean > 0.0) {
                lx.push_back(std::log(target));
                ly.push_back(std::log(ms.mean));
            }
        }
        rep.curves.push_back(moments);
        if (lx.size() >= 3) {
            const double slope = fit_line(lx, ly).slope;
            rep.add_criterion("moment_growth_slope", slope <= moment_p + 0.5, slope,
                              moment_p + 0.5,
                              "log-log slope of E m([-k,k])^p vs ||u0||_L1");
        }
    }

    Curve histo_curve{"kinetic_histogram", {"bin_lo", "bin_hi", "mass"}, {}};
    const double w = (mean_histo.hi - mean_histo.lo) / mean_histo.nbins;
    for (int i = 0; i < mean_histo.nbins; ++i)
        histo_curve.rows.push_back({mean_histo.lo + i * w, mean_histo.lo + (i + 1) * w,
                                    mean_histo.mass[static_cast<std::size_t>(i)] /
                                        static_cast<double>(ok.size())});
    rep.curves.push_back(histo_curve);

    const double npaths = static_cast<double>(ok.size());
    rep.extra["total_mass"] = mean_histo.total / npaths;
    rep.extra["n1_mass"] = mean_histo.n1_total / npaths;
    rep.extra["n2_mass"] = mean_histo.n2_total / npaths;
    nlohmann::json bands;
    for (const auto& [l, m] : mean_histo.bands)
        bands[std::to_string(l)] = m / npaths;
    rep.extra["band_mass"] = bands;
    rep.extra["moment_p"] = lab.cfg.experiment_moment_p;
    rep.extra["cutoff_k"] = lab.cfg.experiment_cutoff_k;
    double band_moment = 0.0;
    for (const auto* h : ok)
        band_moment += std::pow(h->mass_within(lab.cfg.experiment_cutoff_k),
                                lab.cfg.experiment_moment_p);
    rep.extra["band_limited_moment"] = band_moment / npaths;
    return rep;
}

// ---------------------------------------------------------------------------
// Validation suite: hypothesis checks for the configured diffusion and noise.
inline ExperimentReport run_validate(const Lab& lab) {
    ExperimentReport rep = lab.base_report("validate");
    const auto hyp = validate_hypotheses(lab.diffusion, 8.0, 4000);
    rep.add_criterion("diffusion_positivity", hyp.positivity_ok, hyp.positivity_ok ? 1 : 0, 1);
    rep.add_criterion("diffusion_growth", hyp.growth_ok,
                      static_cast<double>(hyp.growth_violations), 0.0);
    rep.add_criterion("sqrt_b_holder", hyp.holder_ok, hyp.holder_scale_slope, -0.05,
                      "scale slope of the empirical Holder constant; constant = " +
                          std::to_string(hyp.holder_constant));

    const auto lip = check_lipschitz(lab.noise, 4000);
    rep.add_criterion("noise_lipschitz", lip.ok, lip.worst_ratio, 1.0);

    double worst_sq = 0.0;
    const double D = lab.noise.D();
    for (int j = 0; j < lab.grid.n_interior(); j += 3)
        for (double xi : {-8.0, -2.0, -0.5, 0.0, 0.5, 2.0, 8.0})
            worst_sq = std::max(worst_sq, lab.noise.sigma_sq(j, xi) / (D * (1.0 + xi * xi)));
    rep.add_criterion("sigma_sq_bound", worst_sq <= 1.0, worst_sq, 1.0,
                      "max Sigma^2 / (D (1+xi^2)) over sampled nodes and states");

    const double b0 = lab.diffusion.regime.kind == Regime::Kind::NonDegenerate
                          ? lab.diffusion.regime.b0
                          : 0.0;
    if (b0 > 0.0) {
        const auto growth =
            check_sublinear_growth(lab.noise, 0.0, 0.5, 1.0 + std::sqrt(D), b0);
        rep.add_criterion("noise_growth_gate",
                          std::max(0.0, growth.lambda_estimate) < growth.gate_threshold,
                          growth.lambda_estimate, growth.gate_threshold,
                          "measured HS-norm slope vs sqrt(2 alpha1 b0)");
    }
    if (lab.diffusion.regime.kind == Regime::Kind::Degenerate) {
        std::vector<double> deltas;
        for (int k = 4; k <= 9; ++k) deltas.push_back(std::pow(2.0, -k));
        const auto fit = symbol_decay_fit(lab.diffusion, -1.0, 1.0, 8.0, deltas, 100000);
        rep.add_criterion("symbol_decay_exponent",
                          std::abs(fit.fitted_exponent - fit.reference_exponent) <=
                              0.15 * fit.reference_exponent,
                          fit.fitted_exponent, fit.reference_exponent,
                          "fitted omega(delta) exponent vs 1/(theta1 - 1)");
    }
    rep.labels["noise_D"] = std::to_string(D);
    rep.labels["noise_truncation_tail"] = std::to_string(lab.noise.truncation_tail());
    return rep;
}

// ---------------------------------------------------------------------------
// Boundary-layer profiles: (x, zeta_delta) per delta plus the flux-limit
// rows; gates are the structural properties of the discrete solution.
inline ExperimentReport run_boundary_layer(const Lab& lab) {
    ExperimentReport rep = lab.base_report("boundary-layer");
    const auto deltas = lab.cfg.parse_list(lab.cfg.experiment_delta_list);
    Curve profile{"zeta_profiles", {"delta", "x", "zeta", "closed_form"}, {}};
    double worst_residual = 0.0, worst_box = 0.0, worst_concavity = -1e300, worst_err_ratio = 0.0;
    for (double d : deltas) {
        const auto bl = solve_zeta(lab.grid, d);
        worst_residual = std::max(worst_residual, bl.residual);
        const double inv_h2 = 1.0 / (lab.grid.h() * lab.grid.h());
        double err = 0.0;
        for (int j = 0; j < lab.grid.n_interior(); ++j) {
            const double x = lab.grid.node(j);
            const double cf = zeta_closed_form(x, lab.grid.length(), d);
            profile.rows.push_back({d, x, bl.zeta[j], cf});
            err = std::max(err, std::abs(bl.zeta[j] - cf));
            worst_box = std::max({worst_box, -bl.zeta[j], bl.zeta[j] - 1.0});
            const double left = j > 0 ? bl.zeta[j - 1] : 0.0;
            const double right = j + 1 < lab.grid.n_interior() ? bl.zeta[j + 1] : 0.0;
            worst_concavity =
                std::max(worst_concavity, (left - 2.0 * bl.zeta[j] + right) * inv_h2);
        }
        worst_err_ratio = std::max(worst_err_ratio, err / (lab.grid.h() * lab.grid.h()));
    }
    rep.curves.push_back(profile);

    const auto flux = flux_limit_check(lab.grid, [](double x) { return x; }, deltas);
    Curve flux_curve{"flux_limit", {"delta", "integral", "target"}, {}};
    for (const auto& row : flux.rows)
        flux_curve.rows.push_back({row.delta, row.integral, flux.boundary_target});
    rep.curves.push_back(flux_curve);

    rep.add_criterion("solve_residual", worst_residual <= 1e-12, worst_residual, 1e-12);
    rep.add_criterion("box_bounds", worst_box <= 1e-12, worst_box, 0.0, "max violation of 0 <= zeta <= 1");
    rep.add_criterion("concavity", worst_concavity <= 1e-12, worst_concavity, 0.0,
                      "max nodal discrete Laplacian of zeta");
    rep.labels["max_error_over_h2"] = std::to_string(worst_err_ratio);
    return rep;
}

// ---------------------------------------------------------------------------
inline ExperimentReport run_experiment(const RunConfig& cfg, int threads) {
    Lab lab(cfg);
    const std::string& kind = cfg.experiment_kind;
    if (kind == "contract") return run_contraction(lab, threads);
    if (kind == "compare") return run_comparison(lab, threads);
    if (kind == "energy") return run_energy(lab, threads);
    if (kind == "ergodic") return run_ergodic(lab, threads);
    if (kind == "invariant") return run_invariant(lab, threads);
    if (kind == "irreducible") return run_irreducibility(lab, threads);
    if (kind == "ball-entry") return run_ball_entry(lab, threads);
    if (kind == "kinetic") return run_kinetic(lab, threads);
    if (kind == "validate") return run_validate(lab);
    if (kind == "boundary-layer") return run_boundary_layer(lab);
    throw ConfigError("unknown experiment kind '" + kind + "'");
}

}  // namespace spde
