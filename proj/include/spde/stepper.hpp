#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

#include "spde/diffusion.hpp"
#include "spde/grid.hpp"
#include "spde/noise.hpp"
#include "spde/tridiag.hpp"

namespace spde {

enum class Scheme { LinearizedImplicit, Explicit };
enum class Regularization { None, Yosida, Viscous };
enum class FaceMean { Arithmetic, Harmonic };

struct SolverConfig {
    double dt = 1e-4;
    double T = 1.0;
    Scheme scheme = Scheme::LinearizedImplicit;
    Regularization regularization = Regularization::None;
    double epsilon = 0.01;        // Yosida parameter
    double tau = 0.01;            // viscous shift
    double clip_threshold = 1e8;  // divergence detector
    int record_every = 1;
    FaceMean face_mean = FaceMean::Arithmetic;
    bool use_yosida_table = true;
    bool track_weak_residual = false;

    int steps() const {
        if (!(dt > 0.0)) throw std::invalid_argument("solver: dt must be positive");
        return static_cast<int>(std::llround(T / dt));
    }
};

// The coefficient actually fed to the face stencil: b, b_eps, or b + tau.
class RegularizedCoefficient {
public:
    RegularizedCoefficient(const DiffusionSpec& spec, const SolverConfig& cfg,
                           double table_lo = -16.0, double table_hi = 16.0)
        : spec_(&spec), reg_(cfg.regularization), tau_(cfg.tau) {
        if (reg_ == Regularization::Yosida) {
            yosida_.emplace(spec, cfg.epsilon);
            if (cfg.use_yosida_table) {
                table_.emplace(*yosida_, table_lo, table_hi);
                if (table_->max_validation_error() > 1e-6) table_.reset();  // exact fallback
            }
        }
    }

    double operator()(double r) const {
        switch (reg_) {
            case Regularization::None: return spec_->b(r);
            case Regularization::Viscous: return spec_->b(r) + tau_;
            case Regularization::Yosida:
                return table_ ? (*table_)(r) : yosida_->b_eps(r);
        }
        return spec_->b(r);
    }

    // Coefficient entering the parabolic dissipation deposit n1; for the
    // viscous mode the tau part is booked separately as n2.
    double n1_coefficient(double r) const {
        if (reg_ == Regularization::Viscous) return spec_->b(r);
        return (*this)(r);
    }

    double n2_tau() const { return reg_ == Regularization::Viscous ? tau_ : 0.0; }
    const DiffusionSpec& spec() const { return *spec_; }

private:
    const DiffusionSpec* spec_;
    Regularization reg_;
    double tau_;
    std::optional<YosidaRegularizer> yosida_;
    std::optional<YosidaTable> table_;
};

struct StepDiagnostics {
    double t = 0.0;
    double l1 = 0.0;
    double h = 0.0;
    double h1 = 0.0;
    double dissipation = 0.0;  // sum over faces a_face |grad u|^2, post-step state
};

enum class TrajectoryStatus { Completed, Diverged };

struct Trajectory {
    std::vector<double> times;
    std::vector<GridFunction> snapshots;
    std::vector<StepDiagnostics> diagnostics;  // aligned with snapshots
    TrajectoryStatus status = TrajectoryStatus::Completed;
    int diverged_step = -1;
    double max_h1 = 0.0;            // running max of ||u||_H1 over all steps
    double weak_residual = 0.0;     // filled when cfg.track_weak_residual
    std::uint64_t path_id = 0;
};

namespace detail {

inline double face_mean_value(FaceMean fm, double a, double b) {
    if (fm == FaceMean::Arithmetic) return 0.5 * (a + b);
    return (a > 0.0 && b > 0.0) ? 2.0 * a * b / (a + b) : 0.0;
}

}  // namespace detail

// One integration engine instance per trajectory; owns the scratch buffers
// so the hot loop does no allocation.
class Stepper {
public:
    Stepper(const Grid& grid, const SolverConfig& cfg, const DiffusionSpec& spec,
            double coef_table_lo = -16.0, double coef_table_hi = 16.0)
        : grid_(&grid),
          cfg_(cfg),
          coef_(spec, cfg, coef_table_lo, coef_table_hi),
          n_(grid.n_interior()),
          inv_h2_(1.0 / (grid.h() * grid.h())) {
        faces_.resize(static_cast<std::size_t>(n_) + 1);
        coef_node_.resize(static_cast<std::size_t>(n_));
        lower_.resize(static_cast<std::size_t>(n_) - 1);
        diag_.resize(static_cast<std::size_t>(n_));
        upper_.resize(static_cast<std::size_t>(n_) - 1);
        rhs_.resize(static_cast<std::size_t>(n_));
        coef_boundary_ = coef_(0.0);
    }

    const RegularizedCoefficient& coefficient() const { return coef_; }
    const SolverConfig& config() const { return cfg_; }

    // Advance u by one step with the supplied noise increment (may be empty
    // for sigma = 0). Returns false on divergence; u is left untouched then.
    bool step(GridFunction& u, const std::vector<double>* increment) {
        build_faces(u);
        if (cfg_.scheme == Scheme::Explicit) {
            double max_face = 0.0;
            for (double a : faces_) max_face = std::max(max_face, a);
            if (cfg_.dt * max_face * inv_h2_ > 0.5) return false;  // CFL guard
            for (int j = 0; j < n_; ++j) {
                const double left = (j > 0) ? u[j - 1] : 0.0;
                const double right = (j + 1 < n_) ? u[j + 1] : 0.0;
                const double lap = (faces_[static_cast<std::size_t>(j) + 1] * (right - u[j]) -
                                    faces_[static_cast<std::size_t>(j)] * (u[j] - left)) *
                                   inv_h2_;
                rhs_[static_cast<std::size_t>(j)] =
                    u[j] + cfg_.dt * lap +
                    (increment ? (*increment)[static_cast<std::size_t>(j)] : 0.0);
            }
            for (int j = 0; j < n_; ++j) {
                if (!std::isfinite(rhs_[static_cast<std::size_t>(j)]) ||
                    std::abs(rhs_[static_cast<std::size_t>(j)]) > cfg_.clip_threshold)
                    return false;
            }
            for (int j = 0; j < n_; ++j) u[j] = rhs_[static_cast<std::size_t>(j)];
            return true;
        }

        // (I - dt L_a) u' = u + increment, solved as a tridiagonal system
        const double r = cfg_.dt * inv_h2_;
        for (int j = 0; j < n_; ++j) {
            diag_[static_cast<std::size_t>(j)] =
                1.0 + r * (faces_[static_cast<std::size_t>(j)] +
                           faces_[static_cast<std::size_t>(j) + 1]);
            rhs_[static_cast<std::size_t>(j)] =
                u[j] + (increment ? (*increment)[static_cast<std::size_t>(j)] : 0.0);
        }
        for (int j = 0; j + 1 < n_; ++j) {
            const double c = -r * faces_[static_cast<std::size_t>(j) + 1];
            lower_[static_cast<std::size_t>(j)] = c;
            upper_[static_cast<std::size_t>(j)] = c;
        }
        solve_tridiagonal(lower_, diag_, upper_, rhs_, solution_, scratch_);
        for (int j = 0; j < n_; ++j) {
            const double val = solution_[static_cast<std::size_t>(j)];
            if (!std::isfinite(val) || std::abs(val) > cfg_.clip_threshold) return false;
        }
        for (int j = 0; j < n_; ++j) u[j] = solution_[static_cast<std::size_t>(j)];
        return true;
    }

    // Face dissipation of the current state against the coefficients of the
    // step that produced it (call right after step()).
    double dissipation(const GridFunction& u) const {
        double s = 0.0;
        double prev = 0.0;
        for (int j = 0; j < n_; ++j) {
            const double d = u[j] - prev;
            s += faces_[static_cast<std::size_t>(j)] * d * d;
            prev = u[j];
        }
        s += faces_[static_cast<std::size_t>(n_)] * prev * prev;
        return s * inv_h2_ * grid_->h();
    }

    const std::vector<double>& faces() const { return faces_; }

private:
    void build_faces(const GridFunction& u) {
        for (int j = 0; j < n_; ++j)
            coef_node_[static_cast<std::size_t>(j)] = coef_(u[j]);
        faces_[0] = detail::face_mean_value(cfg_.face_mean, coef_boundary_, coef_node_[0]);
        for (int j = 1; j < n_; ++j)
            faces_[static_cast<std::size_t>(j)] =
                detail::face_mean_value(cfg_.face_mean, coef_node_[static_cast<std::size_t>(j) - 1],
                                        coef_node_[static_cast<std::size_t>(j)]);
        faces_[static_cast<std::size_t>(n_)] = detail::face_mean_value(
            cfg_.face_mean, coef_node_[static_cast<std::size_t>(n_) - 1], coef_boundary_);
    }

    const Grid* grid_;
    SolverConfig cfg_;
    RegularizedCoefficient coef_;
    int n_;
    double inv_h2_;
    double coef_boundary_;
    std::vector<double> faces_, coef_node_;
    std::vector<double> lower_, diag_, upper_, rhs_, solution_, scratch_;
};

// Observer signature: called at t = 0 and after every recorded step.
using StepObserver =
    std::function<void(int step_index, double t, const GridFunction& u,
                       const StepDiagnostics& diag)>;

namespace detail {

inline StepDiagnostics make_diag(double t, const GridFunction& u, double dissipation) {
    StepDiagnostics d;
    d.t = t;
    d.l1 = norm_l1(u);
    d.h = norm_h(u);
    d.h1 = norm_h1(u);
    d.dissipation = dissipation;
    return d;
}

}  // namespace detail

// Streaming integration: the observer sees u at step 0 and at every
// record_every-th step; nothing is retained. Returns the trajectory status
// and leaves the terminal (or last finite) state in u.
inline TrajectoryStatus integrate_observe(GridFunction& u, const SolverConfig& cfg,
                                          const DiffusionSpec& spec, const NoiseOp* noise,
                                          const NoisePath& path, const StepObserver& observe,
                                          int* diverged_step = nullptr,
                                          double* max_h1 = nullptr,
                                          double* weak_residual = nullptr) {
    const Grid& grid = *u.grid;
    double lo = -16.0, hi = 16.0;
    for (int j = 0; j < u.size(); ++j) {
        lo = std::min(lo, 4.0 * u[j]);
        hi = std::max(hi, 4.0 * u[j]);
    }
    Stepper stepper(grid, cfg, spec, lo, hi);
    const int steps = cfg.steps();

    // weak-form balance against the first eigenmode
    GridFunction phi(grid);
    double mass0 = 0.0;
    double flux_sum = 0.0, noise_sum = 0.0;
    if (cfg.track_weak_residual) {
        phi.v = grid.eigenvector(1);
        mass0 = inner_h(u, phi);
    }

    if (observe) observe(0, 0.0, u, detail::make_diag(0.0, u, 0.0));
    if (max_h1) *max_h1 = norm_h1(u);

    std::vector<double> mixed, increment;
    for (int n = 0; n < steps; ++n) {
        const std::vector<double>* inc = nullptr;
        if (noise) {
            noise->mix(path, static_cast<std::uint64_t>(n), mixed);
            noise->apply_profile(mixed, u, increment);
            inc = &increment;
        }
        if (!stepper.step(u, inc)) {
            if (diverged_step) *diverged_step = n;
            return TrajectoryStatus::Diverged;
        }
        const double t = (n + 1) * cfg.dt;
        if (max_h1) *max_h1 = std::max(*max_h1, norm_h1(u));
        if (cfg.track_weak_residual) {
            // face pairing of grad primitive(u) with grad phi
            double s = 0.0;
            double prev_b = 0.0, prev_phi = 0.0;
            for (int j = 0; j < u.size(); ++j) {
                const double bj = primitive_b(spec, u[j]);
                const double pj = phi[j];
                s += (bj - prev_b) * (pj - prev_phi);
                prev_b = bj;
                prev_phi = pj;
            }
            s += (0.0 - prev_b) * (0.0 - prev_phi);
            flux_sum += cfg.dt * s / grid.h();
            if (inc) {
                double sn = 0.0;
                for (int j = 0; j < u.size(); ++j)
                    sn += (*inc)[static_cast<std::size_t>(j)] * phi[j];
                noise_sum += grid.h() * sn;
            }
        }
        if (observe && (n + 1) % cfg.record_every == 0)
            observe(n + 1, t, u, detail::make_diag(t, u, stepper.dissipation(u)));
    }
    if (weak_residual && cfg.track_weak_residual)
        *weak_residual = inner_h(u, phi) - mass0 + flux_sum - noise_sum;
    return TrajectoryStatus::Completed;
}

inline Trajectory integrate(const GridFunction& u0, const SolverConfig& cfg,
                            const DiffusionSpec& spec, const NoiseOp* noise,
                            const NoisePath& path) {
    Trajectory traj;
    traj.path_id = path.path_id;
    GridFunction u = u0;
    auto record = [&](int, double t, const GridFunction& state, const StepDiagnostics& d) {
        traj.times.push_back(t);
        traj.snapshots.push_back(state);
        traj.diagnostics.push_back(d);
    };
    traj.status = integrate_observe(u, cfg, spec, noise, path, record, &traj.diverged_step,
                                    &traj.max_h1, &traj.weak_residual);
    return traj;
}

// Shared-noise coupling: every solution sees the same dbeta increments per
// step; multiplicative increments still differ through s(u_k).
using CoupledObserver = std::function<void(int step_index, double t,
                                           const std::vector<GridFunction>& us)>;

inline std::vector<TrajectoryStatus> integrate_coupled_observe(
    std::vector<GridFunction>& us, const SolverConfig& cfg, const DiffusionSpec& spec,
    const NoiseOp* noise, const NoisePath& path, const CoupledObserver& observe,
    std::vector<int>* diverged_steps = nullptr) {
    if (us.empty()) throw std::invalid_argument("integrate_coupled: no initial data");
    const Grid& grid = *us.front().grid;
    for (const auto& u : us) require_same_grid(us.front(), u);

    double lo = -16.0, hi = 16.0;
    for (const auto& u : us)
        for (int j = 0; j < u.size(); ++j) {
            lo = std::min(lo, 4.0 * u[j]);
            hi = std::max(hi, 4.0 * u[j]);
        }

    const std::size_t m = us.size();
    std::vector<Stepper> steppers;
    steppers.reserve(m);
    for (std::size_t k = 0; k < m; ++k) steppers.emplace_back(grid, cfg, spec, lo, hi);
    std::vector<TrajectoryStatus> status(m, TrajectoryStatus::Completed);
    if (diverged_steps) diverged_steps->assign(m, -1);

    const int steps = cfg.steps();
    if (observe) observe(0, 0.0, us);
    std::vector<double> mixed, increment;
    for (int n = 0; n < steps; ++n) {
        if (noise) noise->mix(path, static_cast<std::uint64_t>(n), mixed);
        for (std::size_t k = 0; k < m; ++k) {
            if (status[k] == TrajectoryStatus::Diverged) continue;
            const std::vector<double>* inc = nullptr;
            if (noise) {
                noise->apply_profile(mixed, us[k], increment);
                inc = &increment;
            }
            if (!steppers[k].step(us[k], inc)) {
                status[k] = TrajectoryStatus::Diverged;
                if (diverged_steps) (*diverged_steps)[k] = n;
            }
        }
        if (observe && (n + 1) % cfg.record_every == 0)
            observe(n + 1, (n + 1) * cfg.dt, us);
    }
    return status;
}

inline std::vector<Trajectory> integrate_coupled(const std::vector<GridFunction>& u0s,
                                                 const SolverConfig& cfg,
                                                 const DiffusionSpec& spec,
                                                 const NoiseOp* noise,
                                                 const NoisePath& path) {
    std::vector<GridFunction> us = u0s;
    std::vector<Trajectory> trajs(us.size());
    for (std::size_t k = 0; k < us.size(); ++k) trajs[k].path_id = path.path_id;
    auto record = [&](int, double t, const std::vector<GridFunction>& states) {
        for (std::size_t k = 0; k < states.size(); ++k) {
            trajs[k].times.push_back(t);
            trajs[k].snapshots.push_back(states[k]);
            trajs[k].diagnostics.push_back(detail::make_diag(t, states[k], 0.0));
        }
    };
    std::vector<int> diverged;
    const auto status = integrate_coupled_observe(us, cfg, spec, noise, path, record, &diverged);
    for (std::size_t k = 0; k < us.size(); ++k) {
        trajs[k].status = status[k];
        trajs[k].diverged_step = diverged[k];
    }
    return trajs;
}

// Stochastic convolution W_A: the linear heat SPDE with additive noise and
// unit coefficient, advanced by the same implicit stepping as the main
// solver. The benchmark "noise magnitude" process for the ergodicity runs.
inline Trajectory stochastic_convolution(const NoiseOp& noise, double dt, double T,
                                         const NoisePath& path, int record_every = 1) {
    if (noise.spec().mode != NoiseMode::Additive)
        throw std::invalid_argument("stochastic convolution requires additive noise");
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.T = T;
    cfg.record_every = record_every;
    const DiffusionSpec unit = make_constant(1.0);
    GridFunction w0(noise.grid());
    return integrate(w0, cfg, unit, &noise, path);
}

}  // namespace spde
