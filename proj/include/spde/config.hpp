#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/diffusion.hpp"
#include "spde/grid.hpp"
#include "spde/noise.hpp"
#include "spde/stepper.hpp"

namespace spde {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

}  // namespace detail

// Plain-text sectioned key=value configuration. Lines are either comments
// (#...), `[section]` headers, or `key = value`; keys may also be written
// fully qualified (`noise.mode = ...`) outside any section. Unknown keys and
// duplicates are rejected with their line number.
class RawConfig {
public:
    static RawConfig parse_string(const std::string& text, const std::string& origin = "<string>") {
        RawConfig rc;
        rc.origin_ = origin;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            const std::string trimmed = trim(line);
            if (trimmed.empty()) continue;
            if (trimmed.front() == '[') {
                if (trimmed.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": malformed section header");
                section = trim(trimmed.substr(1, trimmed.size() - 2));
                continue;
            }
            const auto eq = trimmed.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = trim(trimmed.substr(0, eq));
            const std::string value = trim(trimmed.substr(eq + 1));
            if (key.find('.') == std::string::npos && !section.empty())
                key = section + "." + key;
            if (rc.entries_.count(key))
                throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" +
                                  key + "' (first set at line " +
                                  std::to_string(rc.entries_[key].line) + ")");
            rc.entries_[key] = {value, lineno};
        }
        return rc;
    }

    static RawConfig parse_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return parse_string(ss.str(), path);
    }

    bool has(const std::string& key) const { return entries_.count(key) != 0; }

    std::string get(const std::string& key, const std::string& dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        return it->second.value;
    }

    double get_double(const std::string& key, double dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            throw ConfigError(origin_ + ":" + std::to_string(it->second.line) +
                              ": key '" + key + "' is not a number");
        }
    }

    long long get_int(const std::string& key, long long dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        try {
            std::size_t pos = 0;
            const long long v = std::stoll(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (...) {
            throw ConfigError(origin_ + ":" + std::to_string(it->second.line) +
                              ": key '" + key + "' is not an integer");
        }
    }

    bool get_bool(const std::string& key, bool dflt) {
        auto it = entries_.find(key);
        if (it == entries_.end()) return dflt;
        it->second.consumed = true;
        const std::string& v = it->second.value;
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(origin_ + ":" + std::to_string(it->second.line) + ": key '" + key +
                          "' is not a boolean");
    }

    void reject_unconsumed() const {
        for (const auto& [key, e] : entries_) {
            if (!e.consumed)
                throw ConfigError(origin_ + ":" + std::to_string(e.line) + ": unknown key '" +
                                  key + "'");
        }
    }

private:
    static std::string trim(const std::string& s) {
        std::size_t a = 0, b = s.size();
        while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
        return s.substr(a, b - a);
    }

    struct Entry {
        std::string value;
        int line = 0;
        bool consumed = false;
    };
    std::string origin_;
    std::map<std::string, Entry> entries_;
};

// Fully materialized run configuration: every default made explicit so the
// manifest is self-describing, and the hash covers every numerics-affecting
// key. Thread count is deliberately not part of it.
struct RunConfig {
    // grid
    double grid_L = 1.0;
    long long grid_n = 128;
    // diffusion
    std::string diffusion_family = "constant";
    double diffusion_b0 = 1.0;
    double diffusion_slope = 1.0;
    double diffusion_c = 1.0;
    double diffusion_theta = 3.0;
    double diffusion_b1 = 2.0;
    std::string diffusion_expr;
    std::string diffusion_regime = "auto";  // auto | nondegenerate | degenerate
    double diffusion_theta1 = 3.0;
    double diffusion_theta2 = 3.0;
    double diffusion_c1 = 1.0;
    double diffusion_c2 = 1.0;
    double diffusion_gamma = 0.0;  // 0 -> family default
    bool diffusion_bypass_validation = false;
    // noise
    std::string noise_mode = "additive";
    long long noise_N = 0;  // 0 -> min(64, grid_n)
    double noise_lambda_bar = 1.0;
    double noise_decay_q = 1.0;
    std::string noise_state_profile = "one";
    std::uint64_t noise_seed = 12345;
    // solver
    double solver_dt = 1e-4;
    double solver_T = 1.0;
    std::string solver_scheme = "implicit";
    std::string solver_regularization = "none";
    double solver_epsilon = 0.01;
    double solver_tau = 0.01;
    double solver_clip_threshold = 1e8;
    long long solver_record_every = 100;
    std::string solver_face_mean = "arithmetic";
    bool solver_yosida_table = true;
    // experiment
    std::string experiment_kind = "contract";
    long long experiment_paths = 200;
    std::string experiment_initial = "bump:1,0.5,0.1";
    std::string experiment_initial2 = "zero";
    double experiment_slack_c = 10.0;
    double experiment_t_long = 50.0;
    double experiment_burn_in = 0.2;
    std::string experiment_p_list = "2,4";
    std::string experiment_norm_sweep = "1,2,4,8";
    std::string experiment_r_levels = "2,4,8,16";
    long long experiment_nbins = 256;
    double experiment_epsilon_target = 0.1;
    double experiment_ball_radius = 4.0;  // sweep bound on ||z||_H
    double experiment_horizon = 50.0;
    double experiment_entry_spacing = 1.0;
    double experiment_cutoff_k = 4.0;
    double experiment_moment_p = 1.0;
    std::string experiment_delta_list = "0.2,0.1,0.05,0.02,0.01";
    bool experiment_allow_out_of_scope = false;

    // ------------------------------------------------------------------
    std::string canonical() const {
        using detail::format_double;
        std::map<std::string, std::string> kv;
        kv["grid.L"] = format_double(grid_L);
        kv["grid.n"] = std::to_string(grid_n);
        kv["diffusion.family"] = diffusion_family;
        kv["diffusion.b0"] = format_double(diffusion_b0);
        kv["diffusion.slope"] = format_double(diffusion_slope);
        kv["diffusion.c"] = format_double(diffusion_c);
        kv["diffusion.theta"] = format_double(diffusion_theta);
        kv["diffusion.b1"] = format_double(diffusion_b1);
        kv["diffusion.expr"] = diffusion_expr;
        kv["diffusion.regime"] = diffusion_regime;
        kv["diffusion.theta1"] = format_double(diffusion_theta1);
        kv["diffusion.theta2"] = format_double(diffusion_theta2);
        kv["diffusion.c1"] = format_double(diffusion_c1);
        kv["diffusion.c2"] = format_double(diffusion_c2);
        kv["diffusion.gamma"] = format_double(diffusion_gamma);
        kv["diffusion.bypass_validation"] = diffusion_bypass_validation ? "true" : "false";
        kv["noise.mode"] = noise_mode;
        kv["noise.N"] = std::to_string(noise_N);
        kv["noise.lambda_bar"] = format_double(noise_lambda_bar);
        kv["noise.decay_q"] = format_double(noise_decay_q);
        kv["noise.state_profile"] = noise_state_profile;
        kv["noise.seed"] = std::to_string(noise_seed);
        kv["solver.dt"] = format_double(solver_dt);
        kv["solver.T"] = format_double(solver_T);
        kv["solver.scheme"] = solver_scheme;
        kv["solver.regularization"] = solver_regularization;
        kv["solver.epsilon"] = format_double(solver_epsilon);
        kv["solver.tau"] = format_double(solver_tau);
        kv["solver.clip_threshold"] = format_double(solver_clip_threshold);
        kv["solver.record_every"] = std::to_string(solver_record_every);
        kv["solver.face_mean"] = solver_face_mean;
        kv["solver.yosida_table"] = solver_yosida_table ? "true" : "false";
        kv["experiment.kind"] = experiment_kind;
        kv["experiment.paths"] = std::to_string(experiment_paths);
        kv["experiment.initial"] = experiment_initial;
        kv["experiment.initial2"] = experiment_initial2;
        kv["experiment.slack_C"] = format_double(experiment_slack_c);
        kv["experiment.T_long"] = format_double(experiment_t_long);
        kv["experiment.burn_in"] = format_double(experiment_burn_in);
        kv["experiment.p_list"] = experiment_p_list;
        kv["experiment.norm_sweep"] = experiment_norm_sweep;
        kv["experiment.R_levels"] = experiment_r_levels;
        kv["experiment.nbins"] = std::to_string(experiment_nbins);
        kv["experiment.epsilon_target"] = format_double(experiment_epsilon_target);
        kv["experiment.ball_radius"] = format_double(experiment_ball_radius);
        kv["experiment.horizon"] = format_double(experiment_horizon);
        kv["experiment.entry_spacing"] = format_double(experiment_entry_spacing);
        kv["experiment.cutoff_k"] = format_double(experiment_cutoff_k);
        kv["experiment.moment_p"] = format_double(experiment_moment_p);
        kv["experiment.delta_list"] = experiment_delta_list;
        kv["experiment.allow_out_of_scope"] =
            experiment_allow_out_of_scope ? "true" : "false";
        std::string out;
        for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
        return out;
    }

    std::string hash_hex() const {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%016llx",
                      static_cast<unsigned long long>(detail::fnv1a(canonical())));
        return buf;
    }

    // ------------------------------------------------------------------
    Grid make_grid() const { return Grid(grid_L, static_cast<int>(grid_n)); }

    DiffusionSpec make_diffusion() const {
        DiffusionSpec s;
        if (diffusion_family == "constant")
            s = make_constant(diffusion_b0);
        else if (diffusion_family == "affine_floor")
            s = make_affine_floor(diffusion_b0, diffusion_slope);
        else if (diffusion_family == "porous")
            s = make_porous(diffusion_c, diffusion_theta);
        else if (diffusion_family == "porous_floor")
            s = make_porous_floor(diffusion_b0, diffusion_c, diffusion_theta);
        else if (diffusion_family == "bounded")
            s = make_bounded(diffusion_b0, diffusion_b1);
        else if (diffusion_family == "anti_diffusion")
            s = make_anti_diffusion(diffusion_c);
        else if (diffusion_family == "expr") {
            Regime reg;
            if (diffusion_regime == "degenerate")
                reg = Regime::degenerate(diffusion_theta1, diffusion_theta2, diffusion_c1,
                                         diffusion_c2);
            else
                reg = Regime::non_degenerate(diffusion_b0, diffusion_theta, diffusion_c);
            s = make_expression(diffusion_expr, reg,
                                diffusion_gamma > 0.0 ? diffusion_gamma : 1.0);
        } else {
            throw ConfigError("unknown diffusion family '" + diffusion_family + "'");
        }
        if (diffusion_gamma > 0.0) s.holder_gamma = diffusion_gamma;
        if (diffusion_bypass_validation) s.bypass_validation = true;
        return s;
    }

    NoiseSpec make_noise_spec() const {
        NoiseSpec ns;
        if (noise_mode == "additive")
            ns.mode = NoiseMode::Additive;
        else if (noise_mode == "multiplicative")
            ns.mode = NoiseMode::Multiplicative;
        else
            throw ConfigError("noise.mode must be additive or multiplicative");
        ns.n_modes = static_cast<int>(noise_N > 0 ? noise_N : std::min<long long>(64, grid_n));
        ns.lambda_bar = noise_lambda_bar;
        ns.decay_q = noise_decay_q;
        ns.profile = parse_state_profile(noise_state_profile);
        ns.seed = noise_seed;
        return ns;
    }

    SolverConfig make_solver() const {
        SolverConfig sc;
        sc.dt = solver_dt;
        sc.T = solver_T;
        if (solver_scheme == "implicit")
            sc.scheme = Scheme::LinearizedImplicit;
        else if (solver_scheme == "explicit")
            sc.scheme = Scheme::Explicit;
        else
            throw ConfigError("solver.scheme must be implicit or explicit");
        if (solver_regularization == "none")
            sc.regularization = Regularization::None;
        else if (solver_regularization == "yosida")
            sc.regularization = Regularization::Yosida;
        else if (solver_regularization == "viscous")
            sc.regularization = Regularization::Viscous;
        else
            throw ConfigError("solver.regularization must be none, yosida, or viscous");
        sc.epsilon = solver_epsilon;
        sc.tau = solver_tau;
        sc.clip_threshold = solver_clip_threshold;
        sc.record_every = static_cast<int>(solver_record_every);
        if (solver_face_mean == "arithmetic")
            sc.face_mean = FaceMean::Arithmetic;
        else if (solver_face_mean == "harmonic")
            sc.face_mean = FaceMean::Harmonic;
        else
            throw ConfigError("solver.face_mean must be arithmetic or harmonic");
        sc.use_yosida_table = solver_yosida_table;
        return sc;
    }

    std::vector<double> parse_list(const std::string& text) const {
        std::vector<double> out;
        std::stringstream ss(text);
        std::string tok;
        while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
        return out;
    }
};

// Semantic validation: experiment preconditions that tie modules together.
inline void validate_semantics(const RunConfig& c) {
    const bool additive = c.noise_mode == "additive";
    const bool bounded_b = (c.diffusion_family == "bounded") ||
                           (c.diffusion_family == "constant");
    if (additive && c.noise_state_profile != "one")
        throw ConfigError("additive noise forces noise.state_profile = one");
    if (c.experiment_kind == "ergodic" && !c.experiment_allow_out_of_scope) {
        if (!additive)
            throw ConfigError(
                "ergodic coupling requires additive noise: the almost-sure gap convergence "
                "only holds when both solutions share the identical forcing "
                "(set experiment.allow_out_of_scope = true to run it as a labeled "
                "out-of-scope probe)");
        if (!bounded_b)
            throw ConfigError(
                "ergodic coupling requires bounded diffusion (family bounded or constant)");
    }
    if ((c.experiment_kind == "irreducible" || c.experiment_kind == "ball-entry")) {
        if (!additive)
            throw ConfigError(c.experiment_kind +
                              " requires additive noise (coupled smallness argument)");
        if (!bounded_b)
            throw ConfigError(c.experiment_kind + " requires bounded diffusion");
    }
    if (c.experiment_kind == "invariant") {
        if (c.diffusion_family == "porous" ||
            (c.diffusion_family == "expr" && c.diffusion_regime == "degenerate"))
            throw ConfigError(
                "invariant-measure experiment requires the non-degenerate growth condition "
                "b0 <= b(r) <= c(1+|r|^(theta-1)); degenerate diffusion violates it");
    }
    if (c.solver_regularization == "yosida" &&
        (c.diffusion_family == "porous" ||
         (c.diffusion_family == "expr" && c.diffusion_regime == "degenerate")))
        throw ConfigError("yosida regularization requires a non-degenerate diffusion floor");
}

inline RunConfig materialize_config(RawConfig& raw, bool validate = true) {
    RunConfig c;
    c.grid_L = raw.get_double("grid.L", c.grid_L);
    c.grid_n = raw.get_int("grid.n", c.grid_n);
    c.diffusion_family = raw.get("diffusion.family", c.diffusion_family);
    c.diffusion_b0 = raw.get_double("diffusion.b0", c.diffusion_b0);
    c.diffusion_slope = raw.get_double("diffusion.slope", c.diffusion_slope);
    c.diffusion_c = raw.get_double("diffusion.c", c.diffusion_c);
    c.diffusion_theta = raw.get_double("diffusion.theta", c.diffusion_theta);
    c.diffusion_b1 = raw.get_double("diffusion.b1", c.diffusion_b1);
    c.diffusion_expr = raw.get("diffusion.expr", c.diffusion_expr);
    c.diffusion_regime = raw.get("diffusion.regime", c.diffusion_regime);
    c.diffusion_theta1 = raw.get_double("diffusion.theta1", c.diffusion_theta1);
    c.diffusion_theta2 = raw.get_double("diffusion.theta2", c.diffusion_theta2);
    c.diffusion_c1 = raw.get_double("diffusion.c1", c.diffusion_c1);
    c.diffusion_c2 = raw.get_double("diffusion.c2", c.diffusion_c2);
    c.diffusion_gamma = raw.get_double("diffusion.gamma", c.diffusion_gamma);
    c.diffusion_bypass_validation =
        raw.get_bool("diffusion.bypass_validation", c.diffusion_bypass_validation);
    c.noise_mode = raw.get("noise.mode", c.noise_mode);
    c.noise_N = raw.get_int("noise.N", c.noise_N);
    c.noise_lambda_bar = raw.get_double("noise.lambda_bar", c.noise_lambda_bar);
    c.noise_decay_q = raw.get_double("noise.decay_q", c.noise_decay_q);
    c.noise_state_profile = raw.get("noise.state_profile", c.noise_state_profile);
    c.noise_seed = static_cast<std::uint64_t>(
        raw.get_int("noise.seed", static_cast<long long>(c.noise_seed)));
    c.solver_dt = raw.get_double("solver.dt", c.solver_dt);
    c.solver_T = raw.get_double("solver.T", c.solver_T);
    c.solver_scheme = raw.get("solver.scheme", c.solver_scheme);
    c.solver_regularization = raw.get("solver.regularization", c.solver_regularization);
    c.solver_epsilon = raw.get_double("solver.epsilon", c.solver_epsilon);
    c.solver_tau = raw.get_double("solver.tau", c.solver_tau);
    c.solver_clip_threshold = raw.get_double("solver.clip_threshold", c.solver_clip_threshold);
    c.solver_record_every = raw.get_int("solver.record_every", c.solver_record_every);
    c.solver_face_mean = raw.get("solver.face_mean", c.solver_face_mean);
    c.solver_yosida_table = raw.get_bool("solver.yosida_table", c.solver_yosida_table);
    c.experiment_kind = raw.get("experiment.kind", c.experiment_kind);
    c.experiment_paths = raw.get_int("experiment.paths", c.experiment_paths);
    c.experiment_initial = raw.get("experiment.initial", c.experiment_initial);
    c.experiment_initial2 = raw.get("experiment.initial2", c.experiment_initial2);
    c.experiment_slack_c = raw.get_double("experiment.slack_C", c.experiment_slack_c);
    c.experiment_t_long = raw.get_double("experiment.T_long", c.experiment_t_long);
    c.experiment_burn_in = raw.get_double("experiment.burn_in", c.experiment_burn_in);
    c.experiment_p_list = raw.get("experiment.p_list", c.experiment_p_list);
    c.experiment_norm_sweep = raw.get("experiment.norm_sweep", c.experiment_norm_sweep);
    c.experiment_r_levels = raw.get("experiment.R_levels", c.experiment_r_levels);
    c.experiment_nbins = raw.get_int("experiment.nbins", c.experiment_nbins);
    c.experiment_epsilon_target =
        raw.get_double("experiment.epsilon_target", c.experiment_epsilon_target);
    c.experiment_ball_radius = raw.get_double("experiment.ball_radius", c.experiment_ball_radius);
    c.experiment_horizon = raw.get_double("experiment.horizon", c.experiment_horizon);
    c.experiment_entry_spacing =
        raw.get_double("experiment.entry_spacing", c.experiment_entry_spacing);
    c.experiment_cutoff_k = raw.get_double("experiment.cutoff_k", c.experiment_cutoff_k);
    c.experiment_moment_p = raw.get_double("experiment.moment_p", c.experiment_moment_p);
    c.experiment_delta_list = raw.get("experiment.delta_list", c.experiment_delta_list);
    c.experiment_allow_out_of_scope =
        raw.get_bool("experiment.allow_out_of_scope", c.experiment_allow_out_of_scope);
    raw.reject_unconsumed();
    if (validate) validate_semantics(c);
    return c;
}

inline RunConfig parse_config(const std::string& path) {
    RawConfig raw = RawConfig::parse_file(path);
    return materialize_config(raw);
}

inline RunConfig parse_config_text(const std::string& text) {
    RawConfig raw = RawConfig::parse_string(text);
    return materialize_config(raw);
}

}  // namespace spde
