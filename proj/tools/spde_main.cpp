// spde: desk-scale laboratory for the quasilinear parabolic SPDE
//   du = div(b(u) grad u) dt + sigma(u) dw
// on an interval with homogeneous Dirichlet boundary.
//
// Usage: spde <experiment> --config <file> --out <dir> [--seed N] [--paths M] [--threads K]
// Exit code 0: all criteria pass; 1: a criterion failed; 2: configuration or
// runtime error.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "spde/spde.hpp"

namespace {

int run_subcommand(const std::string& kind, const std::string& config_path,
                   const std::string& out_dir, long long seed_override,
                   long long paths_override, int threads, bool dump_trajectory) {
    spde::RunConfig cfg = spde::parse_config(config_path);
    cfg.experiment_kind = kind;
    if (seed_override >= 0) cfg.noise_seed = static_cast<std::uint64_t>(seed_override);
    if (paths_override > 0) cfg.experiment_paths = paths_override;
    spde::validate_semantics(cfg);

    const spde::ExperimentReport report = spde::run_experiment(cfg, threads);
    spde::emit_report(report, cfg, out_dir);

    if (dump_trajectory) {
        spde::Lab lab(cfg);
        const auto u0 = spde::make_initial_data(lab.grid, cfg.experiment_initial);
        const auto traj = spde::integrate(u0, lab.solver, lab.diffusion, &lab.noise, lab.path(0));
        spde::emit_trajectory(traj, out_dir, "trajectory_path0");
    }

    std::printf("%s: config %s seed %llu -> %s (%d criteria, %d paths, %d diverged)\n",
                report.kind.c_str(), report.config_hash.c_str(),
                static_cast<unsigned long long>(report.seed),
                report.pass() ? "PASS" : "FAIL", static_cast<int>(report.criteria.size()),
                report.total_paths, report.diverged_paths);
    for (const auto& c : report.criteria)
        std::printf("  %-28s %s  measured=%.6g threshold=%.6g%s%s\n", c.name.c_str(),
                    c.pass ? "PASS" : "FAIL", c.measured, c.threshold,
                    c.detail.empty() ? "" : "  ", c.detail.c_str());
    for (const auto& [k, v] : report.labels)
        std::printf("  note: %s = %s\n", k.c_str(), v.c_str());
    return report.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"quasilinear SPDE laboratory"};
    app.require_subcommand(1);

    const char* kinds[] = {"contract",  "compare",     "energy",     "ergodic",
                           "invariant", "irreducible", "ball-entry", "kinetic",
                           "validate",  "boundary-layer"};
    std::string config_path, out_dir = "out";
    long long seed_override = -1, paths_override = -1;
    int threads = 1;
    bool dump_trajectory = false;

    for (const char* kind : kinds) {
        auto* sub = app.add_subcommand(kind);
        sub->add_option("--config", config_path, "config file")->required();
        sub->add_option("--out", out_dir, "output directory");
        sub->add_option("--seed", seed_override, "override noise.seed");
        sub->add_option("--paths", paths_override, "override experiment.paths");
        sub->add_option("--threads", threads, "worker threads (does not affect results)");
        sub->add_flag("--dump-trajectory", dump_trajectory,
                      "emit framed binary snapshots + JSONL diagnostics for path 0");
    }

    CLI11_PARSE(app, argc, argv);

    try {
        const std::string kind = app.get_subcommands().front()->get_name();
        return run_subcommand(kind, config_path, out_dir, seed_override, paths_override,
                              threads, dump_trajectory);
    } catch (const spde::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
