#include "commands.hpp"

#include "CLI11.hpp"

#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitNoConvergence = 4;

}  // namespace

int main(int argc, char** argv) {
    using namespace netgames::cli;

    CLI::App app{"network game analysis toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    CommandOptions opt;
    double tol = -1.0;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "configuration file (JSON)")->required();
        cmd->add_option("--out", opt.out_dir, "output directory");
        cmd->add_option("--seed", opt.seed, "seed for sampled kappa probes");
        cmd->add_option("--tol", tol, "residual tolerance override");
        cmd->add_flag("--quiet", opt.quiet, "suppress the stdout summary");
    };

    CLI::App* analyze = app.add_subcommand("analyze", "certificates and guarantees");
    CLI::App* solve = app.add_subcommand("solve", "compute a Nash equilibrium");
    CLI::App* dynamics = app.add_subcommand("dynamics", "best-response trajectories");
    CLI::App* sweep = app.add_subcommand("sweep", "equilibria along a parameter range");
    CLI::App* sensitivity = app.add_subcommand("sensitivity", "equilibrium sensitivity analysis");
    for (CLI::App* cmd : {analyze, solve, dynamics, sweep, sensitivity}) add_common(cmd);

    CLI11_PARSE(app, argc, argv);
    if (tol > 0.0) opt.tol_override = tol;

    RunConfig cfg;
    try {
        cfg = parse_config_file(config_path);
    } catch (const std::exception& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    }

    try {
        if (analyze->parsed()) {
            run_analyze(cfg, opt, std::cout);
        } else if (solve->parsed()) {
            if (!run_solve(cfg, opt, std::cout)) return kExitNoConvergence;
        } else if (dynamics->parsed()) {
            run_dynamics(cfg, opt, std::cout);
        } else if (sweep->parsed()) {
            run_sweep(cfg, opt, std::cout);
        } else if (sensitivity->parsed()) {
            run_sensitivity(cfg, opt, std::cout);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return kExitOk;
}
