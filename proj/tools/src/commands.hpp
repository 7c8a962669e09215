#ifndef NETGAMES_CLI_COMMANDS_HPP
#define NETGAMES_CLI_COMMANDS_HPP

#include "cli_config.hpp"

#include "netgames/diagnostics.hpp"
#include "netgames/sensitivity.hpp"
#include "netgames/solvers.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>

namespace netgames::cli {

struct CommandOptions {
    std::string out_dir = "out";
    std::uint64_t seed = 0;              ///< affects only sampled kappa probes
    std::optional<double> tol_override;  ///< overrides residual/solve tolerances
    bool quiet = false;
};

/// Certificate report document (report.json + human-readable summary).
CertificateReport run_analyze(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

/// Equilibrium computation; returns false on non-convergence.
bool run_solve(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

/// Trajectory CSV per requested mode plus sidecar status reports.
void run_dynamics(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

/// Equilibria against a swept scalar parameter (CSV).
void run_sweep(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

/// Regularity flags, equilibrium Jacobian CSV and validation error.
void run_sensitivity(const RunConfig& cfg, const CommandOptions& opt, std::ostream& log);

/// Formats a double with 17 significant digits (lossless round trip).
std::string format_number(double v);

/// One row of comma separated numbers, 17 significant digits.
std::string csv_row(const Vector& v);

json report_to_json(const CertificateReport& rep);

}  // namespace netgames::cli

#endif
