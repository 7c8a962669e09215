#ifndef NETGAMES_CLI_CONFIG_HPP
#define NETGAMES_CLI_CONFIG_HPP

#include "netgames/game.hpp"
#include "netgames/network.hpp"
#include "netgames/solvers.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <vector>

namespace netgames::cli {

using nlohmann::json;

/// Parsed configuration document: the game description plus per-command
/// parameter sections, kept in a re-emittable form.
struct RunConfig {
    NetworkSpec network;
    std::string family;  ///< linear_quadratic | races | multi_activity
    json game_params;    ///< family parameters as parsed (canonical per-agent arrays)
    json sections;       ///< command sections (dynamics/solve/sweep/sensitivity) as parsed

    GameSpec build_game() const;

    /// Canonical JSON document; parsing the emission yields an identical game.
    json to_json() const;
};

/// Parses a configuration document. Throws std::invalid_argument with
/// line/field context on malformed input.
RunConfig parse_config(const json& doc);
RunConfig parse_config_file(const std::string& path);

/// Dynamics options shared by the solve/dynamics commands.
struct DynamicsSection {
    std::vector<DynamicsMode> modes;
    std::optional<Vector> x0;  ///< absent: projection of zero onto X
    DynamicsConfig base;
};

DynamicsSection parse_dynamics_section(const RunConfig& cfg, const GameSpec& spec);

}  // namespace netgames::cli

#endif
