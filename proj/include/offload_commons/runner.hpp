#pragma once

#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "offload_commons/scenario_config.hpp"

namespace offload {

inline constexpr const char* kToolVersion = "1.0.0";

enum class Command { Equilibrium, Simulate, Classify, Sweep, Dominance };
const char* to_string(Command c);
std::optional<Command> parse_command(std::string_view name);

/// Column order of trajectory.csv.
inline constexpr const char* kTrajectoryHeader =
    "round,load_unlicensed_wifi_only,load_unlicensed_combined,load_unlicensed_total,"
    "load_licensed_combined,q_unlicensed,q_licensed,profit_wifi_only,profit_combined,"
    "pool_bulk_wifi_only,pool_bulk_cellular,pool_premium_wifi_only,pool_premium_cellular,"
    "visitors_bulk";

struct Artifacts {
  nlohmann::json report;
  std::optional<std::string> trajectory_csv;
  std::optional<std::string> sweep_csv;
  bool model_error = false;  // report carries an "error" object
};

/// Runs one subcommand. Model errors (infeasible placements, domain
/// violations) are caught and reported in the artifacts; ConfigError
/// escapes for sweep points only when the base config itself is invalid.
Artifacts run(Command command, const ScenarioConfig& config);

std::string trajectory_csv(const Trajectory& trajectory);

/// Applies a value at a JSON pointer of the serialized config and reloads it.
ScenarioConfig with_parameter(const ScenarioConfig& config, const std::string& pointer,
                              double value);

}  // namespace offload
