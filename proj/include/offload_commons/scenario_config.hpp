#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "offload_commons/dynamics.hpp"
#include "offload_commons/outcomes.hpp"

namespace offload {

inline constexpr int kSchemaVersion = 1;

struct SweepParameter {
  std::string pointer;         // JSON pointer into the scenario document
  std::vector<double> values;

  bool operator==(const SweepParameter&) const = default;
};

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  Scenario market;
  JointProfile initial = baseline_profile();
  MigrationRule migration;
  StrategyPolicy policy = StrategyPolicy::Static;
  Thresholds thresholds;
  int grid_steps = 4;
  int rounds = 20;
  std::uint64_t seed = 0;
  std::vector<Event> events;
  std::vector<SweepParameter> sweep;

  SimulationOptions simulation_options() const;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Reads and validates a scenario file. Throws ConfigError listing every
/// problem found (parse errors carry line/column, validation errors the
/// field path).
ScenarioConfig load_scenario(const std::string& path);
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig scenario_from_json(const nlohmann::json& doc);

/// Semantic checks on an already-built config; empty when valid.
std::vector<ConfigIssue> validate(const ScenarioConfig& config);

nlohmann::json to_json(const ScenarioConfig& config);
nlohmann::json to_json(const JointProfile& profile);
std::string serialize_scenario(const ScenarioConfig& config);

}  // namespace offload
