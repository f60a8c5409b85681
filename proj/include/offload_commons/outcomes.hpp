#pragma once

#include <optional>
#include <span>
#include <string>

#include "offload_commons/dynamics.hpp"
#include "offload_commons/equilibrium.hpp"

namespace offload {

enum class CapacityRegime { WifiBottleneck, BackhaulBottleneck };
const char* to_string(CapacityRegime r);

/// BackhaulBottleneck when the summed backhaul capacity fits under the bulk
/// floor of the shared band: sum(C^b) <= (1 - bulk_floor) * C^u (inclusive,
/// within kTolerance).
CapacityRegime capacity_regime(double shared_capacity, std::span<const double> backhauls,
                               double bulk_floor);
CapacityRegime capacity_regime(const Scenario& scenario);

enum class Outcome { SelfBalancing, SystemDeadlock, BackhaulLimited };
const char* to_string(Outcome o);

struct Thresholds {
  std::optional<double> deadlock_quality;  // default: bulk floor / 2
  double relative_gap = 0.25;

  bool operator==(const Thresholds&) const = default;
};

struct OutcomeEvidence {
  CapacityRegime regime = CapacityRegime::WifiBottleneck;
  Oscillation oscillation;
  WelfareGap welfare;
  double final_unlicensed_quality = 0.0;
  std::optional<double> final_licensed_quality;
  double deadlock_quality = 0.0;
  bool within_floor_band = false;  // |q^u - bulk floor| <= band over the tail
  std::string reason;
};

struct OutcomeLabel {
  Outcome label = Outcome::SelfBalancing;
  OutcomeEvidence evidence;
};

/// Band half-width used for "settled at the bulk floor".
inline constexpr double kFloorBand = 1e-3;

/// Precedence: capacity regime, then deadlock (low final quality, large
/// welfare gap, or downward drift of unlicensed demand), then
/// self-balancing. Throws DomainError when the trajectory was not produced
/// from this scenario.
OutcomeLabel classify(const Trajectory& trajectory, const Scenario& scenario,
                      const WelfareGap& welfare, const Thresholds& thresholds = {});

}  // namespace offload
