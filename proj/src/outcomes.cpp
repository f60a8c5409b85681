#include "offload_commons/outcomes.hpp"

#include <cmath>

namespace offload {

const char* to_string(CapacityRegime r) {
  return r == CapacityRegime::WifiBottleneck ? "wifi_bottleneck" : "backhaul_bottleneck";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::SelfBalancing: return "SelfBalancing";
    case Outcome::SystemDeadlock: return "SystemDeadlock";
    case Outcome::BackhaulLimited: return "BackhaulLimited";
  }
  return "unknown";
}

CapacityRegime capacity_regime(double shared_capacity, std::span<const double> backhauls,
                               double bulk_floor) {
  if (!(shared_capacity > 0.0)) throw DomainError("capacity_regime: C^u must be positive");
  double sum = 0.0;
  for (double b : backhauls) {
    if (!(b > 0.0)) throw DomainError("capacity_regime: backhaul capacities must be positive");
    sum += b;
  }
  return sum <= (1.0 - bulk_floor) * shared_capacity + kTolerance
             ? CapacityRegime::BackhaulBottleneck
             : CapacityRegime::WifiBottleneck;
}

CapacityRegime capacity_regime(const Scenario& scenario) {
  const std::array<double, 2> backhauls{
      scenario.provider(ProviderId::WifiOnly).backhaul.capacity,
      scenario.provider(ProviderId::Combined).backhaul.capacity};
  return capacity_regime(scenario.unlicensed.capacity, backhauls,
                         scenario.min_quality(TrafficClass::Bulk));
}

OutcomeLabel classify(const Trajectory& trajectory, const Scenario& scenario,
                      const WelfareGap& welfare, const Thresholds& thresholds) {
  if (trajectory.states.empty()) throw DomainError("classify: empty trajectory");
  if (trajectory.loc_tag != scenario.loc) {
    throw DomainError("classify: trajectory was produced for location '" + trajectory.loc_tag +
                      "', scenario is '" + scenario.loc + "'");
  }
  const auto& first = trajectory.states.front();
  for (TrafficClass c : kTrafficClasses) {
    const auto& expected = scenario.pools[index(c)];
    const auto& got = first.pools[index(c)];
    if (std::abs(expected.total - got.total) > kTolerance) {
      throw DomainError("classify: trajectory pools do not match the scenario");
    }
  }

  const double floor = scenario.min_quality(TrafficClass::Bulk);
  OutcomeLabel out;
  auto& ev = out.evidence;
  ev.regime = capacity_regime(scenario);
  ev.oscillation = trajectory.states.size() >= 4 ? detect_oscillation(trajectory) : Oscillation{};
  ev.welfare = welfare;
  const auto& last = trajectory.states.back();
  ev.final_unlicensed_quality = last.qos.unlicensed;
  ev.final_licensed_quality = last.qos.licensed;
  ev.deadlock_quality = thresholds.deadlock_quality.value_or(floor / 2.0);
  ev.within_floor_band = true;
  for (std::size_t k = trajectory.states.size() / 2; k < trajectory.states.size(); ++k) {
    if (std::abs(trajectory.states[k].qos.unlicensed - floor) > kFloorBand) {
      ev.within_floor_band = false;
    }
  }

  if (ev.regime == CapacityRegime::BackhaulBottleneck) {
    out.label = Outcome::BackhaulLimited;
    ev.reason = "summed backhaul cannot push the shared band below the bulk floor";
    return out;
  }
  if (ev.final_unlicensed_quality < ev.deadlock_quality) {
    out.label = Outcome::SystemDeadlock;
    ev.reason = "final unlicensed quality below the deadlock threshold";
    return out;
  }
  if (welfare.relative_gap > thresholds.relative_gap) {
    out.label = Outcome::SystemDeadlock;
    ev.reason = "relative welfare gap above threshold";
    return out;
  }
  if (ev.oscillation.kind == OscillationKind::Drift && ev.oscillation.direction < 0) {
    out.label = Outcome::SystemDeadlock;
    ev.reason = "unlicensed demand drifting toward abandonment";
    return out;
  }
  out.label = Outcome::SelfBalancing;
  switch (ev.oscillation.kind) {
    case OscillationKind::None:
      ev.reason = ev.within_floor_band ? "stationary at the bulk floor" : "stationary";
      break;
    case OscillationKind::Periodic:
      ev.reason = "bounded periodic adoption cycle";
      break;
    case OscillationKind::Drift:
      ev.reason = "unlicensed demand still growing";
      break;
    case OscillationKind::Irregular:
      ev.reason = "bounded irregular fluctuation";
      break;
  }
  return out;
}

}  // namespace offload
