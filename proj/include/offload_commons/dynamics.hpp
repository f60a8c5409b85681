#pragma once

#include <optional>
#include <string>
#include <vector>

#include "offload_commons/strategy.hpp"

namespace offload {

/// Customer migration between Wi-Fi-only subscriptions and combined-provider
/// cellular subscriptions.
struct MigrationRule {
  Elasticity elasticity{1.0, 0.0};
  double migration_cap = 0.2;  // fraction of the class pool per round, in [0,1]
  double hysteresis = 0.0;     // minimum switching pressure before anything moves

  bool operator==(const MigrationRule&) const = default;
};

void validate(const MigrationRule& rule);

enum class StrategyPolicy { Static, BestResponseEachRound };
const char* to_string(StrategyPolicy p);

enum class EventKind { Roaming, Sabotage };
const char* to_string(EventKind k);

struct Event {
  int round = 1;
  EventKind kind = EventKind::Roaming;
  double influx = 0.0;                      // roaming only
  ProviderId target = ProviderId::WifiOnly; // roaming host or saboteur

  bool operator==(const Event&) const = default;
};

struct EventRecord {
  int round = 0;
  EventKind kind = EventKind::Roaming;
  ProviderId target = ProviderId::WifiOnly;
  double requested = 0.0;
  double admitted = 0.0;
};

struct MigrationRecord {
  int round = 0;
  TrafficClass cls = TrafficClass::Bulk;
  Segment from = Segment::WifiOnlySubscribers;
  Segment to = Segment::CombinedCellular;
  double volume = 0.0;
};

struct Trajectory {
  std::string loc_tag;
  std::vector<MarketState> states;      // rounds 0..T
  std::vector<JointProfile> profiles;   // strategy in force at each state
  std::vector<EventRecord> events;
  std::vector<MigrationRecord> migration_log;
};

/// Perceived quality of a customer segment: carried-share weighted quality,
/// uncarried demand perceives 0.
double perceived_quality(const MarketState& state, const JointProfile& strategies, Segment segment,
                         TrafficClass cls);

/// One migration round: price/quality differentials between each pool's
/// home and the alternative move demand (capped, hysteresis-suppressed),
/// scaled back proportionally when the new placement would be infeasible,
/// then QoS and profits are re-derived.
MarketState step(const Scenario& scenario, const MarketState& state, const MigrationRule& rule,
                 const JointProfile& strategies, std::vector<MigrationRecord>* log = nullptr);

/// Adds visiting bulk demand on the target's unlicensed path, scaled back
/// to the free shared and backhaul capacity. `strategies` are needed to
/// re-materialize the pools.
MarketState inject_roaming(const Scenario& scenario, const MarketState& state,
                           const JointProfile& strategies, double influx, ProviderId target,
                           double* admitted = nullptr);

/// Maximal feasible load on the shared band by the saboteur, premium kept
/// licensed, freed capacity resold. Own bulk traffic is offloaded first,
/// then non-revenue filler up to the backhaul or shared-capacity limit.
StrategyProfile sabotage_strategy(const Scenario& scenario, const Pools& pools,
                                  ProviderId saboteur, const StrategyProfile& opponent);
StrategyProfile sabotage_strategy(const Scenario& scenario, ProviderId saboteur,
                                  const StrategyProfile& opponent);

struct SimulationOptions {
  StrategyPolicy policy = StrategyPolicy::Static;
  int rounds = 20;
  int grid_steps = 4;
  std::vector<Event> events;
};

inline constexpr double kRefineMinSpan = 1e-9;
inline constexpr int kRefineMaxIterations = 200;

/// Full-grid best_response refined by a pattern search around the winner:
/// the window keeps its span while it finds strictly better profiles and
/// halves otherwise, down to kRefineMinSpan. A feasible warm start is
/// refined the same way and wins only when strictly more profitable.
BestResponse refined_best_response(const Scenario& scenario, const Pools& pools,
                                   ProviderId provider, const StrategyProfile& opponent,
                                   int grid_steps, const StrategyProfile* warm_start = nullptr);

/// Under BestResponseEachRound the Wi-Fi-only provider, then the combined
/// provider, play refined_best_response against the other's current profile
/// before each migration step.
Trajectory simulate(const Scenario& scenario, const JointProfile& initial,
                    const MigrationRule& rule, const SimulationOptions& options);

enum class OscillationKind { None, Periodic, Drift, Irregular };
const char* to_string(OscillationKind k);

struct Oscillation {
  OscillationKind kind = OscillationKind::None;
  int period = 0;
  double amplitude = 0.0;  // swing of total unlicensed demand over the tail
  int direction = 0;       // drift: +1 increasing, -1 decreasing

  bool operator==(const Oscillation&) const = default;
};

inline constexpr double kOscillationTolerance = 1e-6;

/// Looks at the last half of the trajectory. Throws DomainError for fewer
/// than 4 states.
Oscillation detect_oscillation(const Trajectory& trajectory);

}  // namespace offload
