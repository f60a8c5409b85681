#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "offload_commons/error.hpp"
#include "offload_commons/market_model.hpp"

namespace offload {

/// One provider's placement decision.
///
/// For the combined provider `offload[c]` is the share of its cellular
/// class-c demand moved onto its unlicensed path (the rest stays licensed)
/// and `admitted_extra` is new premium demand admitted into freed licensed
/// capacity. For the Wi-Fi-only provider `offload[c]` is the share of its
/// subscribers' class-c demand it carries; the remainder goes unserved.
/// `filler_load` is non-revenue traffic pushed onto the shared band and is
/// only ever set by the sabotage strategy.
struct StrategyProfile {
  std::array<double, 2> offload{};
  double admitted_extra = 0.0;
  double filler_load = 0.0;

  double fraction(TrafficClass c) const { return offload[index(c)]; }

  bool operator==(const StrategyProfile&) const = default;
};

struct JointProfile {
  StrategyProfile wifi_only;
  StrategyProfile combined;

  StrategyProfile& operator[](ProviderId p) {
    return p == ProviderId::WifiOnly ? wifi_only : combined;
  }
  const StrategyProfile& operator[](ProviderId p) const {
    return p == ProviderId::WifiOnly ? wifi_only : combined;
  }

  bool operator==(const JointProfile&) const = default;
};

/// Wi-Fi-only provider carries everything, combined provider offloads
/// nothing and admits no extra demand.
JointProfile baseline_profile();

/// Throws DomainError when a profile breaks its own invariants (fractions
/// outside [0,1], extra demand on a provider without licensed spectrum, ...).
void validate_profile(const Scenario& scenario, ProviderId provider,
                      const StrategyProfile& profile, const Pools& pools);

/// Licensed capacity the combined provider has left after its own
/// cellular traffic, capped by the latent resale pool.
double resale_headroom(const Scenario& scenario, const Pools& pools,
                       const StrategyProfile& combined);

/// Placements for the given pools and strategies, without capacity checks.
std::vector<Placement> placements_for(const Scenario& scenario, const Pools& pools,
                                      const JointProfile& profile);

/// First capacity constraint the placement breaks, if any.
std::optional<Constraint> violated_constraint(const Scenario& scenario,
                                              const std::vector<Placement>& placements);

/// Materializes placements, derives QoS and profits. Throws InfeasibleError
/// naming the violated constraint.
MarketState materialize(const Scenario& scenario, const Pools& pools,
                        const JointProfile& profile, int round = 0);

/// materialize() on the scenario's initial pools.
MarketState apply_strategy(const Scenario& scenario, const JointProfile& profile);

/// Profit of `provider` under `profile`, or nullopt when infeasible.
std::optional<double> evaluate_profit(const Scenario& scenario, const Pools& pools,
                                      const JointProfile& profile, ProviderId provider);

// ---------------------------------------------------------------------------
// Strategy grid

/// Decision coordinates: (bulk share, premium share, resale share). The
/// resale share scales resale_headroom(); it is always 0 for the Wi-Fi-only
/// provider.
using GridPoint = std::array<double, 3>;

StrategyProfile to_profile(const Scenario& scenario, const Pools& pools, ProviderId provider,
                           const GridPoint& point);
GridPoint to_point(const Scenario& scenario, const Pools& pools, ProviderId provider,
                   const StrategyProfile& profile);

/// All grid points for a provider in lexicographic order; grid_steps+1
/// values per active dimension.
std::vector<GridPoint> strategy_grid(ProviderId provider, int grid_steps);

/// Grid points inside a window of half-width `span` around `center`: per
/// active dimension, a lattice through the center with spacing
/// span / max(1, grid_steps/2), cut to [0,1], plus the clipped window ends.
std::vector<GridPoint> window_grid(ProviderId provider, int grid_steps, const GridPoint& center,
                                   double span);

/// Total tie-break order among equally profitable candidates: lower premium
/// share, then lower own unlicensed placement, then lexicographic.
bool tie_break_less(const StrategyProfile& a, double a_unlicensed, const StrategyProfile& b,
                    double b_unlicensed);

struct BestResponse {
  StrategyProfile profile;
  GridPoint point{};
  double profit = 0.0;
};

/// Exhaustive grid best response against a fixed opponent. Throws
/// InfeasibleError when no grid point is feasible.
BestResponse best_response(const Scenario& scenario, const Pools& pools, ProviderId provider,
                           const StrategyProfile& opponent, int grid_steps);
BestResponse best_response(const Scenario& scenario, ProviderId provider,
                           const StrategyProfile& opponent, int grid_steps);

/// Best response restricted to window_grid() around `center`.
BestResponse best_response_in_window(const Scenario& scenario, const Pools& pools,
                                     ProviderId provider, const StrategyProfile& opponent,
                                     int grid_steps, const GridPoint& center, double span);

// ---------------------------------------------------------------------------
// Dominance

struct DominanceReport {
  bool condition_i = false;    // licensed minus unlicensed quality < 0
  bool condition_ii = false;   // licensed-side yields beat unlicensed reduction
  bool condition_iii = false;  // candidate offload step is bulk only
  bool any = false;

  double delta_quality = 0.0;  // q_licensed - q_unlicensed at the current state
  std::optional<TrafficClass> step_class;
  double step_volume = 0.0;     // traffic moved by the candidate step
  double resold_volume = 0.0;   // freed capacity resold in the step
  bool step_feasible = false;
  double revenue_yield = 0.0;   // licensed revenue gained (resale, licensed gate)
  double capacity_yield = 0.0;  // cost reduction of the step
  double unlicensed_reduction = 0.0;
  std::string note;
};

/// Evaluates offload dominance for the combined provider at `profile`, using
/// one grid step (1/grid_steps) as the marginal move. Throws DomainError for
/// a provider without licensed spectrum.
DominanceReport dominance_check(const Scenario& scenario, ProviderId provider,
                                const JointProfile& profile, int grid_steps);

}  // namespace offload
