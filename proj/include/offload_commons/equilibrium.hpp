#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "offload_commons/strategy.hpp"

namespace offload {

/// Bisection on demand units.
inline constexpr double kSolverTolerance = 1e-6;
inline constexpr int kSolverMaxIterations = 200;

struct BisectionResult {
  double root = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> widths;  // bracket width after each iteration
};

/// Root of a non-increasing function on [lo, hi] with f(lo) >= 0 >= f(hi).
BisectionResult bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                  double tolerance = kSolverTolerance,
                                  int max_iterations = kSolverMaxIterations);

enum class EquilibriumKind { IntraProvider, InterProvider, NashGrid };
const char* to_string(EquilibriumKind k);

struct EquilibriumPlacements {
  double unlicensed_combined = 0.0;  // d^u_j*
  double licensed_combined = 0.0;    // d^l_j*
  double unlicensed_wifi_only = 0.0; // d^u_i
  double licensed_premium = 0.0;
  double licensed_bulk = 0.0;
  double premium_overflow = 0.0;
};

struct EquilibriumReport {
  EquilibriumKind kind = EquilibriumKind::IntraProvider;
  bool applicable = true;
  EquilibriumPlacements placements;
  double unlicensed_quality = 0.0;
  std::optional<double> licensed_quality;
  double residual = 0.0;       // |q - floor| at the binding threshold
  int iterations = 0;
  bool converged = false;
  bool clamped = false;        // root lies outside the admissible interval
  bool unlicensed_at_floor = false;
  std::string note;
};

/// Combined provider's bulk offload d such that
/// qos(opponent + d, C^u) = bulk floor, clamped to
/// [0, min(cellular bulk demand, backhaul, C^u - opponent)].
EquilibriumReport intra_provider_equilibrium(const Scenario& scenario,
                                             double opponent_unlicensed_demand);

/// Licensed load at the premium floor, filled premium first, with the
/// unlicensed side settled at the intra-provider equilibrium.
EquilibriumReport inter_provider_equilibrium(const Scenario& scenario);

/// Distinct profiles on the provider's strategy grid, in grid order.
std::vector<StrategyProfile> grid_profiles(const Scenario& scenario, ProviderId provider,
                                          int grid_steps);

/// Enumeration over all joint feasible grid profiles. Cost is
/// O((grid_steps+1)^5) profile evaluations.
void for_each_joint_profile(const Scenario& scenario, int grid_steps,
                            const std::function<void(const JointProfile&, const MarketState&)>& fn);

struct NashSet {
  std::vector<JointProfile> equilibria;  // selection order
  std::size_t feasible_profiles = 0;
};

/// All pure grid profiles where no provider gains more than kTolerance by a
/// unilateral grid deviation. Ordered by lowest total unlicensed placement,
/// then lexicographically.
NashSet nash_oracle(const Scenario& scenario, int grid_steps);

bool selection_less(const Scenario& scenario, const JointProfile& a, const JointProfile& b);

struct FixedPoint {
  JointProfile profile;
  int iterations = 0;
};
struct Cycle {
  int period = 0;
  std::vector<JointProfile> profiles;
  int iterations = 0;
};
struct NonConvergence {
  int iterations = 0;
  JointProfile last;
};
using DynamicsOutcome = std::variant<FixedPoint, Cycle, NonConvergence>;

/// Alternating exact grid best responses (Wi-Fi-only first, then combined).
DynamicsOutcome best_response_dynamics(const Scenario& scenario, const JointProfile& initial,
                                       int grid_steps, int max_iter);

struct WelfareGap {
  double equilibrium_welfare = 0.0;
  double coordinated_welfare = 0.0;
  double gap = 0.0;
  double relative_gap = 0.0;
  JointProfile equilibrium_profile;
  JointProfile coordinated_profile;
  bool from_fixed_point = true;
};

double total_welfare(const MarketState& state);

WelfareGap commons_welfare_gap(const Scenario& scenario, int grid_steps,
                               const JointProfile& initial = baseline_profile(),
                               int max_iter = 200);

}  // namespace offload
