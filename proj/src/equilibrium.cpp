#include "offload_commons/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace offload {

const char* to_string(EquilibriumKind k) {
  switch (k) {
    case EquilibriumKind::IntraProvider: return "intra_provider";
    case EquilibriumKind::InterProvider: return "inter_provider";
    case EquilibriumKind::NashGrid: return "nash_grid";
  }
  return "unknown";
}

BisectionResult bisect_decreasing(const std::function<double(double)>& f, double lo, double hi,
                                  double tolerance, int max_iterations) {
  BisectionResult r;
  if (f(lo) < 0.0 || f(hi) > 0.0) throw DomainError("bisect: root not bracketed");
  while (r.iterations < max_iterations) {
    const double mid = 0.5 * (lo + hi);
    const double value = f(mid);
    ++r.iterations;
    if (value == 0.0) {
      lo = hi = mid;
    } else if (value > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    r.widths.push_back(hi - lo);
    if (hi - lo <= tolerance) {
      r.converged = true;
      break;
    }
  }
  r.root = 0.5 * (lo + hi);
  return r;
}

namespace {

void check_floor(double floor, const char* name) {
  if (!(floor > 0.0 && floor < 1.0)) {
    throw DomainError(std::string(name) + " quality floor must lie in (0,1)");
  }
}

// Bulk offload of the combined provider that brings the shared band to the
// bulk floor, clamped to [0, available].
EquilibriumReport solve_intra(const Scenario& scenario, double opponent, double available) {
  const double floor = scenario.min_quality(TrafficClass::Bulk);
  check_floor(floor, "bulk");
  const double capacity = scenario.unlicensed.capacity;
  if (opponent < 0.0 || opponent > capacity + kTolerance) {
    throw DomainError("intra_provider_equilibrium: opponent demand outside [0, C^u]");
  }
  opponent = std::min(opponent, capacity);

  EquilibriumReport r;
  r.kind = EquilibriumKind::IntraProvider;
  r.placements.unlicensed_wifi_only = opponent;

  const double hi = std::max(
      0.0, std::min({available, scenario.provider(ProviderId::Combined).backhaul.capacity,
                     capacity - opponent}));
  const auto gap = [&](double d) { return qos(opponent + d, capacity) - floor; };

  double d = 0.0;
  if (gap(0.0) < 0.0) {
    r.clamped = true;
    r.converged = true;
    r.note = "opponent alone breaches the bulk floor";
  } else if (gap(hi) >= 0.0) {
    d = hi;
    r.clamped = gap(hi) > 0.0;
    r.converged = true;
    if (r.clamped) r.note = "root beyond admissible offload; reporting boundary";
  } else {
    const auto b = bisect_decreasing(gap, 0.0, hi);
    d = b.root;
    r.iterations = b.iterations;
    r.converged = b.converged;
  }
  r.placements.unlicensed_combined = d;
  r.unlicensed_quality = qos(opponent + d, capacity);
  r.residual = std::abs(r.unlicensed_quality - floor);
  r.unlicensed_at_floor = r.residual <= kSolverTolerance;
  return r;
}

}  // namespace

EquilibriumReport intra_provider_equilibrium(const Scenario& scenario,
                                             double opponent_unlicensed_demand) {
  const double available =
      scenario.pools[index(TrafficClass::Bulk)][Segment::CombinedCellular];
  return solve_intra(scenario, opponent_unlicensed_demand, available);
}

EquilibriumReport inter_provider_equilibrium(const Scenario& scenario) {
  const auto& comb = scenario.provider(ProviderId::Combined);
  if (!comb.licensed) throw DomainError("inter_provider_equilibrium: no licensed network");
  const double premium_floor = scenario.min_quality(TrafficClass::Premium);
  check_floor(premium_floor, "premium");
  check_floor(scenario.min_quality(TrafficClass::Bulk), "bulk");

  EquilibriumReport r;
  r.kind = EquilibriumKind::InterProvider;
  const double premium_available =
      scenario.pools[index(TrafficClass::Premium)][Segment::CombinedCellular] + comb.resale_pool;
  if (!(premium_available > 0.0)) {
    r.applicable = false;
    r.note = "no premium demand: inter-provider equilibrium does not exist";
    return r;
  }

  const double capacity = comb.licensed->capacity;
  const auto gap = [&](double d) { return qos(d, capacity) - premium_floor; };
  const auto b = bisect_decreasing(gap, 0.0, capacity);
  const double target = b.root;

  const double bulk_cell = scenario.pools[index(TrafficClass::Bulk)][Segment::CombinedCellular];
  auto& pl = r.placements;
  pl.licensed_premium = std::min(premium_available, target);
  pl.licensed_bulk = std::min(bulk_cell, std::max(0.0, target - pl.licensed_premium));
  pl.licensed_combined = pl.licensed_premium + pl.licensed_bulk;
  pl.premium_overflow = premium_available - pl.licensed_premium;
  r.clamped = pl.licensed_combined < target - kSolverTolerance;
  r.licensed_quality = qos(pl.licensed_combined, capacity);
  r.residual = std::abs(*r.licensed_quality - premium_floor);

  const auto& wifi = scenario.provider(ProviderId::WifiOnly);
  const double opponent =
      std::min({scenario.pools[index(TrafficClass::Bulk)][Segment::WifiOnlySubscribers],
                wifi.backhaul.capacity, scenario.unlicensed.capacity});
  const auto intra = solve_intra(scenario, opponent, bulk_cell - pl.licensed_bulk);
  pl.unlicensed_combined = intra.placements.unlicensed_combined;
  pl.unlicensed_wifi_only = intra.placements.unlicensed_wifi_only;
  r.unlicensed_quality = intra.unlicensed_quality;
  r.unlicensed_at_floor = intra.unlicensed_at_floor;
  r.iterations = b.iterations + intra.iterations;
  r.converged = b.converged && intra.converged;
  if (!r.unlicensed_at_floor) r.note = "unlicensed side does not reach the bulk floor";
  return r;
}

std::vector<StrategyProfile> grid_profiles(const Scenario& scenario, ProviderId provider,
                                          int grid_steps) {
  std::vector<StrategyProfile> out;
  for (const auto& g : strategy_grid(provider, grid_steps)) {
    // Points that differ only in the resale share collapse when there is no
    // headroom to resell.
    auto p = to_profile(scenario, scenario.pools, provider, g);
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
  }
  return out;
}

void for_each_joint_profile(const Scenario& scenario, int grid_steps,
                            const std::function<void(const JointProfile&, const MarketState&)>& fn) {
  const auto wifi_profiles = grid_profiles(scenario, ProviderId::WifiOnly, grid_steps);
  const auto comb_profiles = grid_profiles(scenario, ProviderId::Combined, grid_steps);
  JointProfile joint;
  for (const auto& pi : wifi_profiles) {
    joint.wifi_only = pi;
    for (const auto& pj : comb_profiles) {
      joint.combined = pj;
      MarketState state;
      state.placements = placements_for(scenario, scenario.pools, joint);
      if (violated_constraint(scenario, state.placements)) continue;
      state.loc_tag = scenario.loc;
      state.pools = scenario.pools;
      rederive(scenario, state);
      fn(joint, state);
    }
  }
}

namespace {

double unlicensed_total(const Scenario& scenario, const JointProfile& p) {
  double sum = 0.0;
  for (const auto& pl : placements_for(scenario, scenario.pools, p)) {
    if (pl.network == NetworkKind::UnlicensedAir) sum += pl.load;
  }
  return sum;
}

std::array<double, 5> lex_key(const JointProfile& p) {
  return {p.wifi_only.offload[0], p.wifi_only.offload[1], p.combined.offload[0],
          p.combined.offload[1], p.combined.admitted_extra};
}

}  // namespace

bool selection_less(const Scenario& scenario, const JointProfile& a, const JointProfile& b) {
  const double ua = unlicensed_total(scenario, a);
  const double ub = unlicensed_total(scenario, b);
  if (std::abs(ua - ub) > kTolerance) return ua < ub;
  return lex_key(a) < lex_key(b);
}

NashSet nash_oracle(const Scenario& scenario, int grid_steps) {
  if (grid_steps < 1 || grid_steps > 12) {
    throw DomainError("nash_oracle: grid_steps must lie in [1, 12]");
  }
  const auto wifi_profiles = grid_profiles(scenario, ProviderId::WifiOnly, grid_steps);
  const auto comb_profiles = grid_profiles(scenario, ProviderId::Combined, grid_steps);
  const std::size_t n_wifi = wifi_profiles.size();
  const std::size_t n_comb = comb_profiles.size();
  constexpr double kMissing = -std::numeric_limits<double>::infinity();

  struct Cell {
    bool feasible = false;
    double wifi_profit = 0.0;
    double comb_profit = 0.0;
    JointProfile profile;
  };
  std::vector<Cell> cells(n_wifi * n_comb);
  std::vector<double> best_wifi(n_comb, kMissing);  // per combined strategy
  std::vector<double> best_comb(n_wifi, kMissing);  // per Wi-Fi-only strategy

  // Enumeration order matches for_each_joint_profile: Wi-Fi-only outer.
  NashSet out;
  for (std::size_t a = 0; a < n_wifi; ++a) {
    for (std::size_t b = 0; b < n_comb; ++b) {
      JointProfile joint;
      joint.wifi_only = wifi_profiles[a];
      joint.combined = comb_profiles[b];
      const auto wp = evaluate_profit(scenario, scenario.pools, joint, ProviderId::WifiOnly);
      if (!wp) continue;
      const auto cp = evaluate_profit(scenario, scenario.pools, joint, ProviderId::Combined);
      auto& cell = cells[a * n_comb + b];
      cell = {true, *wp, *cp, joint};
      ++out.feasible_profiles;
      best_wifi[b] = std::max(best_wifi[b], *wp);
      best_comb[a] = std::max(best_comb[a], *cp);
    }
  }
  for (std::size_t a = 0; a < n_wifi; ++a) {
    for (std::size_t b = 0; b < n_comb; ++b) {
      const auto& cell = cells[a * n_comb + b];
      if (!cell.feasible) continue;
      if (cell.wifi_profit >= best_wifi[b] - kTolerance &&
          cell.comb_profit >= best_comb[a] - kTolerance) {
        out.equilibria.push_back(cell.profile);
      }
    }
  }
  std::stable_sort(out.equilibria.begin(), out.equilibria.end(),
                   [&](const JointProfile& x, const JointProfile& y) {
                     return selection_less(scenario, x, y);
                   });
  return out;
}

DynamicsOutcome best_response_dynamics(const Scenario& scenario, const JointProfile& initial,
                                       int grid_steps, int max_iter) {
  if (max_iter < 1) throw DomainError("best_response_dynamics: max_iter must be >= 1");
  std::vector<JointProfile> history{initial};
  for (int it = 1; it <= max_iter; ++it) {
    JointProfile next;
    next.wifi_only =
        best_response(scenario, ProviderId::WifiOnly, history.back().combined, grid_steps).profile;
    next.combined =
        best_response(scenario, ProviderId::Combined, next.wifi_only, grid_steps).profile;
    if (next == history.back()) return FixedPoint{next, it};
    for (std::size_t s = 0; s + 1 < history.size(); ++s) {
      if (history[s] == next) {
        Cycle c;
        c.period = static_cast<int>(history.size() - s);
        c.profiles.assign(history.begin() + static_cast<std::ptrdiff_t>(s), history.end());
        c.iterations = it;
        return c;
      }
    }
    history.push_back(next);
  }
  return NonConvergence{max_iter, history.back()};
}

double total_welfare(const MarketState& state) {
  return state.profits[0] + state.profits[1];
}

WelfareGap commons_welfare_gap(const Scenario& scenario, int grid_steps,
                               const JointProfile& initial, int max_iter) {
  WelfareGap w;
  const auto outcome = best_response_dynamics(scenario, initial, grid_steps, max_iter);
  if (const auto* fp = std::get_if<FixedPoint>(&outcome)) {
    w.equilibrium_profile = fp->profile;
  } else {
    w.from_fixed_point = false;
    const auto nash = nash_oracle(scenario, grid_steps);
    if (!nash.equilibria.empty()) {
      w.equilibrium_profile = nash.equilibria.front();
    } else if (const auto* cyc = std::get_if<Cycle>(&outcome)) {
      w.equilibrium_profile = cyc->profiles.front();
    } else {
      w.equilibrium_profile = std::get<NonConvergence>(outcome).last;
    }
  }
  w.equilibrium_welfare = total_welfare(apply_strategy(scenario, w.equilibrium_profile));

  bool found = false;
  for_each_joint_profile(scenario, grid_steps, [&](const JointProfile& p, const MarketState& s) {
    const double welfare = total_welfare(s);
    if (!found || welfare > w.coordinated_welfare ||
        (welfare == w.coordinated_welfare && selection_less(scenario, p, w.coordinated_profile))) {
      w.coordinated_welfare = welfare;
      w.coordinated_profile = p;
      found = true;
    }
  });
  if (!found) throw InfeasibleError(Constraint::SharedCapacity, "no feasible joint grid profile");
  w.gap = w.coordinated_welfare - w.equilibrium_welfare;
  w.relative_gap =
      std::abs(w.coordinated_welfare) > kTolerance ? w.gap / std::abs(w.coordinated_welfare) : 0.0;
  return w;
}

}  // namespace offload
