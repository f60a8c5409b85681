#include "offload_commons/strategy.hpp"

#include <algorithm>
#include <cmath>

namespace offload {

JointProfile baseline_profile() {
  JointProfile p;
  p.wifi_only.offload = {1.0, 1.0};
  p.combined.offload = {0.0, 0.0};
  return p;
}

void validate_profile(const Scenario& scenario, ProviderId provider,
                      const StrategyProfile& profile, const Pools& pools) {
  for (TrafficClass c : kTrafficClasses) {
    const double f = profile.fraction(c);
    if (!(f >= 0.0 && f <= 1.0)) {
      throw DomainError(std::string(to_string(provider)) + " " + to_string(c) +
                        " fraction outside [0,1]");
    }
  }
  if (profile.admitted_extra < 0.0 || profile.filler_load < 0.0) {
    throw DomainError(std::string(to_string(provider)) + ": negative extra or filler load");
  }
  if (!scenario.provider(provider).licensed) {
    if (profile.admitted_extra > 0.0) {
      throw DomainError(std::string(to_string(provider)) +
                        " admits extra demand without licensed spectrum");
    }
    return;
  }
  const double headroom = resale_headroom(scenario, pools, profile);
  if (profile.admitted_extra > headroom + kTolerance) {
    throw DomainError("admitted_extra exceeds licensed headroom / resale pool");
  }
}

double resale_headroom(const Scenario& scenario, const Pools& pools,
                       const StrategyProfile& combined) {
  const auto& owner = scenario.provider(ProviderId::Combined);
  if (!owner.licensed) return 0.0;
  double own = 0.0;
  for (TrafficClass c : kTrafficClasses) {
    own += (1.0 - combined.fraction(c)) * pools[index(c)][Segment::CombinedCellular];
  }
  return std::clamp(std::min(owner.resale_pool, owner.licensed->capacity - own), 0.0,
                    owner.resale_pool);
}

std::vector<Placement> placements_for(const Scenario& scenario, const Pools& pools,
                                      const JointProfile& profile) {
  std::vector<Placement> out;
  out.reserve(10);

  const auto& wifi = scenario.provider(ProviderId::WifiOnly);
  const double wifi_cost = scenario.unlicensed_unit_cost(ProviderId::WifiOnly);
  for (TrafficClass c : kTrafficClasses) {
    out.push_back({ProviderId::WifiOnly, NetworkKind::UnlicensedAir, c,
                   profile.wifi_only.fraction(c) * pools[index(c)][Segment::WifiOnlySubscribers],
                   wifi.price(NetworkKind::UnlicensedAir, c), wifi_cost});
  }

  const auto& comb = scenario.provider(ProviderId::Combined);
  const double comb_cost = scenario.unlicensed_unit_cost(ProviderId::Combined);
  for (TrafficClass c : kTrafficClasses) {
    const double cell = pools[index(c)][Segment::CombinedCellular];
    const double f = profile.combined.fraction(c);
    if (comb.licensed) {
      const double price = comb.price(NetworkKind::LicensedAir, c);
      out.push_back({ProviderId::Combined, NetworkKind::UnlicensedAir, c, f * cell, price,
                     comb_cost});
      out.push_back({ProviderId::Combined, NetworkKind::LicensedAir, c, (1.0 - f) * cell,
                     price, comb.licensed->cost_per_unit});
    } else {
      // Without licensed spectrum the combined slot behaves like a Wi-Fi-only
      // provider: the fraction is the carried share.
      out.push_back({ProviderId::Combined, NetworkKind::UnlicensedAir, c, f * cell,
                     comb.price(NetworkKind::UnlicensedAir, c), comb_cost});
    }
  }
  if (comb.licensed && profile.combined.admitted_extra > 0.0) {
    out.push_back({ProviderId::Combined, NetworkKind::LicensedAir, TrafficClass::Premium,
                   profile.combined.admitted_extra,
                   comb.price(NetworkKind::LicensedAir, TrafficClass::Premium),
                   comb.licensed->cost_per_unit});
  }

  const double wifi_visitors = pools[index(TrafficClass::Bulk)][Segment::WifiOnlyVisitors];
  if (wifi_visitors > 0.0) {
    out.push_back({ProviderId::WifiOnly, NetworkKind::UnlicensedAir, TrafficClass::Bulk,
                   wifi_visitors, wifi.price(NetworkKind::UnlicensedAir, TrafficClass::Bulk),
                   wifi_cost});
  }
  const double comb_visitors = pools[index(TrafficClass::Bulk)][Segment::CombinedVisitors];
  if (comb_visitors > 0.0) {
    out.push_back({ProviderId::Combined, NetworkKind::UnlicensedAir, TrafficClass::Bulk,
                   comb_visitors, comb.price(NetworkKind::UnlicensedAir, TrafficClass::Bulk),
                   comb_cost});
  }

  for (ProviderId id : kProviders) {
    const double filler = profile[id].filler_load;
    if (filler > 0.0) {
      out.push_back({id, NetworkKind::UnlicensedAir, TrafficClass::Bulk, filler, 0.0,
                     scenario.unlicensed_unit_cost(id)});
    }
  }
  return out;
}

std::optional<Constraint> violated_constraint(const Scenario& scenario,
                                              const std::vector<Placement>& placements) {
  double shared = 0.0;
  double licensed = 0.0;
  std::array<double, 2> own{};
  for (const auto& p : placements) {
    if (p.network == NetworkKind::UnlicensedAir) {
      shared += p.load;
      own[index(p.provider)] += p.load;
    } else if (p.network == NetworkKind::LicensedAir) {
      licensed += p.load;
    }
  }
  if (shared > scenario.unlicensed.capacity + kTolerance) return Constraint::SharedCapacity;
  const auto& lic = scenario.provider(ProviderId::Combined).licensed;
  if (lic && licensed > lic->capacity + kTolerance) return Constraint::LicensedCapacity;
  if (own[index(ProviderId::WifiOnly)] >
      scenario.provider(ProviderId::WifiOnly).backhaul.capacity + kTolerance) {
    return Constraint::BackhaulWifiOnly;
  }
  if (own[index(ProviderId::Combined)] >
      scenario.provider(ProviderId::Combined).backhaul.capacity + kTolerance) {
    return Constraint::BackhaulCombined;
  }
  return std::nullopt;
}

MarketState materialize(const Scenario& scenario, const Pools& pools,
                        const JointProfile& profile, int round) {
  for (ProviderId id : kProviders) validate_profile(scenario, id, profile[id], pools);
  MarketState state;
  state.loc_tag = scenario.loc;
  state.round = round;
  state.pools = pools;
  state.placements = placements_for(scenario, pools, profile);
  rederive(scenario, state);
  return state;
}

MarketState apply_strategy(const Scenario& scenario, const JointProfile& profile) {
  return materialize(scenario, scenario.pools, profile, 0);
}

namespace {

// Same arithmetic as rederive(), without exceptions; used in the hot
// enumeration loops.
std::optional<MarketState> try_state(const Scenario& scenario, const Pools& pools,
                                     const JointProfile& profile) {
  MarketState state;
  state.placements = placements_for(scenario, pools, profile);
  if (violated_constraint(scenario, state.placements)) return std::nullopt;
  state.loc_tag = scenario.loc;
  state.pools = pools;
  rederive(scenario, state);
  return state;
}

}  // namespace

std::optional<double> evaluate_profit(const Scenario& scenario, const Pools& pools,
                                      const JointProfile& profile, ProviderId provider) {
  auto state = try_state(scenario, pools, profile);
  if (!state) return std::nullopt;
  return state->profit(provider);
}

StrategyProfile to_profile(const Scenario& scenario, const Pools& pools, ProviderId provider,
                           const GridPoint& point) {
  StrategyProfile p;
  p.offload = {point[0], point[1]};
  if (provider == ProviderId::Combined && scenario.provider(provider).licensed) {
    p.admitted_extra = point[2] * resale_headroom(scenario, pools, p);
  }
  return p;
}

GridPoint to_point(const Scenario& scenario, const Pools& pools, ProviderId provider,
                   const StrategyProfile& profile) {
  GridPoint g{profile.offload[0], profile.offload[1], 0.0};
  if (provider == ProviderId::Combined) {
    const double headroom = resale_headroom(scenario, pools, profile);
    g[2] = headroom > 0.0 ? std::clamp(profile.admitted_extra / headroom, 0.0, 1.0) : 0.0;
  }
  return g;
}

namespace {

std::vector<double> axis(int grid_steps, double lo, double hi) {
  std::vector<double> values;
  values.reserve(static_cast<std::size_t>(grid_steps) + 1);
  for (int k = 0; k <= grid_steps; ++k) {
    // Endpoints are exact so fractions 0 and 1 are always representable.
    if (k == 0) values.push_back(lo);
    else if (k == grid_steps) values.push_back(hi);
    else values.push_back(lo + (hi - lo) * static_cast<double>(k) / grid_steps);
  }
  return values;
}

std::vector<GridPoint> product(const std::array<std::vector<double>, 3>& axes) {
  std::vector<GridPoint> out;
  out.reserve(axes[0].size() * axes[1].size() * axes[2].size());
  for (double a : axes[0])
    for (double b : axes[1])
      for (double c : axes[2]) out.push_back({a, b, c});
  return out;
}

void check_steps(int grid_steps) {
  if (grid_steps < 1) throw DomainError("grid_steps must be >= 1");
}

}  // namespace

std::vector<GridPoint> strategy_grid(ProviderId provider, int grid_steps) {
  check_steps(grid_steps);
  const auto full = axis(grid_steps, 0.0, 1.0);
  std::array<std::vector<double>, 3> axes{full, full, full};
  if (provider == ProviderId::WifiOnly) axes[2] = {0.0};
  return product(axes);
}

std::vector<GridPoint> window_grid(ProviderId provider, int grid_steps, const GridPoint& center,
                                   double span) {
  check_steps(grid_steps);
  std::array<std::vector<double>, 3> axes;
  for (std::size_t d = 0; d < 3; ++d) {
    // Lattice anchored at the center so clipping at 0 or 1 never changes the
    // spacing; the clipped window ends stay reachable.
    const int half = std::max(1, grid_steps / 2);
    const double spacing = span / half;
    std::vector<double> values{center[d], std::max(0.0, center[d] - span),
                               std::min(1.0, center[d] + span)};
    for (int k = -half; k <= half; ++k) {
      const double v = center[d] + k * spacing;
      if (v >= 0.0 && v <= 1.0) values.push_back(v);
    }
    std::sort(values.begin(), values.end());
    values.erase(std::unique(values.begin(), values.end()), values.end());
    axes[d] = std::move(values);
  }
  if (provider == ProviderId::WifiOnly) axes[2] = {0.0};
  return product(axes);
}

bool tie_break_less(const StrategyProfile& a, double a_unlicensed, const StrategyProfile& b,
                    double b_unlicensed) {
  const double pa = a.fraction(TrafficClass::Premium);
  const double pb = b.fraction(TrafficClass::Premium);
  if (pa != pb) return pa < pb;
  if (std::abs(a_unlicensed - b_unlicensed) > kTolerance) return a_unlicensed < b_unlicensed;
  if (a.offload[0] != b.offload[0]) return a.offload[0] < b.offload[0];
  return a.admitted_extra < b.admitted_extra;
}

namespace {

BestResponse best_over(const Scenario& scenario, const Pools& pools, ProviderId provider,
                       const StrategyProfile& opponent, const std::vector<GridPoint>& points) {
  std::optional<BestResponse> best;
  double best_unlicensed = 0.0;
  JointProfile joint;
  joint[opponent_of(provider)] = opponent;
  for (const auto& point : points) {
    joint[provider] = to_profile(scenario, pools, provider, point);
    auto state = try_state(scenario, pools, joint);
    if (!state) continue;
    const double profit = state->profit(provider);
    const double unlicensed = state->load(provider, NetworkKind::UnlicensedAir);
    bool take = !best.has_value();
    if (!take) {
      if (profit > best->profit + kTolerance) {
        take = true;
      } else if (std::abs(profit - best->profit) <= kTolerance) {
        take = tie_break_less(joint[provider], unlicensed, best->profile, best_unlicensed);
      }
    }
    if (take) {
      best = BestResponse{joint[provider], point, profit};
      best_unlicensed = unlicensed;
    }
  }
  if (!best) {
    throw InfeasibleError(Constraint::SharedCapacity,
                          std::string("no feasible grid strategy for ") + to_string(provider));
  }
  return *best;
}

}  // namespace

BestResponse best_response(const Scenario& scenario, const Pools& pools, ProviderId provider,
                           const StrategyProfile& opponent, int grid_steps) {
  if (grid_steps < 2) throw DomainError("best_response: grid_steps must be >= 2");
  return best_over(scenario, pools, provider, opponent, strategy_grid(provider, grid_steps));
}

BestResponse best_response(const Scenario& scenario, ProviderId provider,
                           const StrategyProfile& opponent, int grid_steps) {
  return best_response(scenario, scenario.pools, provider, opponent, grid_steps);
}

BestResponse best_response_in_window(const Scenario& scenario, const Pools& pools,
                                     ProviderId provider, const StrategyProfile& opponent,
                                     int grid_steps, const GridPoint& center, double span) {
  return best_over(scenario, pools, provider, opponent,
                   window_grid(provider, grid_steps, center, span));
}

DominanceReport dominance_check(const Scenario& scenario, ProviderId provider,
                                const JointProfile& profile, int grid_steps) {
  if (!scenario.provider(provider).licensed) {
    throw DomainError(std::string("dominance_check: ") + to_string(provider) +
                      " has no licensed network");
  }
  if (grid_steps < 1) throw DomainError("dominance_check: grid_steps must be >= 1");

  const Pools& pools = scenario.pools;
  const MarketState before = materialize(scenario, pools, profile);
  DominanceReport r;
  r.delta_quality = before.quality(NetworkKind::LicensedAir) - before.quality(NetworkKind::UnlicensedAir);
  r.condition_i = r.delta_quality < 0.0;

  const StrategyProfile& current = profile[provider];
  StrategyProfile stepped = current;
  const double step = 1.0 / grid_steps;
  for (TrafficClass c : kTrafficClasses) {
    if (current.fraction(c) < 1.0) {
      r.step_class = c;
      stepped.offload[index(c)] = std::min(1.0, current.fraction(c) + step);
      r.step_volume = (stepped.fraction(c) - current.fraction(c)) *
                      pools[index(c)][Segment::CombinedCellular];
      break;
    }
  }
  if (!r.step_class) {
    r.note = "all traffic already offloaded; no candidate step";
    r.any = r.condition_i;
    return r;
  }
  r.condition_iii = *r.step_class == TrafficClass::Bulk;

  // Resell the freed capacity at the licensed tariff, up to the latent pool.
  const double headroom = resale_headroom(scenario, pools, stepped);
  const double extra = std::min(headroom, current.admitted_extra + r.step_volume);
  r.resold_volume = std::max(0.0, extra - current.admitted_extra);
  stepped.admitted_extra = std::max(current.admitted_extra, extra);

  JointProfile next = profile;
  next[provider] = stepped;
  auto after_placements = placements_for(scenario, pools, next);
  if (auto v = violated_constraint(scenario, after_placements)) {
    r.note = std::string("candidate step infeasible: ") + to_string(*v);
    r.any = r.condition_i || r.condition_iii;
    return r;
  }
  r.step_feasible = true;
  const MarketState after = materialize(scenario, pools, next);

  const auto sums = [&](const MarketState& s, NetworkKind n, double& rev, double& cost) {
    rev = 0.0;
    cost = 0.0;
    for (const auto& p : s.placements) {
      if (p.provider != provider) continue;
      cost += p.unit_cost * p.load;
      if (p.network == n && billable(s, n, p.cls)) rev += revenue(p.load, p.price);
    }
  };
  double rev_l_before, rev_l_after, rev_u_before, rev_u_after, cost_before, cost_after;
  sums(before, NetworkKind::LicensedAir, rev_l_before, cost_before);
  sums(after, NetworkKind::LicensedAir, rev_l_after, cost_after);
  sums(before, NetworkKind::UnlicensedAir, rev_u_before, cost_before);
  sums(after, NetworkKind::UnlicensedAir, rev_u_after, cost_after);

  const TrafficClass moved_class = *r.step_class;
  const double moved_price = scenario.provider(provider).price(NetworkKind::LicensedAir, moved_class);
  const double moved_revenue_before =
      billable(before, NetworkKind::LicensedAir, moved_class) ? revenue(r.step_volume, moved_price) : 0.0;

  r.revenue_yield = rev_l_after - (rev_l_before - moved_revenue_before);
  r.capacity_yield = cost_before - cost_after;
  r.unlicensed_reduction = (rev_u_before + moved_revenue_before) - rev_u_after;
  r.condition_ii = r.revenue_yield + r.capacity_yield > r.unlicensed_reduction + kTolerance;
  r.any = r.condition_i || r.condition_ii || r.condition_iii;
  r.note = "marginal step = one grid step (1/grid_steps) of offload";
  return r;
}

}  // namespace offload
