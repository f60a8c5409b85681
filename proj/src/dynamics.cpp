#include "offload_commons/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace offload {

void validate(const MigrationRule& rule) {
  if (!(rule.migration_cap >= 0.0 && rule.migration_cap <= 1.0)) {
    throw DomainError("migration_cap must lie in [0,1]");
  }
  if (rule.hysteresis < 0.0) throw DomainError("hysteresis must be >= 0");
  if (rule.elasticity.quality < 0.0 || rule.elasticity.price < 0.0) {
    throw DomainError("elasticities must be >= 0");
  }
}

const char* to_string(StrategyPolicy p) {
  return p == StrategyPolicy::Static ? "static" : "best_response_each_round";
}

const char* to_string(EventKind k) { return k == EventKind::Roaming ? "roaming" : "sabotage"; }

const char* to_string(OscillationKind k) {
  switch (k) {
    case OscillationKind::None: return "none";
    case OscillationKind::Periodic: return "periodic";
    case OscillationKind::Drift: return "drift";
    case OscillationKind::Irregular: return "irregular";
  }
  return "unknown";
}

double perceived_quality(const MarketState& state, const JointProfile& strategies, Segment segment,
                         TrafficClass cls) {
  const double qu = state.quality(NetworkKind::UnlicensedAir);
  switch (segment) {
    case Segment::WifiOnlySubscribers:
      return strategies.wifi_only.fraction(cls) * qu;
    case Segment::CombinedCellular: {
      const double f = strategies.combined.fraction(cls);
      if (!state.qos.licensed) return f * qu;
      return (1.0 - f) * *state.qos.licensed + f * qu;
    }
    case Segment::WifiOnlyVisitors:
    case Segment::CombinedVisitors:
      return qu;
  }
  return 0.0;
}

namespace {

double home_price(const Scenario& scenario, Segment segment, TrafficClass cls) {
  const auto& comb = scenario.provider(ProviderId::Combined);
  if (segment == Segment::CombinedCellular) {
    return comb.licensed ? comb.price(NetworkKind::LicensedAir, cls)
                         : comb.price(NetworkKind::UnlicensedAir, cls);
  }
  return scenario.provider(home_provider(segment)).price(NetworkKind::UnlicensedAir, cls);
}

// Switching pressure from `home` to `alternative`: relative demand change
// implied by demand_response, i.e. max(0, 1 + b*dp - a*dq) - 1.
double switching_pressure(double p_home, double p_alt, double q_home, double q_alt,
                          Elasticity elasticity) {
  const auto d = delta_terms(p_home, p_alt, q_home, q_alt);
  return demand_response(1.0, d.price, d.quality, elasticity) - 1.0;
}

// Loads on the four linear constraints: shared air, licensed, and the two
// backhauls.
std::array<double, 4> constraint_loads(const std::vector<Placement>& placements) {
  std::array<double, 4> l{};
  for (const auto& p : placements) {
    if (p.network == NetworkKind::UnlicensedAir) {
      l[0] += p.load;
      l[2 + index(p.provider)] += p.load;
    } else if (p.network == NetworkKind::LicensedAir) {
      l[1] += p.load;
    }
  }
  return l;
}

std::array<double, 4> constraint_caps(const Scenario& scenario) {
  const auto& lic = scenario.provider(ProviderId::Combined).licensed;
  return {scenario.unlicensed.capacity, lic ? lic->capacity : 0.0,
          scenario.provider(ProviderId::WifiOnly).backhaul.capacity,
          scenario.provider(ProviderId::Combined).backhaul.capacity};
}

Pools shifted(const Pools& pools, const std::array<double, 2>& moves, double scale) {
  Pools out = pools;
  for (TrafficClass c : kTrafficClasses) {
    const double v = moves[index(c)] * scale;
    out[index(c)][Segment::WifiOnlySubscribers] -= v;
    out[index(c)][Segment::CombinedCellular] += v;
  }
  return out;
}

}  // namespace

MarketState step(const Scenario& scenario, const MarketState& state, const MigrationRule& rule,
                 const JointProfile& strategies, std::vector<MigrationRecord>* log) {
  validate(rule);
  const MarketState pre = materialize(scenario, state.pools, strategies, state.round);

  // Positive: Wi-Fi-only subscribers -> combined cellular; negative: reverse.
  std::array<double, 2> moves{};
  for (TrafficClass c : kTrafficClasses) {
    const auto& pool = pre.pools[index(c)];
    if (!(pool.total > 0.0)) continue;
    const double qw = perceived_quality(pre, strategies, Segment::WifiOnlySubscribers, c);
    const double qc = perceived_quality(pre, strategies, Segment::CombinedCellular, c);
    const double pw = home_price(scenario, Segment::WifiOnlySubscribers, c);
    const double pc = home_price(scenario, Segment::CombinedCellular, c);
    const double to_cell = switching_pressure(pw, pc, qw, qc, rule.elasticity);
    const double to_wifi = switching_pressure(pc, pw, qc, qw, rule.elasticity);
    if (to_cell > rule.hysteresis) {
      moves[index(c)] = std::min(std::min(rule.migration_cap, to_cell) * pool.total,
                                 pool[Segment::WifiOnlySubscribers]);
    } else if (to_wifi > rule.hysteresis) {
      moves[index(c)] = -std::min(std::min(rule.migration_cap, to_wifi) * pool.total,
                                  pool[Segment::CombinedCellular]);
    }
  }

  // Loads are affine in the migration scale, so the largest feasible scale
  // follows directly from the two endpoints.
  double scale = 1.0;
  if (moves[0] != 0.0 || moves[1] != 0.0) {
    const auto base = constraint_loads(pre.placements);
    const auto full =
        constraint_loads(placements_for(scenario, shifted(pre.pools, moves, 1.0), strategies));
    const auto caps = constraint_caps(scenario);
    for (std::size_t k = 0; k < 4; ++k) {
      if (k == 1 && !scenario.provider(ProviderId::Combined).licensed) continue;
      if (full[k] > caps[k] + kTolerance && full[k] > base[k]) {
        scale = std::min(scale, std::max(0.0, (caps[k] - base[k]) / (full[k] - base[k])));
      }
    }
  }

  Pools next = shifted(pre.pools, moves, scale);
  for (TrafficClass c : kTrafficClasses) {
    auto& pool = next[index(c)];
    for (double& a : pool.allocation) a = std::max(0.0, a);
    const double v = moves[index(c)] * scale;
    if (log && v != 0.0) {
      log->push_back({state.round, c,
                      v > 0.0 ? Segment::WifiOnlySubscribers : Segment::CombinedCellular,
                      v > 0.0 ? Segment::CombinedCellular : Segment::WifiOnlySubscribers,
                      std::abs(v)});
    }
  }
  return materialize(scenario, next, strategies, state.round);
}

MarketState inject_roaming(const Scenario& scenario, const MarketState& state,
                           const JointProfile& strategies, double influx, ProviderId target,
                           double* admitted) {
  if (influx < 0.0) throw DomainError("inject_roaming: negative influx");
  const double free_shared =
      scenario.unlicensed.capacity - state.load(NetworkKind::UnlicensedAir);
  const double free_backhaul = scenario.provider(target).backhaul.capacity -
                               state.load(target, NetworkKind::UnlicensedAir);
  const double take = std::max(0.0, std::min({influx, free_shared, free_backhaul}));
  if (admitted) *admitted = take;
  Pools pools = state.pools;
  auto& bulk = pools[index(TrafficClass::Bulk)];
  bulk[target == ProviderId::WifiOnly ? Segment::WifiOnlyVisitors : Segment::CombinedVisitors] +=
      take;
  bulk.total += take;
  return materialize(scenario, pools, strategies, state.round);
}

StrategyProfile sabotage_strategy(const Scenario& scenario, const Pools& pools,
                                  ProviderId saboteur, const StrategyProfile& opponent) {
  if (!scenario.provider(saboteur).licensed) {
    throw DomainError(std::string("sabotage_strategy: ") + to_string(saboteur) +
                      " has no licensed fallback");
  }
  JointProfile probe;
  probe[opponent_of(saboteur)] = opponent;
  probe[saboteur] = StrategyProfile{};
  const auto placements = placements_for(scenario, pools, probe);
  double others = 0.0;  // everything on the band except the saboteur's strategic load
  double own_fixed = 0.0;
  for (const auto& p : placements) {
    if (p.network != NetworkKind::UnlicensedAir) continue;
    others += p.load;
    if (p.provider == saboteur) own_fixed += p.load;
  }
  double room = std::max(0.0, std::min(scenario.unlicensed.capacity - others,
                                       scenario.provider(saboteur).backhaul.capacity - own_fixed));

  StrategyProfile s;
  const double bulk = pools[index(TrafficClass::Bulk)][Segment::CombinedCellular];
  if (bulk > 0.0) {
    s.offload[index(TrafficClass::Bulk)] = std::min(1.0, room / bulk);
    room = std::max(0.0, room - s.offload[index(TrafficClass::Bulk)] * bulk);
  }
  s.filler_load = room;
  s.admitted_extra = resale_headroom(scenario, pools, s);
  return s;
}

StrategyProfile sabotage_strategy(const Scenario& scenario, ProviderId saboteur,
                                  const StrategyProfile& opponent) {
  return sabotage_strategy(scenario, scenario.pools, saboteur, opponent);
}

namespace {

BestResponse refine(const Scenario& scenario, const Pools& pools, ProviderId provider,
                    const StrategyProfile& opponent, int grid_steps, BestResponse best) {
  double span = 1.0 / grid_steps;
  for (int k = 0; k < kRefineMaxIterations && span > kRefineMinSpan; ++k) {
    const auto r =
        best_response_in_window(scenario, pools, provider, opponent, grid_steps, best.point, span);
    if (r.profit > best.profit + kTolerance) {
      best = r;
    } else {
      span *= 0.5;
    }
  }
  return best;
}

}  // namespace

BestResponse refined_best_response(const Scenario& scenario, const Pools& pools,
                                   ProviderId provider, const StrategyProfile& opponent,
                                   int grid_steps, const StrategyProfile* warm_start) {
  BestResponse best = refine(scenario, pools, provider, opponent, grid_steps,
                             best_response(scenario, pools, provider, opponent, grid_steps));
  if (!warm_start) return best;
  JointProfile joint;
  joint[provider] = *warm_start;
  joint[opponent_of(provider)] = opponent;
  const auto profit = evaluate_profit(scenario, pools, joint, provider);
  if (!profit) return best;
  BestResponse start{*warm_start, to_point(scenario, pools, provider, *warm_start), *profit};
  const BestResponse local = refine(scenario, pools, provider, opponent, grid_steps, start);
  return local.profit > best.profit + kTolerance ? local : best;
}

Trajectory simulate(const Scenario& scenario, const JointProfile& initial,
                    const MigrationRule& rule, const SimulationOptions& options) {
  if (options.rounds < 1) throw DomainError("simulate: rounds must be >= 1");
  validate(rule);

  Trajectory traj;
  traj.loc_tag = scenario.loc;
  JointProfile profile = initial;
  MarketState state = materialize(scenario, scenario.pools, profile, 0);
  traj.states.push_back(state);
  traj.profiles.push_back(profile);

  std::optional<ProviderId> saboteur;

  for (int t = 1; t <= options.rounds; ++t) {
    for (const auto& e : options.events) {
      if (e.round != t) continue;
      EventRecord rec{t, e.kind, e.target, e.influx, 0.0};
      if (e.kind == EventKind::Roaming) {
        state = inject_roaming(scenario, state, profile, e.influx, e.target, &rec.admitted);
      } else {
        saboteur = e.target;
        if (!scenario.provider(e.target).licensed) {
          throw DomainError("sabotage event targets a provider without licensed spectrum");
        }
      }
      traj.events.push_back(rec);
    }

    if (options.policy == StrategyPolicy::BestResponseEachRound) {
      for (ProviderId p : kProviders) {
        if (saboteur == p) continue;
        profile[p] = refined_best_response(scenario, state.pools, p, profile[opponent_of(p)],
                                           options.grid_steps, &profile[p])
                         .profile;
      }
    }
    if (saboteur) {
      profile[*saboteur] =
          sabotage_strategy(scenario, state.pools, *saboteur, profile[opponent_of(*saboteur)]);
    }

    state.round = t;
    state = step(scenario, state, rule, profile, &traj.migration_log);
    traj.states.push_back(state);
    traj.profiles.push_back(profile);
  }
  return traj;
}

Oscillation detect_oscillation(const Trajectory& trajectory) {
  const std::size_t n = trajectory.states.size();
  if (n < 4) throw DomainError("detect_oscillation: trajectory needs at least 4 states");

  struct Sample {
    std::array<double, 3> demand;  // Wi-Fi-only unlicensed, combined unlicensed, licensed
    double unlicensed_total;
  };
  std::vector<Sample> tail;
  for (std::size_t k = n / 2; k < n; ++k) {
    const auto& s = trajectory.states[k];
    const double wi = s.load(ProviderId::WifiOnly, NetworkKind::UnlicensedAir);
    const double cj = s.load(ProviderId::Combined, NetworkKind::UnlicensedAir);
    tail.push_back({{wi, cj, s.load(NetworkKind::LicensedAir)}, wi + cj});
  }
  const auto close = [](const Sample& a, const Sample& b) {
    for (std::size_t d = 0; d < 3; ++d) {
      if (std::abs(a.demand[d] - b.demand[d]) > kOscillationTolerance) return false;
    }
    return true;
  };

  if (std::all_of(tail.begin(), tail.end(), [&](const Sample& s) { return close(s, tail.front()); })) {
    return {};
  }

  double lo = tail.front().unlicensed_total;
  double hi = lo;
  for (const auto& s : tail) {
    lo = std::min(lo, s.unlicensed_total);
    hi = std::max(hi, s.unlicensed_total);
  }

  const std::size_t max_period = std::max<std::size_t>(2, n / 4);
  for (std::size_t p = 2; p <= max_period && 2 * p <= tail.size(); ++p) {
    bool repeats = true;
    for (std::size_t k = 0; k + p < tail.size() && repeats; ++k) {
      repeats = close(tail[k], tail[k + p]);
    }
    if (repeats) return {OscillationKind::Periodic, static_cast<int>(p), hi - lo, 0};
  }

  bool up = true;
  bool down = true;
  for (std::size_t k = 1; k < tail.size(); ++k) {
    const double d = tail[k].unlicensed_total - tail[k - 1].unlicensed_total;
    if (d < -kOscillationTolerance) up = false;
    if (d > kOscillationTolerance) down = false;
  }
  if (up != down) return {OscillationKind::Drift, 0, hi - lo, up ? 1 : -1};
  return {OscillationKind::Irregular, 0, hi - lo, 0};
}

}  // namespace offload
