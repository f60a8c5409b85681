#include "offload_commons/market_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "offload_commons/error.hpp"

namespace offload {

const char* to_string(Constraint c) {
  switch (c) {
    case Constraint::SharedCapacity: return "shared_capacity";
    case Constraint::LicensedCapacity: return "licensed_capacity";
    case Constraint::BackhaulWifiOnly: return "backhaul_wifi_only";
    case Constraint::BackhaulCombined: return "backhaul_combined";
    case Constraint::ProfileBounds: return "profile_bounds";
  }
  return "unknown";
}

namespace {

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string out;
  for (const auto& issue : issues) {
    if (!out.empty()) out += "; ";
    out += issue.path.empty() ? issue.message : issue.path + ": " + issue.message;
  }
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)), issues_(std::move(issues)) {}

const char* to_string(TrafficClass c) {
  return c == TrafficClass::Bulk ? "bulk" : "premium";
}

const char* to_string(NetworkKind n) {
  switch (n) {
    case NetworkKind::UnlicensedAir: return "unlicensed";
    case NetworkKind::LicensedAir: return "licensed";
    case NetworkKind::Backhaul: return "backhaul";
  }
  return "unknown";
}

const char* to_string(ProviderId p) {
  return p == ProviderId::WifiOnly ? "wifi_only" : "combined";
}

const char* to_string(Segment s) {
  switch (s) {
    case Segment::WifiOnlySubscribers: return "wifi_only_subscribers";
    case Segment::CombinedCellular: return "combined_cellular";
    case Segment::WifiOnlyVisitors: return "wifi_only_visitors";
    case Segment::CombinedVisitors: return "combined_visitors";
  }
  return "unknown";
}

ProviderId home_provider(Segment s) {
  return (s == Segment::WifiOnlySubscribers || s == Segment::WifiOnlyVisitors)
             ? ProviderId::WifiOnly
             : ProviderId::Combined;
}

bool Provider::owns(NetworkKind kind) const {
  switch (kind) {
    case NetworkKind::UnlicensedAir:
    case NetworkKind::Backhaul: return true;
    case NetworkKind::LicensedAir: return licensed.has_value();
  }
  return false;
}

double Provider::price(NetworkKind network, TrafficClass cls) const {
  for (const auto& t : tariffs) {
    if (t.network == network && t.cls == cls) return t.price;
  }
  throw DomainError(std::string("provider ") + to_string(id) + " has no " +
                    to_string(network) + " tariff for class " + to_string(cls));
}

double DemandPool::allocated() const {
  double sum = 0.0;
  for (double a : allocation) sum += a;
  return sum;
}

bool DemandPool::conserves(double tol) const {
  if (std::abs(allocated() - total) > tol) return false;
  return std::all_of(allocation.begin(), allocation.end(),
                     [tol](double a) { return a >= -tol; });
}

Pools make_pools(double wifi_bulk, double wifi_premium, double cell_bulk,
                 double cell_premium) {
  Pools pools{};
  pools[index(TrafficClass::Bulk)].cls = TrafficClass::Bulk;
  pools[index(TrafficClass::Premium)].cls = TrafficClass::Premium;
  auto& bulk = pools[index(TrafficClass::Bulk)];
  auto& premium = pools[index(TrafficClass::Premium)];
  bulk[Segment::WifiOnlySubscribers] = wifi_bulk;
  bulk[Segment::CombinedCellular] = cell_bulk;
  premium[Segment::WifiOnlySubscribers] = wifi_premium;
  premium[Segment::CombinedCellular] = cell_premium;
  bulk.total = bulk.allocated();
  premium.total = premium.allocated();
  return pools;
}

double Scenario::unlicensed_unit_cost(ProviderId id) const {
  return unlicensed.cost_per_unit + provider(id).backhaul.cost_per_unit;
}

double MarketState::quality(NetworkKind network) const {
  if (network == NetworkKind::LicensedAir) {
    if (!qos.licensed) throw DomainError("state has no licensed network");
    return *qos.licensed;
  }
  return qos.unlicensed;
}

double MarketState::load(NetworkKind network) const {
  double sum = 0.0;
  for (const auto& p : placements) {
    if (p.network == network) sum += p.load;
  }
  return sum;
}

double MarketState::load(ProviderId provider, NetworkKind network) const {
  double sum = 0.0;
  for (const auto& p : placements) {
    if (p.provider == provider && p.network == network) sum += p.load;
  }
  return sum;
}

double qos(double total_demand, double capacity) {
  if (!(capacity > 0.0)) throw DomainError("qos: capacity must be positive");
  if (total_demand < -kTolerance) throw DomainError("qos: negative demand");
  if (total_demand > capacity + kTolerance) {
    throw DomainError("qos: demand " + std::to_string(total_demand) +
                      " exceeds capacity " + std::to_string(capacity));
  }
  return std::clamp(1.0 - total_demand / capacity, 0.0, 1.0);
}

DeltaTerms delta_terms(double p_from, double p_to, double q_from, double q_to) {
  return {p_from - p_to, q_from - q_to};
}

double demand_response(double base, double delta_price, double delta_quality,
                       Elasticity elasticity) {
  if (base < 0.0) throw DomainError("demand_response: negative base demand");
  const double factor =
      1.0 + elasticity.price * delta_price - elasticity.quality * delta_quality;
  return base * std::max(0.0, factor);
}

double revenue(double demand, double price) { return demand * price; }

bool billable(const MarketState& state, NetworkKind network, TrafficClass cls) {
  return state.quality(network) >= state.min_quality[index(cls)] - kTolerance;
}

double placement_profit(const Placement& placement, const MarketState& state) {
  const double earned = billable(state, placement.network, placement.cls)
                            ? revenue(placement.load, placement.price)
                            : 0.0;
  return earned - placement.unit_cost * placement.load;
}

double provider_profit(const Provider& provider, const MarketState& state) {
  double total = 0.0;
  for (const auto& p : state.placements) {
    if (p.provider != provider.id) continue;
    if (!provider.owns(p.network)) {
      throw DomainError(std::string("provider ") + to_string(provider.id) +
                        " does not own a " + to_string(p.network) + " network");
    }
    total += placement_profit(p, state);
  }
  return total;
}

void rederive(const Scenario& scenario, MarketState& state) {
  const double shared = state.load(NetworkKind::UnlicensedAir);
  if (shared > scenario.unlicensed.capacity + kTolerance) {
    throw InfeasibleError(Constraint::SharedCapacity,
                          "unlicensed demand " + std::to_string(shared) +
                              " exceeds shared capacity " +
                              std::to_string(scenario.unlicensed.capacity));
  }
  for (ProviderId id : kProviders) {
    const double own = state.load(id, NetworkKind::UnlicensedAir);
    const double cap = scenario.provider(id).backhaul.capacity;
    if (own > cap + kTolerance) {
      throw InfeasibleError(id == ProviderId::WifiOnly ? Constraint::BackhaulWifiOnly
                                                       : Constraint::BackhaulCombined,
                            std::string("unlicensed throughput of ") + to_string(id) +
                                " exceeds its backhaul capacity " + std::to_string(cap));
    }
  }
  state.qos.unlicensed = qos(std::min(shared, scenario.unlicensed.capacity),
                             scenario.unlicensed.capacity);

  const auto& licensed = scenario.provider(ProviderId::Combined).licensed;
  const double licensed_load = state.load(NetworkKind::LicensedAir);
  if (licensed) {
    if (licensed_load > licensed->capacity + kTolerance) {
      throw InfeasibleError(Constraint::LicensedCapacity,
                            "licensed demand " + std::to_string(licensed_load) +
                                " exceeds licensed capacity " +
                                std::to_string(licensed->capacity));
    }
    state.qos.licensed = qos(std::min(licensed_load, licensed->capacity), licensed->capacity);
  } else {
    state.qos.licensed.reset();
  }

  for (TrafficClass c : kTrafficClasses) {
    state.min_quality[index(c)] = scenario.min_quality(c);
  }
  for (ProviderId id : kProviders) {
    state.profits[index(id)] = provider_profit(scenario.provider(id), state);
  }
}

}  // namespace offload
