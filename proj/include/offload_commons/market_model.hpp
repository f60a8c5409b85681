#pragma once

// Domain types and closed-form expressions of the two-provider offload
// market: one Wi-Fi-only provider and one combined (cellular + Wi-Fi)
// provider sharing a single unlicensed band.

#include <array>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace offload {

/// Absolute tolerance used for all money/traffic/quality comparisons.
inline constexpr double kTolerance = 1e-9;

enum class TrafficClass { Bulk = 0, Premium = 1 };
inline constexpr std::array<TrafficClass, 2> kTrafficClasses{TrafficClass::Bulk,
                                                             TrafficClass::Premium};

enum class NetworkKind { UnlicensedAir, LicensedAir, Backhaul };

enum class ProviderId { WifiOnly = 0, Combined = 1 };
inline constexpr std::array<ProviderId, 2> kProviders{ProviderId::WifiOnly,
                                                      ProviderId::Combined};

constexpr std::size_t index(TrafficClass c) { return static_cast<std::size_t>(c); }
constexpr std::size_t index(ProviderId p) { return static_cast<std::size_t>(p); }
constexpr ProviderId opponent_of(ProviderId p) {
  return p == ProviderId::WifiOnly ? ProviderId::Combined : ProviderId::WifiOnly;
}

const char* to_string(TrafficClass c);
const char* to_string(NetworkKind n);
const char* to_string(ProviderId p);

struct ClassSpec {
  TrafficClass id = TrafficClass::Bulk;
  double min_quality = 0.0;
  double unit_price_hint = 0.0;

  bool operator==(const ClassSpec&) const = default;
};

struct NetworkResource {
  NetworkKind kind = NetworkKind::UnlicensedAir;
  double capacity = 0.0;
  double cost_per_unit = 0.0;
  std::optional<ProviderId> owner;  // nullopt: shared

  bool operator==(const NetworkResource&) const = default;
};

struct Tariff {
  NetworkKind network = NetworkKind::UnlicensedAir;
  TrafficClass cls = TrafficClass::Bulk;
  double price = 0.0;

  bool operator==(const Tariff&) const = default;
};

struct Provider {
  ProviderId id = ProviderId::WifiOnly;
  NetworkResource backhaul;                // caps unlicensed-path throughput
  std::optional<NetworkResource> licensed;
  std::vector<Tariff> tariffs;
  double resale_pool = 0.0;                // latent cellular demand for freed capacity

  bool owns(NetworkKind kind) const;
  /// Throws DomainError when no tariff exists for (network, class).
  double price(NetworkKind network, TrafficClass cls) const;

  bool operator==(const Provider&) const = default;
};

/// Where a block of customers is homed. Visitors are roaming users admitted
/// on a host's unlicensed path.
enum class Segment {
  WifiOnlySubscribers = 0,
  CombinedCellular = 1,
  WifiOnlyVisitors = 2,
  CombinedVisitors = 3,
};
inline constexpr std::size_t kSegmentCount = 4;
constexpr std::size_t index(Segment s) { return static_cast<std::size_t>(s); }
const char* to_string(Segment s);
ProviderId home_provider(Segment s);

struct DemandPool {
  TrafficClass cls = TrafficClass::Bulk;
  double total = 0.0;
  std::array<double, kSegmentCount> allocation{};

  double& operator[](Segment s) { return allocation[index(s)]; }
  double operator[](Segment s) const { return allocation[index(s)]; }
  double allocated() const;
  /// |allocated() - total| <= tol and every entry >= -tol.
  bool conserves(double tol = kTolerance) const;

  bool operator==(const DemandPool&) const = default;
};

using Pools = std::array<DemandPool, 2>;

Pools make_pools(double wifi_bulk, double wifi_premium, double cell_bulk,
                 double cell_premium);

/// The economic setup at one <loc, t>: shared band, classes, both providers
/// and the initial customer pools.
struct Scenario {
  std::string loc = "loc";
  int t = 0;
  NetworkResource unlicensed{NetworkKind::UnlicensedAir, 1.0, 0.0, std::nullopt};
  std::array<ClassSpec, 2> classes{};
  std::array<Provider, 2> providers{};
  Pools pools{};

  const Provider& provider(ProviderId id) const { return providers[index(id)]; }
  const ClassSpec& traffic_class(TrafficClass c) const { return classes[index(c)]; }
  double min_quality(TrafficClass c) const { return classes[index(c)].min_quality; }
  /// Shared-air cost plus the provider's backhaul cost.
  double unlicensed_unit_cost(ProviderId id) const;

  bool operator==(const Scenario&) const = default;
};

/// One carried block of traffic.
struct Placement {
  ProviderId provider = ProviderId::WifiOnly;
  NetworkKind network = NetworkKind::UnlicensedAir;
  TrafficClass cls = TrafficClass::Bulk;
  double load = 0.0;
  double price = 0.0;
  double unit_cost = 0.0;

  bool operator==(const Placement&) const = default;
};

struct DerivedQos {
  double unlicensed = 1.0;
  std::optional<double> licensed;

  bool operator==(const DerivedQos&) const = default;
};

struct MarketState {
  std::string loc_tag;
  int round = 0;
  Pools pools{};
  std::vector<Placement> placements;
  DerivedQos qos;
  std::array<double, 2> min_quality{};  // per class, copied from the scenario
  std::array<double, 2> profits{};      // per provider

  double quality(NetworkKind network) const;
  double load(NetworkKind network) const;
  double load(ProviderId provider, NetworkKind network) const;
  double profit(ProviderId p) const { return profits[index(p)]; }

  bool operator==(const MarketState&) const = default;
};

// ---------------------------------------------------------------------------
// Closed-form expressions

/// Congestion quality 1 - d/C. Throws DomainError when capacity <= 0,
/// demand < 0 or demand > capacity (beyond kTolerance).
double qos(double total_demand, double capacity);

struct DeltaTerms {
  double price = 0.0;    // p_from - p_to
  double quality = 0.0;  // q_from - q_to
};

/// Differentials of switching from the current contract (`from`) to an
/// alternative offer (`to`).
DeltaTerms delta_terms(double p_from, double p_to, double q_from, double q_to);

struct Elasticity {
  double quality = 1.0;  // alpha
  double price = 0.0;    // beta

  bool operator==(const Elasticity&) const = default;
};

/// base * max(0, 1 + beta*dp - alpha*dq). dp is the price saved by switching
/// to the offer, dq the quality given up.
double demand_response(double base, double delta_price, double delta_quality,
                       Elasticity elasticity);

double revenue(double demand, double price);

/// True when traffic of `cls` on `network` meets its class quality floor.
bool billable(const MarketState& state, NetworkKind network, TrafficClass cls);

/// Profit of a single placement: revenue when billable, minus E*load always.
double placement_profit(const Placement& placement, const MarketState& state);

/// Sum of placement_profit over the provider's placements. Throws
/// DomainError when the state places traffic of this provider on a network
/// it does not own.
double provider_profit(const Provider& provider, const MarketState& state);

/// Recompute derived QoS and profits from the placements already in the
/// state (capacity checks included).
void rederive(const Scenario& scenario, MarketState& state);

}  // namespace offload
