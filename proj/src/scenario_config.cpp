#include "offload_commons/scenario_config.hpp"

#include <fstream>
#include <sstream>

namespace offload {

using nlohmann::json;

SimulationOptions ScenarioConfig::simulation_options() const {
  SimulationOptions o;
  o.policy = policy;
  o.rounds = rounds;
  o.grid_steps = grid_steps;
  o.events = events;
  return o;
}

namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

// Walks the document and records every problem instead of stopping at the
// first one.
class Reader {
 public:
  std::vector<ConfigIssue> issues;

  void issue(std::string path, std::string message) {
    issues.push_back({std::move(path), std::move(message)});
  }

  const json& object(const json& parent, const char* key, const std::string& path, bool required) {
    static const json kEmpty = json::object();
    const std::string p = join(path, key);
    if (!parent.is_object() || !parent.contains(key) || parent.at(key).is_null()) {
      if (required) issue(p, "missing required object");
      return kEmpty;
    }
    const json& v = parent.at(key);
    if (!v.is_object()) {
      issue(p, "expected an object");
      return kEmpty;
    }
    return v;
  }

  double number(const json& parent, const char* key, const std::string& path,
                std::optional<double> fallback) {
    const std::string p = join(path, key);
    if (!parent.is_object() || !parent.contains(key) || parent.at(key).is_null()) {
      if (!fallback) issue(p, "missing required number");
      return fallback.value_or(0.0);
    }
    const json& v = parent.at(key);
    if (!v.is_number()) {
      issue(p, "expected a number");
      return fallback.value_or(0.0);
    }
    return v.get<double>();
  }

  std::optional<double> optional_number(const json& parent, const char* key,
                                        const std::string& path) {
    if (!parent.is_object() || !parent.contains(key) || parent.at(key).is_null()) {
      return std::nullopt;
    }
    return number(parent, key, path, 0.0);
  }

  long long integer(const json& parent, const char* key, const std::string& path,
                    long long fallback) {
    const std::string p = join(path, key);
    if (!parent.is_object() || !parent.contains(key) || parent.at(key).is_null()) return fallback;
    const json& v = parent.at(key);
    if (!v.is_number_integer()) {
      issue(p, "expected an integer");
      return fallback;
    }
    return v.get<long long>();
  }

  std::string string(const json& parent, const char* key, const std::string& path,
                     const std::string& fallback) {
    const std::string p = join(path, key);
    if (!parent.is_object() || !parent.contains(key) || parent.at(key).is_null()) return fallback;
    const json& v = parent.at(key);
    if (!v.is_string()) {
      issue(p, "expected a string");
      return fallback;
    }
    return v.get<std::string>();
  }
};

std::optional<ProviderId> provider_from(const std::string& s) {
  if (s == "wifi_only") return ProviderId::WifiOnly;
  if (s == "combined") return ProviderId::Combined;
  return std::nullopt;
}

void read_tariffs(Reader& r, const json& node, const std::string& path, NetworkKind network,
                  const std::array<ClassSpec, 2>& classes, bool required,
                  std::vector<Tariff>& out) {
  const json& t = r.object(node, to_string(network), path, required);
  const std::string p = join(path, to_string(network));
  for (TrafficClass c : kTrafficClasses) {
    const double price = required ? r.number(t, to_string(c), p, std::nullopt)
                                  : r.number(t, to_string(c), p, classes[index(c)].unit_price_hint);
    out.push_back({network, c, price});
  }
}

StrategyProfile read_profile(Reader& r, const json& node, const std::string& path,
                             const StrategyProfile& fallback) {
  StrategyProfile s = fallback;
  const json& off = r.object(node, "offload", path, false);
  for (TrafficClass c : kTrafficClasses) {
    s.offload[index(c)] =
        r.number(off, to_string(c), join(path, "offload"), fallback.offload[index(c)]);
  }
  s.admitted_extra = r.number(node, "admitted_extra", path, fallback.admitted_extra);
  s.filler_load = r.number(node, "filler_load", path, fallback.filler_load);
  return s;
}

}  // namespace

ScenarioConfig scenario_from_json(const json& doc) {
  Reader r;
  ScenarioConfig cfg;
  if (!doc.is_object()) throw ConfigError(std::vector<ConfigIssue>{{"", "scenario document must be a JSON object"}});

  cfg.schema_version = static_cast<int>(r.integer(doc, "schema_version", "", kSchemaVersion));
  auto& m = cfg.market;
  m.loc = r.string(doc, "loc", "", "loc");
  m.t = static_cast<int>(r.integer(doc, "t", "", 0));

  const json& classes = r.object(doc, "classes", "", true);
  for (TrafficClass c : kTrafficClasses) {
    const std::string p = join("classes", to_string(c));
    const json& node = r.object(classes, to_string(c), "classes", true);
    m.classes[index(c)] = {c, r.number(node, "min_quality", p, std::nullopt),
                           r.number(node, "unit_price_hint", p, 0.0)};
  }

  const json& air = r.object(doc, "unlicensed", "", true);
  m.unlicensed = {NetworkKind::UnlicensedAir, r.number(air, "capacity", "unlicensed", std::nullopt),
                  r.number(air, "cost_per_unit", "unlicensed", 0.0), std::nullopt};

  const json& providers = r.object(doc, "providers", "", true);
  for (ProviderId id : kProviders) {
    const std::string p = join("providers", to_string(id));
    const json& node = r.object(providers, to_string(id), "providers", true);
    Provider& prov = m.providers[index(id)];
    prov.id = id;
    const json& bh = r.object(node, "backhaul", p, true);
    prov.backhaul = {NetworkKind::Backhaul, r.number(bh, "capacity", join(p, "backhaul"), std::nullopt),
                     r.number(bh, "cost_per_unit", join(p, "backhaul"), 0.0), id};
    const json& tariffs = r.object(node, "tariffs", p, true);
    prov.tariffs.clear();
    if (id == ProviderId::Combined) {
      const json& lic = r.object(node, "licensed", p, true);
      prov.licensed = NetworkResource{NetworkKind::LicensedAir,
                                      r.number(lic, "capacity", join(p, "licensed"), std::nullopt),
                                      r.number(lic, "cost_per_unit", join(p, "licensed"), std::nullopt),
                                      id};
      read_tariffs(r, tariffs, join(p, "tariffs"), NetworkKind::LicensedAir, m.classes, true,
                   prov.tariffs);
      read_tariffs(r, tariffs, join(p, "tariffs"), NetworkKind::UnlicensedAir, m.classes, false,
                   prov.tariffs);
      prov.resale_pool = r.number(node, "resale_pool", p, 0.0);
    } else {
      if (node.contains("licensed")) {
        r.issue(join(p, "licensed"), "the Wi-Fi-only provider cannot own licensed spectrum");
      }
      read_tariffs(r, tariffs, join(p, "tariffs"), NetworkKind::UnlicensedAir, m.classes, true,
                   prov.tariffs);
    }
  }

  const json& wifi_demand = r.object(r.object(providers, "wifi_only", "providers", false), "demand",
                                     "providers.wifi_only", false);
  const json& cell_demand = r.object(r.object(providers, "combined", "providers", false), "demand",
                                     "providers.combined", false);
  m.pools = make_pools(r.number(wifi_demand, "bulk", "providers.wifi_only.demand", 0.0),
                       r.number(wifi_demand, "premium", "providers.wifi_only.demand", 0.0),
                       r.number(cell_demand, "bulk", "providers.combined.demand", 0.0),
                       r.number(cell_demand, "premium", "providers.combined.demand", 0.0));

  const json& init = r.object(doc, "initial_strategy", "", false);
  const JointProfile base = baseline_profile();
  cfg.initial.wifi_only = read_profile(r, r.object(init, "wifi_only", "initial_strategy", false),
                                       "initial_strategy.wifi_only", base.wifi_only);
  cfg.initial.combined = read_profile(r, r.object(init, "combined", "initial_strategy", false),
                                      "initial_strategy.combined", base.combined);

  const json& mig = r.object(doc, "migration", "", false);
  const json& el = r.object(mig, "elasticity", "migration", false);
  const MigrationRule defaults;
  cfg.migration.elasticity = {
      r.number(el, "alpha", "migration.elasticity", defaults.elasticity.quality),
      r.number(el, "beta", "migration.elasticity", defaults.elasticity.price)};
  cfg.migration.migration_cap = r.number(mig, "cap", "migration", defaults.migration_cap);
  cfg.migration.hysteresis = r.number(mig, "hysteresis", "migration", defaults.hysteresis);

  const std::string policy = r.string(doc, "policy", "", "static");
  if (policy == "static") {
    cfg.policy = StrategyPolicy::Static;
  } else if (policy == "best_response_each_round") {
    cfg.policy = StrategyPolicy::BestResponseEachRound;
  } else {
    r.issue("policy", "unknown policy '" + policy + "' (static | best_response_each_round)");
  }

  const json& th = r.object(doc, "thresholds", "", false);
  cfg.thresholds.deadlock_quality = r.optional_number(th, "deadlock_quality", "thresholds");
  cfg.thresholds.relative_gap = r.number(th, "relative_gap", "thresholds", 0.25);

  cfg.grid_steps = static_cast<int>(r.integer(doc, "grid_steps", "", cfg.grid_steps));
  cfg.rounds = static_cast<int>(r.integer(doc, "rounds", "", cfg.rounds));
  if (doc.contains("seed") && !doc.at("seed").is_null()) {
    if (doc.at("seed").is_number_unsigned() || doc.at("seed").is_number_integer()) {
      cfg.seed = doc.at("seed").get<std::uint64_t>();
    } else {
      r.issue("seed", "expected a non-negative integer");
    }
  }

  if (doc.contains("events")) {
    const json& events = doc.at("events");
    if (!events.is_array()) {
      r.issue("events", "expected an array");
    } else {
      for (std::size_t k = 0; k < events.size(); ++k) {
        const std::string p = "events[" + std::to_string(k) + "]";
        const json& e = events[k];
        Event ev;
        ev.round = static_cast<int>(r.integer(e, "round", p, 1));
        const std::string type = r.string(e, "type", p, "");
        const std::string target =
            r.string(e, type == "sabotage" ? "saboteur" : "target", p, "combined");
        if (type == "roaming") {
          ev.kind = EventKind::Roaming;
          ev.influx = r.number(e, "influx", p, std::nullopt);
        } else if (type == "sabotage") {
          ev.kind = EventKind::Sabotage;
        } else {
          r.issue(join(p, "type"), "unknown event type '" + type + "' (roaming | sabotage)");
        }
        if (auto id = provider_from(target)) {
          ev.target = *id;
        } else {
          r.issue(p, "unknown provider '" + target + "'");
        }
        cfg.events.push_back(ev);
      }
    }
  }

  if (doc.contains("sweep") && !doc.at("sweep").is_null()) {
    const json& sweep = r.object(doc, "sweep", "", false);
    const json params = sweep.value("parameters", json::array());
    if (!params.is_array()) r.issue("sweep.parameters", "expected an array");
    for (std::size_t k = 0; params.is_array() && k < params.size(); ++k) {
      const std::string p = "sweep.parameters[" + std::to_string(k) + "]";
      const json& node = params[k];
      SweepParameter sp;
      sp.pointer = r.string(node, "pointer", p, "");
      if (node.contains("values")) {
        if (!node.at("values").is_array()) {
          r.issue(join(p, "values"), "expected an array of numbers");
        } else {
          for (const auto& v : node.at("values")) {
            if (v.is_number()) sp.values.push_back(v.get<double>());
            else r.issue(join(p, "values"), "expected an array of numbers");
          }
        }
      } else {
        const double from = r.number(node, "from", p, std::nullopt);
        const double to = r.number(node, "to", p, std::nullopt);
        const long long steps = r.integer(node, "steps", p, 1);
        if (steps < 1) r.issue(join(p, "steps"), "must be >= 1");
        for (long long s = 0; s <= std::max(1LL, steps); ++s) {
          sp.values.push_back(from + (to - from) * static_cast<double>(s) /
                                         static_cast<double>(std::max(1LL, steps)));
        }
      }
      cfg.sweep.push_back(std::move(sp));
    }
  }

  auto semantic = validate(cfg);
  if (r.issues.empty()) {
    r.issues = std::move(semantic);
  } else {
    // Structural problems make some semantic checks meaningless; keep the
    // ones on fields that did parse.
    for (auto& i : semantic) {
      if (i.path != "initial_strategy" && i.path != "providers") r.issues.push_back(std::move(i));
    }
  }
  if (!r.issues.empty()) throw ConfigError(std::move(r.issues));
  return cfg;
}

std::vector<ConfigIssue> validate(const ScenarioConfig& cfg) {
  std::vector<ConfigIssue> issues;
  const auto add = [&](std::string path, std::string msg) {
    issues.push_back({std::move(path), std::move(msg)});
  };
  const auto& m = cfg.market;

  if (cfg.schema_version != kSchemaVersion) {
    add("schema_version", "unsupported schema version " + std::to_string(cfg.schema_version));
  }
  for (TrafficClass c : kTrafficClasses) {
    const double q = m.min_quality(c);
    if (!(q >= 0.0 && q <= 1.0)) {
      add(std::string("classes.") + to_string(c) + ".min_quality", "must lie in [0,1]");
    }
  }
  if (!(m.min_quality(TrafficClass::Premium) > m.min_quality(TrafficClass::Bulk))) {
    add("classes", "class ordering violated: premium min_quality must exceed bulk min_quality");
  }
  if (!(m.unlicensed.capacity > 0.0)) add("unlicensed.capacity", "must be positive");
  if (m.unlicensed.cost_per_unit < 0.0) add("unlicensed.cost_per_unit", "must be >= 0");

  for (ProviderId id : kProviders) {
    const auto& prov = m.provider(id);
    const std::string p = std::string("providers.") + to_string(id);
    if (!(prov.backhaul.capacity > 0.0)) add(p + ".backhaul.capacity", "must be positive");
    if (prov.backhaul.cost_per_unit < 0.0) add(p + ".backhaul.cost_per_unit", "must be >= 0");
    for (const auto& t : prov.tariffs) {
      if (t.price < 0.0) {
        add(p + ".tariffs." + to_string(t.network) + "." + to_string(t.cls), "price must be >= 0");
      }
    }
    if (prov.resale_pool < 0.0) add(p + ".resale_pool", "must be >= 0");
    if (prov.licensed) {
      if (!(prov.licensed->capacity > 0.0)) add(p + ".licensed.capacity", "must be positive");
      const double path_cost = m.unlicensed.cost_per_unit + prov.backhaul.cost_per_unit;
      if (!(prov.licensed->cost_per_unit > path_cost)) {
        add(p + ".licensed.cost_per_unit",
            "cost ordering violated: licensed cost per unit must exceed the unlicensed path cost "
            "(unlicensed.cost_per_unit + backhaul.cost_per_unit)");
      }
      bool priced = false;
      for (const auto& t : prov.tariffs) priced = priced || t.network == NetworkKind::LicensedAir;
      if (!priced) add(p + ".tariffs.licensed", "licensed network without tariffs");
    }
  }
  for (TrafficClass c : kTrafficClasses) {
    for (std::size_t s = 0; s < kSegmentCount; ++s) {
      if (m.pools[index(c)].allocation[s] < 0.0) {
        add(std::string("providers.") + to_string(home_provider(static_cast<Segment>(s))) +
                ".demand." + to_string(c),
            "demand must be >= 0");
      }
    }
  }

  const auto& mr = cfg.migration;
  if (!(mr.migration_cap >= 0.0 && mr.migration_cap <= 1.0)) add("migration.cap", "must lie in [0,1]");
  if (mr.hysteresis < 0.0) add("migration.hysteresis", "must be >= 0");
  if (mr.elasticity.quality < 0.0) add("migration.elasticity.alpha", "must be >= 0");
  if (mr.elasticity.price < 0.0) add("migration.elasticity.beta", "must be >= 0");
  if (cfg.thresholds.relative_gap < 0.0) add("thresholds.relative_gap", "must be >= 0");
  if (cfg.thresholds.deadlock_quality &&
      !(*cfg.thresholds.deadlock_quality >= 0.0 && *cfg.thresholds.deadlock_quality <= 1.0)) {
    add("thresholds.deadlock_quality", "must lie in [0,1]");
  }
  if (cfg.grid_steps < 2 || cfg.grid_steps > 12) add("grid_steps", "must lie in [2, 12]");
  if (cfg.rounds < 1) add("rounds", "must be >= 1");

  for (std::size_t k = 0; k < cfg.events.size(); ++k) {
    const auto& e = cfg.events[k];
    const std::string p = "events[" + std::to_string(k) + "]";
    if (e.round < 1) add(p + ".round", "must be >= 1");
    if (e.kind == EventKind::Roaming && e.influx < 0.0) add(p + ".influx", "must be >= 0");
    if (e.kind == EventKind::Sabotage && !m.provider(e.target).licensed) {
      add(p + ".saboteur", "saboteur needs a licensed fallback network");
    }
  }

  if (cfg.sweep.size() > 2) add("sweep.parameters", "at most two parameters can be swept");
  if (!cfg.sweep.empty()) {
    const json doc = to_json(cfg);
    for (std::size_t k = 0; k < cfg.sweep.size(); ++k) {
      const auto& sp = cfg.sweep[k];
      const std::string p = "sweep.parameters[" + std::to_string(k) + "]";
      if (sp.values.empty()) add(p + ".values", "no sweep values");
      try {
        const json::json_pointer ptr(sp.pointer);
        if (!doc.contains(ptr) || !doc.at(ptr).is_number()) {
          add(p + ".pointer", "'" + sp.pointer + "' does not name a numeric scenario field");
        }
      } catch (const json::exception&) {
        add(p + ".pointer", "malformed JSON pointer '" + sp.pointer + "'");
      }
    }
  }

  if (!issues.empty()) return issues;

  // Placement invariants of the initial state.
  for (ProviderId id : kProviders) {
    try {
      validate_profile(m, id, cfg.initial[id], m.pools);
    } catch (const DomainError& e) {
      add(std::string("initial_strategy.") + to_string(id), e.what());
    }
  }
  if (!issues.empty()) return issues;
  const auto placements = placements_for(m, m.pools, cfg.initial);
  if (auto v = violated_constraint(m, placements)) {
    switch (*v) {
      case Constraint::SharedCapacity:
        add("providers", "shared-capacity bound violated: initial unlicensed demand exceeds "
                         "unlicensed.capacity");
        break;
      case Constraint::LicensedCapacity:
        add("providers.combined.licensed.capacity",
            "licensed capacity bound violated by the initial placement");
        break;
      case Constraint::BackhaulWifiOnly:
        add("providers.wifi_only.backhaul.capacity",
            "backhaul bound violated by the initial placement");
        break;
      case Constraint::BackhaulCombined:
        add("providers.combined.backhaul.capacity",
            "backhaul bound violated by the initial placement");
        break;
      case Constraint::ProfileBounds:
        add("initial_strategy", "profile out of bounds");
        break;
    }
  }
  return issues;
}

namespace {

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k + 1 < byte && k < text.size(); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto [line, col] = line_column(text, e.byte);
    throw ConfigError(std::vector<ConfigIssue>{{"", "parse error at line " + std::to_string(line) + ", column " +
                                std::to_string(col) + ": " + e.what()}});
  }
  return scenario_from_json(doc);
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(std::vector<ConfigIssue>{{"", "cannot open scenario file '" + path + "'"}});
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_scenario(buffer.str());
}

json to_json(const JointProfile& profile) {
  json out = json::object();
  for (ProviderId id : kProviders) {
    const auto& s = profile[id];
    out[to_string(id)] = {{"offload", {{"bulk", s.offload[0]}, {"premium", s.offload[1]}}},
                          {"admitted_extra", s.admitted_extra},
                          {"filler_load", s.filler_load}};
  }
  return out;
}

json to_json(const ScenarioConfig& cfg) {
  const auto& m = cfg.market;
  json doc = json::object();
  doc["schema_version"] = cfg.schema_version;
  doc["loc"] = m.loc;
  doc["t"] = m.t;
  for (TrafficClass c : kTrafficClasses) {
    doc["classes"][to_string(c)] = {{"min_quality", m.min_quality(c)},
                                    {"unit_price_hint", m.traffic_class(c).unit_price_hint}};
  }
  doc["unlicensed"] = {{"capacity", m.unlicensed.capacity},
                       {"cost_per_unit", m.unlicensed.cost_per_unit}};
  for (ProviderId id : kProviders) {
    const auto& prov = m.provider(id);
    json node = json::object();
    node["backhaul"] = {{"capacity", prov.backhaul.capacity},
                        {"cost_per_unit", prov.backhaul.cost_per_unit}};
    for (const auto& t : prov.tariffs) node["tariffs"][to_string(t.network)][to_string(t.cls)] = t.price;
    if (prov.licensed) {
      node["licensed"] = {{"capacity", prov.licensed->capacity},
                          {"cost_per_unit", prov.licensed->cost_per_unit}};
      node["resale_pool"] = prov.resale_pool;
    }
    const Segment home =
        id == ProviderId::WifiOnly ? Segment::WifiOnlySubscribers : Segment::CombinedCellular;
    for (TrafficClass c : kTrafficClasses) node["demand"][to_string(c)] = m.pools[index(c)][home];
    doc["providers"][to_string(id)] = node;
  }
  doc["initial_strategy"] = to_json(cfg.initial);
  doc["migration"] = {{"elasticity", {{"alpha", cfg.migration.elasticity.quality},
                                      {"beta", cfg.migration.elasticity.price}}},
                      {"cap", cfg.migration.migration_cap},
                      {"hysteresis", cfg.migration.hysteresis}};
  doc["policy"] = to_string(cfg.policy);
  doc["thresholds"] = {{"relative_gap", cfg.thresholds.relative_gap},
                       {"deadlock_quality", cfg.thresholds.deadlock_quality
                                                ? json(*cfg.thresholds.deadlock_quality)
                                                : json(nullptr)}};
  doc["grid_steps"] = cfg.grid_steps;
  doc["rounds"] = cfg.rounds;
  doc["seed"] = cfg.seed;
  json events = json::array();
  for (const auto& e : cfg.events) {
    json ev = {{"round", e.round}, {"type", to_string(e.kind)}};
    if (e.kind == EventKind::Roaming) {
      ev["influx"] = e.influx;
      ev["target"] = to_string(e.target);
    } else {
      ev["saboteur"] = to_string(e.target);
    }
    events.push_back(ev);
  }
  doc["events"] = events;
  if (!cfg.sweep.empty()) {
    json params = json::array();
    for (const auto& sp : cfg.sweep) params.push_back({{"pointer", sp.pointer}, {"values", sp.values}});
    doc["sweep"] = {{"parameters", params}};
  }
  return doc;
}

std::string serialize_scenario(const ScenarioConfig& config) {
  return to_json(config).dump(2) + "\n";
}

}  // namespace offload
