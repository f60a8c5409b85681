#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <string>

#include "offload_commons/scenario_config.hpp"
#include "support/builders.hpp"

using namespace offload;
using namespace offload::testing;
using nlohmann::json;

namespace {

json document(const MarketSpec& s) {
  return {
      {"schema_version", 1},
      {"loc", s.loc},
      {"classes",
       {{"bulk", {{"min_quality", s.bulk_floor}, {"unit_price_hint", s.wifi_price_bulk}}},
        {"premium", {{"min_quality", s.premium_floor}, {"unit_price_hint", s.wifi_price_premium}}}}},
      {"unlicensed", {{"capacity", s.shared_capacity}, {"cost_per_unit", s.shared_cost}}},
      {"providers",
       {{"wifi_only",
         {{"backhaul", {{"capacity", s.wifi_backhaul}, {"cost_per_unit", s.wifi_backhaul_cost}}},
          {"tariffs", {{"unlicensed", {{"bulk", s.wifi_price_bulk}, {"premium", s.wifi_price_premium}}}}},
          {"demand", {{"bulk", s.wifi_bulk}, {"premium", s.wifi_premium}}}}},
        {"combined",
         {{"backhaul", {{"capacity", s.cell_backhaul}, {"cost_per_unit", s.cell_backhaul_cost}}},
          {"licensed", {{"capacity", s.licensed_capacity}, {"cost_per_unit", s.licensed_cost}}},
          {"tariffs", {{"licensed", {{"bulk", s.cell_price_bulk}, {"premium", s.cell_price_premium}}}}},
          {"demand", {{"bulk", s.cell_bulk}, {"premium", s.cell_premium}}},
          {"resale_pool", s.resale_pool}}}}}};
}

json random_document(Rng& rng) {
  json doc = document(random_market(rng));
  if (rng.coin()) {
    doc["migration"] = {{"elasticity", {{"alpha", rng.uniform(0, 3)}, {"beta", rng.uniform(0, 1)}}},
                        {"cap", rng.uniform(0, 1)},
                        {"hysteresis", rng.uniform(0, 0.2)}};
  }
  if (rng.coin()) doc["policy"] = "best_response_each_round";
  if (rng.coin()) doc["thresholds"] = {{"deadlock_quality", rng.uniform(0, 1)}, {"relative_gap", rng.uniform(0, 1)}};
  doc["grid_steps"] = rng.integer(2, 12);
  doc["rounds"] = rng.integer(1, 100);
  doc["seed"] = rng.integer(0, 1 << 30);
  if (rng.coin()) {
    doc["events"] = json::array({{{"round", rng.integer(1, 5)}, {"type", "roaming"}, {"target", "wifi_only"},
                                  {"influx", rng.uniform(0, 50)}},
                                 {{"round", rng.integer(1, 5)}, {"type", "sabotage"}, {"saboteur", "combined"}}});
  }
  if (rng.coin()) {
    doc["sweep"] = {{"parameters", json::array({{{"pointer", "/unlicensed/capacity"},
                                                 {"from", 50.0}, {"to", 150.0}, {"steps", rng.integer(1, 5)}}})}};
  }
  return doc;
}

std::vector<ConfigIssue> issues_of(const json& doc) {
  try {
    scenario_from_json(doc);
  } catch (const ConfigError& e) {
    return e.issues();
  }
  return {};
}

bool mentions(const std::vector<ConfigIssue>& issues, const std::string& path, const std::string& text) {
  return std::any_of(issues.begin(), issues.end(), [&](const ConfigIssue& i) {
    return i.path == path && i.message.find(text) != std::string::npos;
  });
}

json minimal() { return document(MarketSpec{}); }

}  // namespace

TEST_CASE("minimal document loads with defaults filled") {
  const auto cfg = scenario_from_json(minimal());
  CHECK(cfg.schema_version == kSchemaVersion);
  CHECK(cfg.grid_steps == 4);
  CHECK(cfg.rounds == 20);
  CHECK(cfg.seed == 0);
  CHECK(cfg.policy == StrategyPolicy::Static);
  CHECK(cfg.migration == MigrationRule{});
  CHECK(cfg.initial == baseline_profile());
  CHECK(cfg.thresholds.relative_gap == 0.25);
  CHECK_FALSE(cfg.thresholds.deadlock_quality);
  CHECK(cfg.market == build(MarketSpec{}));
  CHECK(validate(cfg).empty());
}

TEST_CASE("class ordering is validated") {
  json doc = minimal();
  doc["classes"]["bulk"]["min_quality"] = 0.8;
  const auto issues = issues_of(doc);
  CHECK(mentions(issues, "classes", "class ordering violated"));
}

TEST_CASE("initial demand above the shared capacity names the bound") {
  json doc = minimal();
  doc["providers"]["wifi_only"]["demand"]["bulk"] = 120;
  doc["providers"]["wifi_only"]["backhaul"]["capacity"] = 200;
  const auto issues = issues_of(doc);
  CHECK(mentions(issues, "providers", "shared-capacity bound violated"));
}

TEST_CASE("licensed cost must exceed the unlicensed path cost") {
  json doc = minimal();
  doc["providers"]["combined"]["licensed"]["cost_per_unit"] = 0.05;
  CHECK(mentions(issues_of(doc), "providers.combined.licensed.cost_per_unit", "cost ordering violated"));
}

TEST_CASE("every problem is reported in one pass") {
  json doc = minimal();
  doc["unlicensed"]["capacity"] = -1;
  doc["grid_steps"] = 40;
  doc["rounds"] = 0;
  doc["migration"] = {{"cap", 2.0}};
  doc["policy"] = "chaos";
  doc["providers"]["wifi_only"]["licensed"] = {{"capacity", 10}, {"cost_per_unit", 1}};
  const auto issues = issues_of(doc);
  CHECK(mentions(issues, "unlicensed.capacity", "must be positive"));
  CHECK(mentions(issues, "grid_steps", "[2, 12]"));
  CHECK(mentions(issues, "rounds", ">= 1"));
  CHECK(mentions(issues, "migration.cap", "[0,1]"));
  CHECK(mentions(issues, "policy", "unknown policy"));
  CHECK(mentions(issues, "providers.wifi_only.licensed", "cannot own licensed spectrum"));
}

TEST_CASE("missing and mistyped fields carry their path") {
  json doc = minimal();
  doc["classes"]["premium"].erase("min_quality");
  doc["unlicensed"]["capacity"] = "lots";
  const auto issues = issues_of(doc);
  CHECK(std::any_of(issues.begin(), issues.end(),
                    [](const ConfigIssue& i) { return i.path == "classes.premium.min_quality"; }));
  CHECK(std::any_of(issues.begin(), issues.end(),
                    [](const ConfigIssue& i) { return i.path == "unlicensed.capacity"; }));
}

TEST_CASE("events and sweeps are validated") {
  json doc = minimal();
  doc["events"] = json::array({{{"round", 0}, {"type", "roaming"}, {"target", "wifi_only"}, {"influx", -3}},
                               {{"round", 2}, {"type", "sabotage"}, {"saboteur", "wifi_only"}},
                               {{"round", 2}, {"type", "earthquake"}}});
  doc["sweep"] = {{"parameters", json::array({{{"pointer", "/loc"}, {"values", {1, 2}}},
                                              {{"pointer", "/nope/x"}, {"values", {1}}},
                                              {{"pointer", "/unlicensed/capacity"}, {"values", json::array()}}})}};
  const auto issues = issues_of(doc);
  CHECK(mentions(issues, "events[0].round", ">= 1"));
  CHECK(mentions(issues, "events[0].influx", ">= 0"));
  CHECK(mentions(issues, "events[1].saboteur", "licensed fallback"));
  CHECK(mentions(issues, "events[2].type", "unknown event type"));
  CHECK(mentions(issues, "sweep.parameters", "at most two"));
  CHECK(mentions(issues, "sweep.parameters[0].pointer", "numeric"));
  CHECK(mentions(issues, "sweep.parameters[1].pointer", "numeric"));
  CHECK(mentions(issues, "sweep.parameters[2].values", "no sweep values"));
}

TEST_CASE("sweep ranges expand to evenly spaced values") {
  json doc = minimal();
  doc["sweep"] = {{"parameters", json::array({{{"pointer", "/unlicensed/capacity"}, {"from", 50}, {"to", 90}, {"steps", 4}}})}};
  const auto cfg = scenario_from_json(doc);
  REQUIRE(cfg.sweep.size() == 1);
  CHECK(cfg.sweep[0].values == std::vector<double>{50, 60, 70, 80, 90});
}

TEST_CASE("parse errors carry line and column") {
  try {
    parse_scenario("{\n  \"schema_version\": 1,\n  \"loc\": oops\n}");
    FAIL("expected a parse error");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(what.find("line 3") != std::string::npos);
    CHECK(what.find("column") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("[1, 2]"), ConfigError);
  CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ConfigError);
}

TEST_CASE("shipped scenarios load and round-trip") {
  for (const char* name : {"minimal", "scarcity", "abundance", "backhaul_starved", "sabotage", "oscillation",
                           "sweep_backhaul"}) {
    CAPTURE(name);
    const auto cfg = load_scenario(std::string(OC_SCENARIO_DIR) + "/" + name + ".json");
    const auto again = parse_scenario(serialize_scenario(cfg));
    CHECK(again == cfg);
    CHECK(serialize_scenario(again) == serialize_scenario(cfg));
  }
}

TEST_CASE("load, serialize, load yields an identical config") {
  Rng rng(61);
  for (int n = 0; n < 300; ++n) {
    const json doc = random_document(rng);
    const auto cfg = scenario_from_json(doc);
    const auto again = parse_scenario(serialize_scenario(cfg));
    CHECK(again == cfg);
  }
}

TEST_CASE("serialization is canonical") {
  Rng rng(62);
  for (int n = 0; n < 50; ++n) {
    const auto cfg = scenario_from_json(random_document(rng));
    const std::string text = serialize_scenario(cfg);
    CHECK(text.back() == '\n');
    CHECK(serialize_scenario(parse_scenario(text)) == text);
  }
}

TEST_CASE("initial strategies are validated against the market") {
  json doc = minimal();
  doc["initial_strategy"] = {{"combined", {{"offload", {{"bulk", 1.0}, {"premium", 0.0}}}}}};
  const auto issues = issues_of(doc);
  CHECK(mentions(issues, "providers", "shared-capacity bound violated"));
}
