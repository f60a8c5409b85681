#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstring>
#include <string>

#include "offload_commons/c_api.h"

namespace {

std::string scenario_path(const char* name) { return std::string(OC_SCENARIO_DIR) + "/" + name; }

oc_scenario* load(const char* name) {
  oc_scenario* s = nullptr;
  REQUIRE(oc_scenario_load_file(scenario_path(name).c_str(), &s) == OC_OK);
  REQUIRE(s != nullptr);
  return s;
}

int count_lines(const char* text) {
  int n = 0;
  for (const char* p = text; *p; ++p) n += *p == '\n';
  return n;
}

}  // namespace

TEST_CASE("version string") { CHECK(std::strcmp(oc_version(), "1.0.0") == 0); }

TEST_CASE("oc_qos") {
  double q = -1;
  CHECK(oc_qos(50, 100, &q) == OC_OK);
  CHECK(q == doctest::Approx(0.5));
  CHECK(oc_qos(100, 100, &q) == OC_OK);
  CHECK(q == 0.0);
  CHECK(oc_qos(150, 100, &q) == OC_ERR_MODEL);
  CHECK(oc_qos(10, 0, &q) == OC_ERR_MODEL);
  CHECK(std::strlen(oc_last_error()) > 0);
  CHECK(oc_qos(10, 100, nullptr) == OC_ERR_ARGUMENT);
}

TEST_CASE("oc_capacity_regime") {
  const double sixty[] = {20, 40};
  const double ninety[] = {50, 40};
  oc_regime r = OC_WIFI_BOTTLENECK;
  CHECK(oc_capacity_regime(100, sixty, 2, 0.2, &r) == OC_OK);
  CHECK(r == OC_BACKHAUL_BOTTLENECK);
  CHECK(oc_capacity_regime(100, ninety, 2, 0.2, &r) == OC_OK);
  CHECK(r == OC_WIFI_BOTTLENECK);
  CHECK(oc_capacity_regime(100, nullptr, 2, 0.2, &r) == OC_ERR_ARGUMENT);
}

TEST_CASE("intra-provider equilibrium through the handle") {
  oc_scenario* s = load("minimal.json");
  oc_equilibrium eq{};
  CHECK(oc_intra_provider_equilibrium(s, 30, &eq) == OC_OK);
  CHECK(eq.applicable == 1);
  CHECK(eq.converged == 1);
  CHECK(eq.unlicensed_combined == doctest::Approx(50).epsilon(1e-6));
  oc_scenario_free(s);
}

TEST_CASE("load failures are config errors with a message") {
  oc_scenario* s = nullptr;
  CHECK(oc_scenario_load_file("/nonexistent/scenario.json", &s) == OC_ERR_CONFIG);
  CHECK(std::strlen(oc_last_error()) > 0);
  CHECK(oc_scenario_load_json("{\"schema_version\": 1}", &s) == OC_ERR_CONFIG);
  CHECK(std::string(oc_last_error()).find("unlicensed") != std::string::npos);
  CHECK(oc_scenario_load_json(nullptr, &s) == OC_ERR_ARGUMENT);
}

TEST_CASE("setters reject invalid values and keep the old ones") {
  oc_scenario* s = load("minimal.json");
  const std::string before = oc_scenario_to_json(s);
  CHECK(oc_scenario_set_grid_steps(s, 40) == OC_ERR_CONFIG);
  CHECK(oc_scenario_set_rounds(s, 0) == OC_ERR_CONFIG);
  CHECK(before == oc_scenario_to_json(s));
  CHECK(oc_scenario_set_grid_steps(s, 6) == OC_OK);
  CHECK(oc_scenario_set_rounds(s, 5) == OC_OK);
  CHECK(oc_scenario_set_seed(s, 9) == OC_OK);
  const std::string after = oc_scenario_to_json(s);
  CHECK(after.find("\"grid_steps\": 6") != std::string::npos);

  oc_scenario* again = nullptr;
  REQUIRE(oc_scenario_load_json(after.c_str(), &again) == OC_OK);
  CHECK(after == oc_scenario_to_json(again));
  oc_scenario_free(again);
  oc_scenario_free(s);
}

TEST_CASE("oc_run produces the artifacts of each command") {
  oc_scenario* s = load("minimal.json");
  REQUIRE(oc_scenario_set_rounds(s, 4) == OC_OK);

  oc_artifacts* a = nullptr;
  CHECK(oc_run(s, OC_SIMULATE, &a) == OC_OK);
  REQUIRE(oc_artifacts_trajectory_csv(a) != nullptr);
  CHECK(count_lines(oc_artifacts_trajectory_csv(a)) == 6);
  CHECK(oc_artifacts_sweep_csv(a) == nullptr);
  CHECK(std::string(oc_artifacts_report(a)).find("\"command\": \"simulate\"") != std::string::npos);
  oc_artifacts_free(a);

  CHECK(oc_run(s, OC_EQUILIBRIUM, &a) == OC_OK);
  CHECK(oc_artifacts_trajectory_csv(a) == nullptr);
  oc_artifacts_free(a);

  CHECK(oc_run(s, static_cast<oc_command>(9), &a) == OC_ERR_ARGUMENT);
  oc_scenario_free(s);

  oc_scenario* sweep = load("sweep_backhaul.json");
  REQUIRE(oc_scenario_set_rounds(sweep, 5) == OC_OK);
  CHECK(oc_run(sweep, OC_SWEEP, &a) == OC_OK);
  REQUIRE(oc_artifacts_sweep_csv(a) != nullptr);
  CHECK(count_lines(oc_artifacts_sweep_csv(a)) == 11);
  oc_artifacts_free(a);
  oc_scenario_free(sweep);
}

TEST_CASE("oc_run is deterministic") {
  oc_scenario* s = load("oscillation.json");
  oc_artifacts* a = nullptr;
  oc_artifacts* b = nullptr;
  REQUIRE(oc_run(s, OC_CLASSIFY, &a) == OC_OK);
  REQUIRE(oc_run(s, OC_CLASSIFY, &b) == OC_OK);
  CHECK(std::string(oc_artifacts_report(a)) == oc_artifacts_report(b));
  CHECK(std::string(oc_artifacts_trajectory_csv(a)) == oc_artifacts_trajectory_csv(b));
  oc_artifacts_free(a);
  oc_artifacts_free(b);
  oc_scenario_free(s);
}
