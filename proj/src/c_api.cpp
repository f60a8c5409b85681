#include "offload_commons/c_api.h"

#include <string>

#include "offload_commons/runner.hpp"

using namespace offload;

struct oc_scenario {
  ScenarioConfig config;
  std::string json;
};

struct oc_artifacts {
  std::string report;
  std::optional<std::string> trajectory;
  std::optional<std::string> sweep;
};

namespace {

thread_local std::string last_error;

oc_status fail(oc_status status, std::string message) {
  last_error = std::move(message);
  return status;
}

std::string describe(const ConfigError& e) {
  std::string msg;
  for (const auto& issue : e.issues()) {
    if (!msg.empty()) msg += "; ";
    msg += issue.path.empty() ? issue.message : issue.path + ": " + issue.message;
  }
  return msg;
}

template <class F>
oc_status guarded(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const ConfigError& e) {
    return fail(OC_ERR_CONFIG, describe(e));
  } catch (const DomainError& e) {
    return fail(OC_ERR_MODEL, e.what());
  } catch (const InfeasibleError& e) {
    return fail(OC_ERR_MODEL, e.what());
  } catch (const std::exception& e) {
    return fail(OC_ERR_ARGUMENT, e.what());
  }
}

oc_status revalidate(oc_scenario* s) {
  const auto issues = validate(s->config);
  if (!issues.empty()) throw ConfigError(issues);
  return OC_OK;
}

}  // namespace

extern "C" {

const char* oc_last_error(void) { return last_error.c_str(); }

const char* oc_version(void) { return kToolVersion; }

oc_status oc_scenario_load_file(const char* path, oc_scenario** out) {
  if (!path || !out) return fail(OC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new oc_scenario{load_scenario(path), {}};
    return OC_OK;
  });
}

oc_status oc_scenario_load_json(const char* text, oc_scenario** out) {
  if (!text || !out) return fail(OC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = new oc_scenario{parse_scenario(text), {}};
    return OC_OK;
  });
}

void oc_scenario_free(oc_scenario* scenario) { delete scenario; }

oc_status oc_scenario_set_grid_steps(oc_scenario* scenario, int grid_steps) {
  if (!scenario) return fail(OC_ERR_ARGUMENT, "null scenario");
  return guarded([&] {
    const int old = scenario->config.grid_steps;
    scenario->config.grid_steps = grid_steps;
    try {
      return revalidate(scenario);
    } catch (...) {
      scenario->config.grid_steps = old;
      throw;
    }
  });
}

oc_status oc_scenario_set_rounds(oc_scenario* scenario, int rounds) {
  if (!scenario) return fail(OC_ERR_ARGUMENT, "null scenario");
  return guarded([&] {
    const int old = scenario->config.rounds;
    scenario->config.rounds = rounds;
    try {
      return revalidate(scenario);
    } catch (...) {
      scenario->config.rounds = old;
      throw;
    }
  });
}

oc_status oc_scenario_set_seed(oc_scenario* scenario, uint64_t seed) {
  if (!scenario) return fail(OC_ERR_ARGUMENT, "null scenario");
  scenario->config.seed = seed;
  return OC_OK;
}

const char* oc_scenario_to_json(oc_scenario* scenario) {
  if (!scenario) return nullptr;
  scenario->json = serialize_scenario(scenario->config);
  return scenario->json.c_str();
}

oc_status oc_run(const oc_scenario* scenario, oc_command command, oc_artifacts** out) {
  if (!scenario || !out) return fail(OC_ERR_ARGUMENT, "null argument");
  if (command < OC_EQUILIBRIUM || command > OC_DOMINANCE) {
    return fail(OC_ERR_ARGUMENT, "unknown command");
  }
  return guarded([&] {
    Artifacts a = run(static_cast<Command>(command), scenario->config);
    *out = new oc_artifacts{a.report.dump(2) + "\n", std::move(a.trajectory_csv),
                            std::move(a.sweep_csv)};
    if (a.model_error) return fail(OC_ERR_MODEL, a.report["error"]["message"].get<std::string>());
    return OC_OK;
  });
}

void oc_artifacts_free(oc_artifacts* artifacts) { delete artifacts; }

const char* oc_artifacts_report(const oc_artifacts* a) { return a ? a->report.c_str() : nullptr; }

const char* oc_artifacts_trajectory_csv(const oc_artifacts* a) {
  return a && a->trajectory ? a->trajectory->c_str() : nullptr;
}

const char* oc_artifacts_sweep_csv(const oc_artifacts* a) {
  return a && a->sweep ? a->sweep->c_str() : nullptr;
}

oc_status oc_qos(double demand, double capacity, double* out) {
  if (!out) return fail(OC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    *out = qos(demand, capacity);
    return OC_OK;
  });
}

oc_status oc_capacity_regime(double shared_capacity, const double* backhauls, size_t count,
                             double bulk_floor, oc_regime* out) {
  if (!out || (!backhauls && count > 0)) return fail(OC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = capacity_regime(shared_capacity, std::span<const double>(backhauls, count),
                                   bulk_floor);
    *out = r == CapacityRegime::BackhaulBottleneck ? OC_BACKHAUL_BOTTLENECK : OC_WIFI_BOTTLENECK;
    return OC_OK;
  });
}

oc_status oc_intra_provider_equilibrium(const oc_scenario* scenario, double opponent_demand,
                                        oc_equilibrium* out) {
  if (!scenario || !out) return fail(OC_ERR_ARGUMENT, "null argument");
  return guarded([&] {
    const auto r = intra_provider_equilibrium(scenario->config.market, opponent_demand);
    *out = oc_equilibrium{r.placements.unlicensed_combined,
                          r.unlicensed_quality,
                          r.residual,
                          r.iterations,
                          r.converged ? 1 : 0,
                          r.clamped ? 1 : 0,
                          r.applicable ? 1 : 0};
    return OC_OK;
  });
}

}  // extern "C"
