#ifndef OFFLOAD_COMMONS_C_API_H
#define OFFLOAD_COMMONS_C_API_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OC_API __declspec(dllexport)
#else
#define OC_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum oc_status {
  OC_OK = 0,
  OC_ERR_CONFIG = 2,
  OC_ERR_MODEL = 3,
  OC_ERR_ARGUMENT = 4,
  OC_ERR_IO = 5
} oc_status;

typedef enum oc_command {
  OC_EQUILIBRIUM = 0,
  OC_SIMULATE = 1,
  OC_CLASSIFY = 2,
  OC_SWEEP = 3,
  OC_DOMINANCE = 4
} oc_command;

typedef enum oc_regime { OC_WIFI_BOTTLENECK = 0, OC_BACKHAUL_BOTTLENECK = 1 } oc_regime;

typedef struct oc_scenario oc_scenario;
typedef struct oc_artifacts oc_artifacts;

typedef struct oc_equilibrium {
  double unlicensed_combined;
  double unlicensed_quality;
  double residual;
  int iterations;
  int converged;
  int clamped;
  int applicable;
} oc_equilibrium;

/* Message of the last failing call on this thread; never NULL. */
OC_API const char* oc_last_error(void);
OC_API const char* oc_version(void);

OC_API oc_status oc_scenario_load_file(const char* path, oc_scenario** out);
OC_API oc_status oc_scenario_load_json(const char* text, oc_scenario** out);
OC_API void oc_scenario_free(oc_scenario* scenario);
OC_API oc_status oc_scenario_set_grid_steps(oc_scenario* scenario, int grid_steps);
OC_API oc_status oc_scenario_set_rounds(oc_scenario* scenario, int rounds);
OC_API oc_status oc_scenario_set_seed(oc_scenario* scenario, uint64_t seed);
/* Canonical JSON of the scenario; owned by the handle until the next call. */
OC_API const char* oc_scenario_to_json(oc_scenario* scenario);

/* OC_ERR_MODEL still yields artifacts whose report carries the error. */
OC_API oc_status oc_run(const oc_scenario* scenario, oc_command command, oc_artifacts** out);
OC_API void oc_artifacts_free(oc_artifacts* artifacts);
OC_API const char* oc_artifacts_report(const oc_artifacts* artifacts);
/* NULL when the command produced no such file. */
OC_API const char* oc_artifacts_trajectory_csv(const oc_artifacts* artifacts);
OC_API const char* oc_artifacts_sweep_csv(const oc_artifacts* artifacts);

OC_API oc_status oc_qos(double demand, double capacity, double* out);
OC_API oc_status oc_capacity_regime(double shared_capacity, const double* backhauls,
                                    size_t count, double bulk_floor, oc_regime* out);
OC_API oc_status oc_intra_provider_equilibrium(const oc_scenario* scenario,
                                               double opponent_demand, oc_equilibrium* out);

#ifdef __cplusplus
}
#endif

#endif
