/* Copyright (c) 2026 pneusim developers
 * SPDX-License-Identifier: Apache-2.0
 *
 * C API of the pneusim shared library. All functions return a pns_status;
 * every other output travels through out-parameters or opaque handles.
 * On failure, pns_last_error() returns a thread-local description of what
 * went wrong. Handles are destroyed with their matching _destroy function;
 * destroying NULL is a no-op.
 */

#ifndef PNEUSIM_PNEUSIM_H
#define PNEUSIM_PNEUSIM_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define PNS_API __declspec(dllexport)
#else
#define PNS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pns_status {
  PNS_OK = 0,
  PNS_ERROR_CONFIG = 1,
  PNS_ERROR_FIT = 2,
  PNS_ERROR_SOLVER = 3,
  PNS_ERROR_CALIBRATION = 4,
  PNS_ERROR_LOG = 5,
  PNS_ERROR_INVALID_ARGUMENT = 6,
  PNS_ERROR_IO = 7,
  PNS_ERROR_INTERNAL = 8
} pns_status;

typedef struct pns_config pns_config;     /* toolkit configuration */
typedef struct pns_curve pns_curve;       /* static pressure->angle curve */
typedef struct pns_campaign pns_campaign; /* staircase campaign + analysis */

PNS_API const char* pns_version(void);
PNS_API const char* pns_status_name(pns_status status);

/* Message describing the most recent failure on this thread. */
PNS_API const char* pns_last_error(void);

/* ---- configuration ---------------------------------------------------- */

PNS_API pns_status pns_config_create_default(pns_config** out);
PNS_API pns_status pns_config_load(const char* path, pns_config** out);
PNS_API pns_status pns_config_loads(const char* json_text, pns_config** out);
PNS_API pns_status pns_config_save(const pns_config* cfg, const char* path);
PNS_API void pns_config_destroy(pns_config* cfg);

PNS_API pns_status pns_config_set_seed(pns_config* cfg, uint64_t seed);
PNS_API pns_status pns_config_set_trials(pns_config* cfg, int n_trials);
PNS_API pns_status pns_config_set_mesh_h(pns_config* cfg, double target_h_mm);
PNS_API pns_status pns_config_set_output_dir(pns_config* cfg, const char* dir);
PNS_API pns_status pns_config_get_output_dir(const pns_config* cfg, char* buffer,
                                             size_t buffer_size);

/* ---- commands ---------------------------------------------------------- */

/* Fit a Yeoh model (order 1..3) to `stretch,nominal_stress_<unit>` CSV data
 * and write a config-compatible material block with fit diagnostics. */
PNS_API pns_status pns_fit_material(const char* csv_path, int order,
                                    const char* out_model_path);

/* Pressure ramp from 0 to the configured maximum. `out_dir` may be NULL to
 * skip file output. The returned curve must be destroyed by the caller. */
PNS_API pns_status pns_simulate_static(const pns_config* cfg, const char* out_dir,
                                       pns_curve** out);

PNS_API pns_status pns_curve_sample_count(const pns_curve* curve, size_t* out);
PNS_API pns_status pns_curve_sample(const pns_curve* curve, size_t index,
                                    double* pressure_kpa, double* angle_deg,
                                    double* max_vm_kpa);
PNS_API pns_status pns_curve_hotspot_region(const pns_curve* curve, size_t index, char* buffer,
                                            size_t buffer_size);
PNS_API void pns_curve_destroy(pns_curve* curve);

/* Static + fatigue calibration. Updates `cfg` in place (scaled material,
 * resolved fatigue block); writes calibrated_config.json and
 * calibration_report.json when `out_dir` is non-NULL. */
PNS_API pns_status pns_calibrate(pns_config* cfg, const char* out_dir);

/* Staircase campaign + analysis. `disable_fatigue` forces the identity
 * damage model. Writes the full log/report contract when `out_dir` is
 * non-NULL. The returned campaign must be destroyed by the caller. */
PNS_API pns_status pns_run_campaign(const pns_config* cfg, const char* out_dir,
                                    int disable_fatigue, pns_campaign** out);

PNS_API pns_status pns_campaign_trial_count(const pns_campaign* campaign, size_t* out);
PNS_API pns_status pns_campaign_nrmse(const pns_campaign* campaign, size_t trial_index,
                                      double* out_pct);
PNS_API pns_status pns_campaign_damage_after(const pns_campaign* campaign, double* out);
PNS_API void pns_campaign_destroy(pns_campaign* campaign);

/* Re-run the analysis over a persisted campaign directory. `out_dir` may be
 * NULL to analyze in place; `expected_config_json` may be NULL to skip the
 * consistency check. */
PNS_API pns_status pns_analyze(const char* logs_dir, const char* out_dir,
                               const char* expected_config_json);

#ifdef __cplusplus
}
#endif

#endif /* PNEUSIM_PNEUSIM_H */
