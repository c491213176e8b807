// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "pneusim/pneusim.h"

#include <cstring>
#include <string>

#include "core/config.hpp"
#include "core/error.hpp"
#include "core/toolkit.hpp"

struct pns_config {
  pneusim::ToolkitConfig cfg;
};

struct pns_curve {
  pneusim::StaticCurve curve;
};

struct pns_campaign {
  pneusim::CampaignOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

pns_status to_status(pneusim::ErrorCode code) {
  return static_cast<pns_status>(static_cast<int>(code));
}

template <typename Fn>
pns_status guarded(Fn&& fn) {
  try {
    fn();
    return PNS_OK;
  } catch (const pneusim::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const pneusim::InvalidDeformation& e) {
    g_last_error = "invalid deformation state in " + e.where;
    return PNS_ERROR_SOLVER;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PNS_ERROR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return PNS_ERROR_INTERNAL;
  }
}

pns_status require(bool ok, const char* message) {
  if (ok) return PNS_OK;
  g_last_error = message;
  return PNS_ERROR_INVALID_ARGUMENT;
}

pns_status copy_string(const std::string& s, char* buffer, size_t buffer_size) {
  if (buffer == nullptr || buffer_size == 0)
    return require(false, "output buffer is null or empty");
  if (s.size() + 1 > buffer_size) {
    g_last_error = "buffer too small (" + std::to_string(s.size() + 1) + " bytes needed)";
    return PNS_ERROR_INVALID_ARGUMENT;
  }
  std::memcpy(buffer, s.c_str(), s.size() + 1);
  return PNS_OK;
}

std::optional<std::filesystem::path> optional_dir(const char* dir) {
  if (dir == nullptr || dir[0] == '\0') return std::nullopt;
  return std::filesystem::path(dir);
}

}  // namespace

extern "C" {

const char* pns_version(void) { return "0.1.0"; }

const char* pns_status_name(pns_status status) {
  switch (status) {
    case PNS_OK: return "ok";
    case PNS_ERROR_CONFIG: return "config error";
    case PNS_ERROR_FIT: return "fit failure";
    case PNS_ERROR_SOLVER: return "solver failure";
    case PNS_ERROR_CALIBRATION: return "calibration failure";
    case PNS_ERROR_LOG: return "log-integrity error";
    case PNS_ERROR_INVALID_ARGUMENT: return "invalid argument";
    case PNS_ERROR_IO: return "i/o error";
    case PNS_ERROR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pns_last_error(void) { return g_last_error.c_str(); }

pns_status pns_config_create_default(pns_config** out) {
  if (pns_status s = require(out != nullptr, "out is null")) return s;
  return guarded([&] { *out = new pns_config{pneusim::default_config()}; });
}

pns_status pns_config_load(const char* path, pns_config** out) {
  if (pns_status s = require(out != nullptr && path != nullptr, "path/out is null")) return s;
  return guarded([&] { *out = new pns_config{pneusim::ToolkitConfig::load(path)}; });
}

pns_status pns_config_loads(const char* json_text, pns_config** out) {
  if (pns_status s = require(out != nullptr && json_text != nullptr, "json/out is null"))
    return s;
  return guarded([&] { *out = new pns_config{pneusim::ToolkitConfig::from_json(json_text)}; });
}

pns_status pns_config_save(const pns_config* cfg, const char* path) {
  if (pns_status s = require(cfg != nullptr && path != nullptr, "cfg/path is null")) return s;
  return guarded([&] { cfg->cfg.save(path); });
}

void pns_config_destroy(pns_config* cfg) { delete cfg; }

pns_status pns_config_set_seed(pns_config* cfg, uint64_t seed) {
  if (pns_status s = require(cfg != nullptr, "cfg is null")) return s;
  cfg->cfg.seed = seed;
  return PNS_OK;
}

pns_status pns_config_set_trials(pns_config* cfg, int n_trials) {
  if (pns_status s = require(cfg != nullptr, "cfg is null")) return s;
  return guarded([&] {
    if (n_trials < 1) pneusim::raise(pneusim::ErrorCode::Config, "trials must be >= 1");
    cfg->cfg.trials = n_trials;
  });
}

pns_status pns_config_set_mesh_h(pns_config* cfg, double target_h_mm) {
  if (pns_status s = require(cfg != nullptr, "cfg is null")) return s;
  return guarded([&] {
    if (!(target_h_mm > 0.0))
      pneusim::raise(pneusim::ErrorCode::Config, "mesh target_h must be positive");
    cfg->cfg.mesh_target_h = target_h_mm;
  });
}

pns_status pns_config_set_output_dir(pns_config* cfg, const char* dir) {
  if (pns_status s = require(cfg != nullptr && dir != nullptr, "cfg/dir is null")) return s;
  cfg->cfg.output_dir = dir;
  return PNS_OK;
}

pns_status pns_config_get_output_dir(const pns_config* cfg, char* buffer, size_t buffer_size) {
  if (pns_status s = require(cfg != nullptr, "cfg is null")) return s;
  return copy_string(cfg->cfg.output_dir, buffer, buffer_size);
}

pns_status pns_fit_material(const char* csv_path, int order, const char* out_model_path) {
  if (pns_status s = require(csv_path != nullptr && out_model_path != nullptr,
                             "csv/model path is null"))
    return s;
  return guarded([&] { pneusim::fit_material_command(csv_path, order, out_model_path); });
}

pns_status pns_simulate_static(const pns_config* cfg, const char* out_dir, pns_curve** out) {
  if (pns_status s = require(cfg != nullptr && out != nullptr, "cfg/out is null")) return s;
  return guarded([&] {
    pneusim::StaticSimulation sim =
        pneusim::simulate_static_command(cfg->cfg, optional_dir(out_dir));
    *out = new pns_curve{std::move(sim.curve)};
  });
}

pns_status pns_curve_sample_count(const pns_curve* curve, size_t* out) {
  if (pns_status s = require(curve != nullptr && out != nullptr, "curve/out is null")) return s;
  *out = curve->curve.samples.size();
  return PNS_OK;
}

pns_status pns_curve_sample(const pns_curve* curve, size_t index, double* pressure_kpa,
                            double* angle_deg, double* max_vm_kpa) {
  if (pns_status s = require(curve != nullptr, "curve is null")) return s;
  if (pns_status s = require(index < curve->curve.samples.size(), "sample index out of range"))
    return s;
  const pneusim::CurveSample& sample = curve->curve.samples[index];
  if (pressure_kpa != nullptr) *pressure_kpa = sample.pressure;
  if (angle_deg != nullptr) *angle_deg = sample.angle_deg;
  if (max_vm_kpa != nullptr) *max_vm_kpa = sample.max_vm;
  return PNS_OK;
}

pns_status pns_curve_hotspot_region(const pns_curve* curve, size_t index, char* buffer,
                                    size_t buffer_size) {
  if (pns_status s = require(curve != nullptr, "curve is null")) return s;
  if (pns_status s = require(index < curve->curve.samples.size(), "sample index out of range"))
    return s;
  return copy_string(pneusim::to_string(curve->curve.samples[index].hotspot), buffer,
                     buffer_size);
}

void pns_curve_destroy(pns_curve* curve) { delete curve; }

pns_status pns_calibrate(pns_config* cfg, const char* out_dir) {
  if (pns_status s = require(cfg != nullptr, "cfg is null")) return s;
  return guarded([&] {
    pneusim::CalibrationOutcome outcome =
        pneusim::calibrate_command(cfg->cfg, optional_dir(out_dir));
    cfg->cfg = std::move(outcome.config);
  });
}

pns_status pns_run_campaign(const pns_config* cfg, const char* out_dir, int disable_fatigue,
                            pns_campaign** out) {
  if (pns_status s = require(cfg != nullptr && out != nullptr, "cfg/out is null")) return s;
  return guarded([&] {
    pneusim::CampaignOutcome outcome =
        pneusim::run_campaign_command(cfg->cfg, optional_dir(out_dir), disable_fatigue != 0);
    *out = new pns_campaign{std::move(outcome)};
  });
}

pns_status pns_campaign_trial_count(const pns_campaign* campaign, size_t* out) {
  if (pns_status s = require(campaign != nullptr && out != nullptr, "campaign/out is null"))
    return s;
  *out = campaign->outcome.report.trial_nrmse_pct.size();
  return PNS_OK;
}

pns_status pns_campaign_nrmse(const pns_campaign* campaign, size_t trial_index,
                              double* out_pct) {
  if (pns_status s = require(campaign != nullptr && out_pct != nullptr, "campaign/out is null"))
    return s;
  if (pns_status s = require(trial_index < campaign->outcome.report.trial_nrmse_pct.size(),
                             "trial index out of range"))
    return s;
  *out_pct = campaign->outcome.report.trial_nrmse_pct[trial_index];
  return PNS_OK;
}

pns_status pns_campaign_damage_after(const pns_campaign* campaign, double* out) {
  if (pns_status s = require(campaign != nullptr && out != nullptr, "campaign/out is null"))
    return s;
  *out = campaign->outcome.campaign.damage.damage;
  return PNS_OK;
}

void pns_campaign_destroy(pns_campaign* campaign) { delete campaign; }

pns_status pns_analyze(const char* logs_dir, const char* out_dir,
                       const char* expected_config_json) {
  if (pns_status s = require(logs_dir != nullptr, "logs_dir is null")) return s;
  return guarded([&] {
    std::optional<std::string> expected;
    if (expected_config_json != nullptr) expected = std::string(expected_config_json);
    pneusim::analyze_command(logs_dir, optional_dir(out_dir), expected);
  });
}

}  // extern "C"
