// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0
//
// pneusim command-line front end. Everything goes through the C API in
// pneusim/pneusim.h; this translation unit never touches the core library
// directly.

#include <cstdint>
#include <cstdio>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "pneusim/pneusim.h"

namespace {

struct ConfigDeleter {
  void operator()(pns_config* p) const { pns_config_destroy(p); }
};
struct CurveDeleter {
  void operator()(pns_curve* p) const { pns_curve_destroy(p); }
};
struct CampaignDeleter {
  void operator()(pns_campaign* p) const { pns_campaign_destroy(p); }
};

using ConfigPtr = std::unique_ptr<pns_config, ConfigDeleter>;
using CurvePtr = std::unique_ptr<pns_curve, CurveDeleter>;
using CampaignPtr = std::unique_ptr<pns_campaign, CampaignDeleter>;

/* Documented exit codes: 0 ok, 1 config error, 2 fit failure, 3 solver
 * failure, 4 calibration failure, 5 log-integrity error. Everything else
 * (bad usage, i/o, internal) folds into 1. */
int exit_code(pns_status status) {
  switch (status) {
    case PNS_OK: return 0;
    case PNS_ERROR_CONFIG: return 1;
    case PNS_ERROR_FIT: return 2;
    case PNS_ERROR_SOLVER: return 3;
    case PNS_ERROR_CALIBRATION: return 4;
    case PNS_ERROR_LOG: return 5;
    default: return 1;
  }
}

int fail(pns_status status) {
  std::fprintf(stderr, "pneusim: %s: %s\n", pns_status_name(status), pns_last_error());
  return exit_code(status);
}

struct CommonOptions {
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int trials = 0;
  double mesh_h = 0.0;
};

void add_common(CLI::App* cmd, CommonOptions& opt, bool with_trials) {
  cmd->add_option("--config", opt.config_path, "Toolkit config JSON (defaults built in)");
  cmd->add_option("--out", opt.out_dir, "Output directory (default from config)");
  cmd->add_option("--seed", opt.seed, "Master RNG seed override")
      ->each([&](const std::string&) { opt.seed_set = true; });
  cmd->add_option("--mesh-h", opt.mesh_h, "Mesh target edge length override [mm]");
  if (with_trials) cmd->add_option("--trials", opt.trials, "Number of staircase trials");
}

pns_status load_config(const CommonOptions& opt, ConfigPtr& cfg) {
  pns_config* raw = nullptr;
  pns_status s = opt.config_path.empty() ? pns_config_create_default(&raw)
                                         : pns_config_load(opt.config_path.c_str(), &raw);
  if (s != PNS_OK) return s;
  cfg.reset(raw);
  if (opt.seed_set && (s = pns_config_set_seed(cfg.get(), opt.seed)) != PNS_OK) return s;
  if (opt.trials > 0 && (s = pns_config_set_trials(cfg.get(), opt.trials)) != PNS_OK) return s;
  if (opt.mesh_h > 0.0 && (s = pns_config_set_mesh_h(cfg.get(), opt.mesh_h)) != PNS_OK)
    return s;
  if (!opt.out_dir.empty() &&
      (s = pns_config_set_output_dir(cfg.get(), opt.out_dir.c_str())) != PNS_OK)
    return s;
  return PNS_OK;
}

std::string resolved_out_dir(const ConfigPtr& cfg) {
  char buffer[4096];
  if (pns_config_get_output_dir(cfg.get(), buffer, sizeof(buffer)) != PNS_OK) return "out";
  return buffer;
}

void print_curve(const pns_curve* curve) {
  size_t n = 0;
  pns_curve_sample_count(curve, &n);
  std::printf("  %8s  %10s  %12s  %s\n", "p [kPa]", "angle [deg]", "max vM [MPa]", "hotspot");
  for (size_t i = 0; i < n; ++i) {
    double p = 0, angle = 0, vm = 0;
    char region[64] = {0};
    pns_curve_sample(curve, i, &p, &angle, &vm);
    pns_curve_hotspot_region(curve, i, region, sizeof(region));
    std::printf("  %8.2f  %10.3f  %12.5f  %s\n", p, angle, vm * 1e-3, region);
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pneu-net actuator simulation toolkit"};
  app.require_subcommand(1);

  // fit-material
  std::string fit_csv, fit_out = "material.json";
  int fit_order = 3;
  CLI::App* fit = app.add_subcommand("fit-material", "Fit Yeoh coefficients to uniaxial data");
  fit->add_option("csv", fit_csv, "CSV with header stretch,nominal_stress_<unit>")->required();
  fit->add_option("--order", fit_order, "Yeoh order (1-3)")->check(CLI::Range(1, 3));
  fit->add_option("--out-file", fit_out, "Output material JSON path");

  // simulate-static
  CommonOptions sim_opt;
  CLI::App* sim = app.add_subcommand("simulate-static", "Pressure ramp -> bending curve");
  add_common(sim, sim_opt, false);

  // calibrate
  CommonOptions cal_opt;
  CLI::App* cal =
      app.add_subcommand("calibrate", "Calibrate material scale and fatigue parameters");
  add_common(cal, cal_opt, true);

  // run-campaign
  CommonOptions camp_opt;
  bool no_fatigue = false;
  CLI::App* camp = app.add_subcommand("run-campaign", "Staircase trials + analysis");
  add_common(camp, camp_opt, true);
  camp->add_flag("--no-fatigue", no_fatigue, "Force the identity damage model");

  // analyze
  std::string logs_dir, analyze_out, analyze_config;
  CLI::App* ana = app.add_subcommand("analyze", "Re-run analysis on existing logs");
  ana->add_option("--logs", logs_dir, "Campaign directory with manifest.json")->required();
  ana->add_option("--out", analyze_out, "Output directory (default: the logs directory)");
  ana->add_option("--config", analyze_config, "Config that must match the manifest snapshot");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  if (fit->parsed()) {
    const pns_status s = pns_fit_material(fit_csv.c_str(), fit_order, fit_out.c_str());
    if (s != PNS_OK) return fail(s);
    std::printf("wrote %s\n", fit_out.c_str());
    return 0;
  }

  if (sim->parsed()) {
    ConfigPtr cfg;
    pns_status s = load_config(sim_opt, cfg);
    if (s != PNS_OK) return fail(s);
    const std::string out = resolved_out_dir(cfg);
    pns_curve* curve = nullptr;
    if ((s = pns_simulate_static(cfg.get(), out.c_str(), &curve)) != PNS_OK) return fail(s);
    CurvePtr guard(curve);
    std::printf("static curve (%s):\n", out.c_str());
    print_curve(curve);
    return 0;
  }

  if (cal->parsed()) {
    ConfigPtr cfg;
    pns_status s = load_config(cal_opt, cfg);
    if (s != PNS_OK) return fail(s);
    const std::string out = resolved_out_dir(cfg);
    if ((s = pns_calibrate(cfg.get(), out.c_str())) != PNS_OK) return fail(s);
    std::printf("calibrated config written to %s/calibrated_config.json\n", out.c_str());
    return 0;
  }

  if (camp->parsed()) {
    ConfigPtr cfg;
    pns_status s = load_config(camp_opt, cfg);
    if (s != PNS_OK) return fail(s);
    const std::string out = resolved_out_dir(cfg);
    pns_campaign* campaign = nullptr;
    if ((s = pns_run_campaign(cfg.get(), out.c_str(), no_fatigue ? 1 : 0, &campaign)) != PNS_OK)
      return fail(s);
    CampaignPtr guard(campaign);
    size_t n = 0;
    pns_campaign_trial_count(campaign, &n);
    std::printf("campaign (%zu trials) written to %s\n", n, out.c_str());
    for (size_t t = 0; t < n; ++t) {
      double v = 0;
      pns_campaign_nrmse(campaign, t, &v);
      std::printf("  trial %2zu NRMSE %6.2f %%\n", t + 1, v);
    }
    double damage = 0;
    pns_campaign_damage_after(campaign, &damage);
    std::printf("  damage after campaign: %.4f\n", damage);
    return 0;
  }

  if (ana->parsed()) {
    std::string expected;
    if (!analyze_config.empty()) {
      pns_config* raw = nullptr;
      pns_status s = pns_config_load(analyze_config.c_str(), &raw);
      if (s != PNS_OK) return fail(s);
      pns_config_destroy(raw);
      // Pass the file content through untouched; the library diffs snapshots.
      FILE* f = std::fopen(analyze_config.c_str(), "rb");
      if (f != nullptr) {
        char buf[65536];
        size_t got;
        while ((got = std::fread(buf, 1, sizeof(buf), f)) > 0) expected.append(buf, got);
        std::fclose(f);
      }
    }
    const pns_status s =
        pns_analyze(logs_dir.c_str(), analyze_out.empty() ? logs_dir.c_str() : analyze_out.c_str(),
                    expected.empty() ? nullptr : expected.c_str());
    if (s != PNS_OK) return fail(s);
    std::printf("analysis written to %s\n",
                analyze_out.empty() ? logs_dir.c_str() : analyze_out.c_str());
    return 0;
  }

  return 1;
}
