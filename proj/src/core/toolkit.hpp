// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/config.hpp"
#include "core/matfit.hpp"

namespace pneusim {

/// Mesh plus the problem definition built from a config; the problem holds a
/// pointer into `mesh`, so the bundle is not copyable.
struct BuiltModel {
  Mesh mesh;
  RegionMaterials materials;

  BuiltModel() = default;
  BuiltModel(const BuiltModel&) = delete;
  BuiltModel& operator=(const BuiltModel&) = delete;
  BuiltModel(BuiltModel&&) = default;
  BuiltModel& operator=(BuiltModel&&) = default;

  FemProblem problem() const { return make_pneunet_problem(mesh, materials); }
};

BuiltModel build_model(const ToolkitConfig& cfg);

/// fit-material: fit a Yeoh model to a uniaxial CSV and write the material
/// block (config-compatible JSON) plus diagnostics.
FitResult fit_material_command(const std::filesystem::path& csv_path, int order,
                               const std::filesystem::path& out_model_path);

struct StaticSimulation {
  StaticCurve curve;
  std::vector<std::string> validity_warnings;  // stretch range exceedances
};

/// simulate-static: ramp to the configured maximum pressure. When `out_dir`
/// is given, writes static_curve.csv, stress_field.csv, deformed_mesh.svg and
/// mesh.txt.
StaticSimulation simulate_static_command(const ToolkitConfig& cfg,
                                         const std::optional<std::filesystem::path>& out_dir);

struct CalibrationOutcome {
  ToolkitConfig config;  // materials scaled, fatigue resolved
  StaticCalibration statics;
  std::vector<double> nrmse_pct;  // campaign under the calibrated parameters
};

/// calibrate: static bending-angle calibration followed by fatigue-parameter
/// calibration. Writes calibrated_config.json and calibration_report.json
/// when `out_dir` is given.
CalibrationOutcome calibrate_command(const ToolkitConfig& cfg,
                                     const std::optional<std::filesystem::path>& out_dir);

struct CampaignOutcome {
  StaticCurve curve;
  Campaign campaign;
  CampaignReport report;
};

/// run-campaign: fresh static ramp, staircase trials, analysis, and the full
/// file contract (trial CSVs, manifest.json, damage_history.csv,
/// static_curve.csv, report + figures) in `out_dir`.
CampaignOutcome run_campaign_command(const ToolkitConfig& cfg,
                                     const std::optional<std::filesystem::path>& out_dir,
                                     bool disable_fatigue = false);

/// analyze: re-run the analysis on a persisted campaign directory. When
/// `expected_config_json` is set it must match the manifest snapshot; a
/// mismatch is refused with a key-level diff.
CampaignReport analyze_command(const std::filesystem::path& logs_dir,
                               const std::optional<std::filesystem::path>& out_dir,
                               const std::optional<std::string>& expected_config_json = {});

/// Per-trial NRMSE of a campaign simulated with the given fatigue parameters.
std::vector<double> campaign_nrmse_series(const StaticCurve& curve, const FatigueParams& params,
                                          const StaircaseProtocol& protocol,
                                          const NoiseParams& noise, std::uint64_t master_seed,
                                          int n_trials);

}  // namespace pneusim
