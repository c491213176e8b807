// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/toolkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <json.hpp>

#include "core/csvio.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"
#include "core/svgplot.hpp"

namespace pneusim {

namespace {

using nlohmann::json;

constexpr const char* kManifestFormat = "pneusim-campaign v1";

RegionMaterials scaled_materials(const RegionMaterials& in, double scale) {
  RegionMaterials out = in;
  for (HyperelasticModel* m : {&out.body, &out.sealing, &out.walls}) {
    const double multiplier = m->bulk_penalty / small_strain_moduli(*m).shear;
    for (double& c : m->coefficients) c *= scale;
    m->bulk_penalty = multiplier * small_strain_moduli(*m).shear;
  }
  return out;
}

/// Largest in-plane principal stretch over all hyperelastic elements.
double max_principal_stretch(const FemProblem& problem, const VecX& u) {
  const Mesh& mesh = *problem.mesh;
  double worst = 1.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    if (mesh.region[static_cast<std::size_t>(e)].kind == RegionKind::Limiting) continue;
    const Tri6& t = mesh.elements[static_cast<std::size_t>(e)];
    // Corner-based gradient of the affine part is enough for a range check.
    const Vec2& x0 = mesh.nodes[static_cast<std::size_t>(t.n[0])];
    const Vec2& x1 = mesh.nodes[static_cast<std::size_t>(t.n[1])];
    const Vec2& x2 = mesh.nodes[static_cast<std::size_t>(t.n[2])];
    Mat2 dX;
    dX.col(0) = x1 - x0;
    dX.col(1) = x2 - x0;
    Mat2 dx;
    const auto disp = [&](int n) { return Vec2(u(2 * n), u(2 * n + 1)); };
    dx.col(0) = (x1 + disp(t.n[1])) - (x0 + disp(t.n[0]));
    dx.col(1) = (x2 + disp(t.n[2])) - (x0 + disp(t.n[0]));
    const Mat2 f = dx * dX.inverse();
    const Eigen::SelfAdjointEigenSolver<Mat2> eig(f.transpose() * f);
    worst = std::max(worst, std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff())));
  }
  return worst;
}

}  // namespace

BuiltModel build_model(const ToolkitConfig& cfg) {
  cfg.validate();
  BuiltModel model;
  model.mesh = generate_mesh(cfg.geometry, cfg.mesh_target_h);
  model.materials = cfg.materials;
  return model;
}

FitResult fit_material_command(const std::filesystem::path& csv_path, int order,
                               const std::filesystem::path& out_model_path) {
  const UniaxialDataset data = read_uniaxial_csv(csv_path);
  FitResult result = fit_yeoh(data, order);
  json j;
  j["kind"] = to_string(result.model.kind);
  j["unit"] = "kPa";
  j["coefficients"] = result.model.coefficients;
  j["bulk_penalty_multiplier"] = kDefaultBulkPenaltyMultiplier;
  j["fitted_stretch_range"] = {result.model.fitted_stretch_range->lo,
                               result.model.fitted_stretch_range->hi};
  j["diagnostics"] = {{"rms_residual_kPa", result.diagnostics.rms_residual},
                      {"rms_residual_rel", result.diagnostics.rms_residual_rel},
                      {"condition_estimate", result.diagnostics.condition_estimate},
                      {"samples", data.samples.size()},
                      {"source", data.label}};
  write_text_file(out_model_path, j.dump(2) + "\n");
  return result;
}

StaticSimulation simulate_static_command(const ToolkitConfig& cfg,
                                         const std::optional<std::filesystem::path>& out_dir) {
  const BuiltModel model = build_model(cfg);
  const FemProblem problem = model.problem();

  RampOptions opts;
  opts.initial_increment = cfg.simulate_initial_increment;
  FemState final_state;
  StaticSimulation sim;
  sim.curve = ramp_solve(problem, cfg.simulate_max_pressure, opts, final_state);

  const double peak_stretch = max_principal_stretch(problem, final_state.displacement);
  for (const HyperelasticModel* m :
       {&cfg.materials.body, &cfg.materials.sealing, &cfg.materials.walls}) {
    if (!m->fitted_stretch_range) continue;
    for (std::string& w : validity_check(*m, 1.0, peak_stretch))
      sim.validity_warnings.push_back(std::move(w));
    break;  // the three regions share the fitted range in practice
  }

  if (out_dir) {
    ensure_directory(*out_dir);
    write_static_curve_csv(sim.curve, *out_dir / "static_curve.csv");
    write_stress_field_csv(model.mesh, sim.curve.final_vm_field, *out_dir / "stress_field.csv");
    write_deformed_mesh_svg(model.mesh, final_state.displacement, sim.curve.final_vm_field,
                            *out_dir / "deformed_mesh.svg");
    write_mesh(model.mesh, *out_dir / "mesh.txt");
  }
  return sim;
}

std::vector<double> campaign_nrmse_series(const StaticCurve& curve, const FatigueParams& params,
                                          const StaircaseProtocol& protocol,
                                          const NoiseParams& noise, std::uint64_t master_seed,
                                          int n_trials) {
  const Campaign campaign = run_campaign(curve, params, protocol, noise, master_seed, n_trials);
  std::vector<double> out;
  for (const TrialLog& log : campaign.logs)
    out.push_back(nrmse(extract_steps(log, protocol, curve)));
  return out;
}

CalibrationOutcome calibrate_command(const ToolkitConfig& cfg,
                                     const std::optional<std::filesystem::path>& out_dir) {
  const BuiltModel base = build_model(cfg);

  const auto angle_at_scale = [&](double scale) {
    const RegionMaterials mats = scaled_materials(cfg.materials, scale);
    const FemProblem problem = make_pneunet_problem(base.mesh, mats);
    RampOptions opts;
    opts.initial_increment = cfg.simulate_initial_increment;
    opts.store_final_field = false;
    const StaticCurve curve = ramp_solve(problem, cfg.calibration.target_pressure, opts);
    return curve.samples.back().angle_deg;
  };

  CalibrationOutcome outcome;
  outcome.statics =
      calibrate_static(angle_at_scale, cfg.calibration.target_angle,
                       cfg.calibration.angle_tolerance, cfg.calibration.max_ramps);

  outcome.config = cfg;
  outcome.config.materials = scaled_materials(cfg.materials, outcome.statics.scale);

  // Full curve under the calibrated material, covering the simulate range.
  const StaticSimulation sim = simulate_static_command(outcome.config, {});

  FatigueParams seed_params = cfg.fatigue;  // carries overrides of cap/onset/tau
  const auto nrmse_of = [&](const FatigueParams& p) {
    return campaign_nrmse_series(sim.curve, p, outcome.config.protocol, outcome.config.noise,
                                 outcome.config.seed, outcome.config.trials);
  };
  outcome.config.fatigue =
      calibrate_fatigue(sim.curve, outcome.config.protocol, seed_params,
                        outcome.config.trials, cfg.calibration.fatigue_targets, nrmse_of);
  outcome.config.fatigue_resolved = true;
  outcome.nrmse_pct = nrmse_of(outcome.config.fatigue);

  if (out_dir) {
    ensure_directory(*out_dir);
    outcome.config.save(*out_dir / "calibrated_config.json");
    json report;
    report["static"] = {{"scale", outcome.statics.scale},
                        {"achieved_angle_deg", outcome.statics.achieved_angle},
                        {"ramps_used", outcome.statics.ramps_used},
                        {"target_pressure_kPa", cfg.calibration.target_pressure},
                        {"target_angle_deg", cfg.calibration.target_angle}};
    report["fatigue"] = json::parse(outcome.config.to_json(true))["fatigue"];
    report["campaign_nrmse_pct"] = outcome.nrmse_pct;
    report["notes"] = {
        "damage is updated from the pristine hotspot stress scaled by the softening factor; "
        "the FEM is not re-run per trial",
        "trials run back to back with no recovery period between them"};
    write_text_file(*out_dir / "calibration_report.json", report.dump(2) + "\n");
  }
  return outcome;
}

namespace {

void write_manifest(const ToolkitConfig& cfg, const Campaign& campaign,
                    const std::filesystem::path& dir) {
  json manifest;
  manifest["format"] = kManifestFormat;
  manifest["config"] = json::parse(cfg.to_json(true));
  manifest["master_seed"] = cfg.seed;
  manifest["n_trials"] = campaign.logs.size();
  json seeds = json::array();
  json damage_before = json::array();
  for (const TrialLog& log : campaign.logs) {
    seeds.push_back(log.seed);
    damage_before.push_back(log.damage_before);
  }
  manifest["trial_seeds"] = std::move(seeds);
  manifest["damage_before_trial"] = std::move(damage_before);
  json trajectory = json::array();
  for (std::size_t i = 0; i < campaign.damage.history.size(); ++i) {
    const auto& rec = campaign.damage.history[i];
    trajectory.push_back({{"cycle", i + 1},
                          {"peak_vm_kPa", rec.peak_vm},
                          {"delta_D", rec.delta_d},
                          {"D", rec.damage_after}});
  }
  manifest["damage_trajectory"] = std::move(trajectory);
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");

  std::ostringstream csv;
  csv << "cycle,peak_vm_kPa,delta_D,D\n";
  for (std::size_t i = 0; i < campaign.damage.history.size(); ++i) {
    const auto& rec = campaign.damage.history[i];
    csv << (i + 1) << "," << format_double(rec.peak_vm) << "," << format_double(rec.delta_d)
        << "," << format_double(rec.damage_after) << "\n";
  }
  write_text_file(dir / "damage_history.csv", csv.str());
}

}  // namespace

CampaignOutcome run_campaign_command(const ToolkitConfig& cfg,
                                     const std::optional<std::filesystem::path>& out_dir,
                                     bool disable_fatigue) {
  ToolkitConfig run_cfg = cfg;
  if (disable_fatigue) {
    FatigueParams identity;
    identity.sigma_ref = 1.0;  // unused at zero damage rate
    identity.response_time = cfg.fatigue.response_time;
    run_cfg.fatigue = identity;
    run_cfg.fatigue_resolved = true;
  }
  if (!run_cfg.fatigue_resolved)
    raise(ErrorCode::Config,
          "fatigue parameters are set to \"calibrate\"; run the calibrate command first or "
          "pass --no-fatigue");

  CampaignOutcome outcome;
  outcome.curve = simulate_static_command(run_cfg, {}).curve;
  outcome.campaign = run_campaign(outcome.curve, run_cfg.fatigue, run_cfg.protocol,
                                  run_cfg.noise, run_cfg.seed, run_cfg.trials);
  outcome.report = analyze_campaign(outcome.campaign.logs, run_cfg.protocol, outcome.curve,
                                    run_cfg.to_json(true));

  if (out_dir) {
    ensure_directory(*out_dir);
    write_static_curve_csv(outcome.curve, *out_dir / "static_curve.csv");
    for (const TrialLog& log : outcome.campaign.logs) write_trial_csv(log, *out_dir);
    write_manifest(run_cfg, outcome.campaign, *out_dir);
    write_report(outcome.report, outcome.campaign.logs, outcome.curve, *out_dir);
  }
  return outcome;
}

namespace {

/// Key-level diff of two JSON objects, for the mixed-config refusal message.
void diff_json(const json& a, const json& b, const std::string& path,
               std::vector<std::string>& out) {
  if (a == b) return;
  if (!a.is_object() || !b.is_object()) {
    out.push_back(path + ": " + a.dump() + " vs " + b.dump());
    return;
  }
  for (const auto& [key, value] : a.items()) {
    if (!b.contains(key))
      out.push_back(path + "." + key + ": only in first");
    else
      diff_json(value, b.at(key), path + "." + key, out);
  }
  for (const auto& [key, value] : b.items())
    if (!a.contains(key)) out.push_back(path + "." + key + ": only in second");
}

}  // namespace

CampaignReport analyze_command(const std::filesystem::path& logs_dir,
                               const std::optional<std::filesystem::path>& out_dir,
                               const std::optional<std::string>& expected_config_json) {
  json manifest;
  try {
    manifest = json::parse(read_text_file(logs_dir / "manifest.json"));
  } catch (const json::parse_error& e) {
    raise(ErrorCode::LogIntegrity, "manifest.json is not valid JSON: " + std::string(e.what()));
  }
  if (!manifest.contains("format") || manifest["format"] != kManifestFormat)
    raise(ErrorCode::LogIntegrity, "unrecognized campaign manifest format");

  const std::string config_snapshot = manifest["config"].dump();
  if (expected_config_json) {
    // Canonicalize through the config parser so formatting, key order and
    // runtime-only fields (output_dir) cannot cause spurious mismatches.
    const json expected =
        json::parse(ToolkitConfig::from_json(*expected_config_json).to_json(true));
    if (expected != manifest["config"]) {
      std::vector<std::string> diffs;
      diff_json(manifest["config"], expected, "config", diffs);
      std::string msg = "config does not match the campaign manifest:";
      for (const std::string& d : diffs) msg += "\n  " + d;
      raise(ErrorCode::LogIntegrity, msg);
    }
  }

  ToolkitConfig cfg = ToolkitConfig::from_json(manifest["config"].dump(2));
  const StaticCurve curve = read_static_curve_csv(logs_dir / "static_curve.csv");
  const int n_trials = manifest["n_trials"].get<int>();

  std::vector<TrialLog> logs;
  for (int k = 1; k <= n_trials; ++k) {
    TrialLog log = read_trial_csv(logs_dir, k, cfg.protocol);
    if (manifest.contains("damage_before_trial") &&
        static_cast<std::size_t>(k) <= manifest["damage_before_trial"].size())
      log.damage_before = manifest["damage_before_trial"][static_cast<std::size_t>(k - 1)].get<double>();
    logs.push_back(std::move(log));
  }

  CampaignReport report = analyze_campaign(logs, cfg.protocol, curve, config_snapshot);
  if (out_dir) {
    ensure_directory(*out_dir);
    write_report(report, logs, curve, *out_dir);
  }
  return report;
}

}  // namespace pneusim
