// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/config.hpp"

#include <set>

#include <json.hpp>

#include "core/csvio.hpp"
#include "core/error.hpp"
#include "core/units.hpp"

namespace pneusim {

namespace {

using nlohmann::json;

/// Strict object reader: every key must be consumed by an accessor, so typos
/// and unit-less dimensioned keys ("chamber_width" instead of
/// "chamber_width_mm") are reported instead of silently ignored.
class StrictObject {
 public:
  StrictObject(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) raise(ErrorCode::Config, path_ + ": expected an object");
  }

  bool has(const std::string& key) {
    known_.insert(key);
    return j_.contains(key);
  }

  double number(const std::string& key, double fallback) {
    return has(key) ? checked_number(key) : fallback;
  }
  double number_required(const std::string& key) {
    if (!has(key)) raise(ErrorCode::Config, path_ + ": missing required key '" + key + "'");
    return checked_number(key);
  }
  int integer(const std::string& key, int fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_number_integer())
      raise(ErrorCode::Config, path_ + "." + key + ": expected an integer");
    return j_.at(key).get<int>();
  }
  std::uint64_t uinteger(const std::string& key, std::uint64_t fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_number_unsigned() && !j_.at(key).is_number_integer())
      raise(ErrorCode::Config, path_ + "." + key + ": expected a nonnegative integer");
    return j_.at(key).get<std::uint64_t>();
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_boolean())
      raise(ErrorCode::Config, path_ + "." + key + ": expected a boolean");
    return j_.at(key).get<bool>();
  }
  std::string text(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!j_.at(key).is_string())
      raise(ErrorCode::Config, path_ + "." + key + ": expected a string");
    return j_.at(key).get<std::string>();
  }
  std::string text_required(const std::string& key) {
    if (!has(key)) raise(ErrorCode::Config, path_ + ": missing required key '" + key + "'");
    return text(key, "");
  }
  const json* child(const std::string& key) {
    known_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (known_.count(key)) continue;
      std::string hint;
      for (const std::string& k : known_)
        if (k.rfind(key + "_", 0) == 0) hint = " (did you mean '" + k + "'? units are required)";
      raise(ErrorCode::Config, path_ + ": unknown key '" + key + "'" + hint);
    }
  }

 private:
  double checked_number(const std::string& key) {
    if (!j_.at(key).is_number())
      raise(ErrorCode::Config, path_ + "." + key + ": expected a number");
    return j_.at(key).get<double>();
  }

  const json& j_;
  std::string path_;
  std::set<std::string> known_;
};

HyperelasticModel parse_hyperelastic(const json& j, const std::string& path) {
  StrictObject o(j, path);
  const std::string kind = o.text_required("kind");
  const double to_kpa = pressure_unit_to_kpa(o.text_required("unit"));
  const json* coeffs = o.child("coefficients");
  if (coeffs == nullptr || !coeffs->is_array() || coeffs->empty())
    raise(ErrorCode::Config, path + ".coefficients: expected a nonempty array");
  std::vector<double> c;
  for (const auto& v : *coeffs) {
    if (!v.is_number()) raise(ErrorCode::Config, path + ".coefficients: expected numbers");
    c.push_back(v.get<double>() * to_kpa);
  }
  const double multiplier = o.number("bulk_penalty_multiplier", kDefaultBulkPenaltyMultiplier);
  HyperelasticModel m;
  m.kind = hyperelastic_kind_from_string(kind);
  m.coefficients = std::move(c);
  m.bulk_penalty = 1.0;  // placeholder; the count/C10 checks must pass first
  m.validate();
  m.bulk_penalty = multiplier * small_strain_moduli(m).shear;
  if (const json* range = o.child("fitted_stretch_range")) {
    if (!range->is_array() || range->size() != 2)
      raise(ErrorCode::Config, path + ".fitted_stretch_range: expected [lo, hi]");
    m.fitted_stretch_range = StretchRange{(*range)[0].get<double>(), (*range)[1].get<double>()};
  }
  o.finish();
  m.validate();
  return m;
}

LinearElasticModel parse_linear(const json& j, const std::string& path) {
  StrictObject o(j, path);
  const std::string kind = o.text_required("kind");
  if (kind != "linear-elastic")
    raise(ErrorCode::Config, path + ": the limiting layer must be 'linear-elastic'");
  const double to_kpa = pressure_unit_to_kpa(o.text_required("unit"));
  LinearElasticModel m;
  m.youngs_modulus = o.number_required("youngs_modulus") * to_kpa;
  m.poisson_ratio = o.number_required("poisson_ratio");
  o.finish();
  m.validate();
  return m;
}

json hyperelastic_to_json(const HyperelasticModel& m) {
  json j;
  j["kind"] = to_string(m.kind);
  j["unit"] = "kPa";
  j["coefficients"] = m.coefficients;
  j["bulk_penalty_multiplier"] = m.bulk_penalty / small_strain_moduli(m).shear;
  if (m.fitted_stretch_range)
    j["fitted_stretch_range"] = {m.fitted_stretch_range->lo, m.fitted_stretch_range->hi};
  return j;
}

json fatigue_to_json(const FatigueParams& p) {
  return json{{"damage_rate_alpha", p.damage_rate},
              {"stress_exponent_m", p.stress_exponent},
              {"sigma_ref_kPa", p.sigma_ref},
              {"damage_cap", p.damage_cap},
              {"softening_gain_gamma", p.softening_gain},
              {"creep_onset_kPa", p.creep_onset},
              {"creep_gain_deg_per_s_per_kPa", p.creep_gain},
              {"response_time_s", p.response_time},
              {"softening_ramp_width_kPa", p.softening_ramp_width}};
}

FatigueParams parse_fatigue(const json& j, const std::string& path) {
  StrictObject o(j, path);
  FatigueParams p;
  p.damage_rate = o.number("damage_rate_alpha", 0.0);
  p.stress_exponent = o.number("stress_exponent_m", 2.0);
  p.sigma_ref = o.number("sigma_ref_kPa", 0.0);
  p.damage_cap = o.number("damage_cap", 0.5);
  p.softening_gain = o.number("softening_gain_gamma", 0.0);
  p.creep_onset = o.number("creep_onset_kPa", 32.5);
  p.creep_gain = o.number("creep_gain_deg_per_s_per_kPa", 0.0);
  p.response_time = o.number("response_time_s", 0.8);
  p.softening_ramp_width = o.number("softening_ramp_width_kPa", 10.0);
  o.finish();
  p.validate();
  return p;
}

}  // namespace

void ToolkitConfig::validate() const {
  geometry.validate();
  if (!(mesh_target_h > 0.0)) raise(ErrorCode::Config, "mesh.target_h_mm must be positive");
  materials.validate();
  if (!(simulate_max_pressure > 0.0))
    raise(ErrorCode::Config, "simulate.max_pressure_kPa must be positive");
  if (!(simulate_initial_increment > 0.0))
    raise(ErrorCode::Config, "simulate.initial_increment_kPa must be positive");
  protocol.validate();
  if (fatigue_resolved) fatigue.validate();
  if (trials < 1) raise(ErrorCode::Config, "trials must be >= 1");
  if (protocol.max_pressure() > simulate_max_pressure + 1e-9)
    raise(ErrorCode::Config, "protocol exceeds simulate.max_pressure_kPa; the static curve "
                             "would not cover the staircase");
  if (!(noise.pressure_sigma >= 0.0 && noise.angle_sigma >= 0.0))
    raise(ErrorCode::Config, "noise sigmas must be nonnegative");
}

std::string ToolkitConfig::to_json(bool snapshot) const {
  json j;
  j["geometry"] = {{"n_chambers", geometry.n_chambers},
                   {"chamber_width_mm", geometry.chamber_width},
                   {"chamber_height_mm", geometry.chamber_height},
                   {"wall_thickness_mm", geometry.wall_thickness},
                   {"top_thickness_mm", geometry.top_thickness},
                   {"channel_height_mm", geometry.channel_height},
                   {"base_thickness_mm", geometry.base_thickness},
                   {"limiting_layer_thickness_mm", geometry.limiting_layer_thickness},
                   {"end_cap_length_mm", geometry.end_cap_length}};
  j["mesh"] = {{"target_h_mm", mesh_target_h}};
  j["materials"] = {{"body", hyperelastic_to_json(materials.body)},
                    {"sealing", hyperelastic_to_json(materials.sealing)},
                    {"interior_walls", hyperelastic_to_json(materials.walls)},
                    {"limiting",
                     {{"kind", "linear-elastic"},
                      {"unit", "kPa"},
                      {"youngs_modulus", materials.limiting.youngs_modulus},
                      {"poisson_ratio", materials.limiting.poisson_ratio}}}};
  j["simulate"] = {{"max_pressure_kPa", simulate_max_pressure},
                   {"initial_increment_kPa", simulate_initial_increment}};
  j["protocol"] = {{"start_pressure_kPa", protocol.start_pressure},
                   {"step_increment_kPa", protocol.step_increment},
                   {"n_steps", protocol.n_steps},
                   {"hold_duration_s", protocol.hold_duration}};
  j["noise"] = {{"enabled", noise.enabled},
                {"pressure_sigma_kPa", noise.pressure_sigma},
                {"angle_sigma_deg", noise.angle_sigma}};
  if (fatigue_resolved)
    j["fatigue"] = fatigue_to_json(fatigue);
  else
    j["fatigue"] = "calibrate";
  j["calibration"] = {{"target_pressure_kPa", calibration.target_pressure},
                      {"target_angle_deg", calibration.target_angle},
                      {"angle_tolerance_deg", calibration.angle_tolerance},
                      {"max_ramps", calibration.max_ramps},
                      {"trial1_max_nrmse_pct", calibration.fatigue_targets.trial1_max_nrmse_pct},
                      {"trial_n_nrmse_pct", calibration.fatigue_targets.trial_n_nrmse_pct},
                      {"trial_n_tol_pct", calibration.fatigue_targets.trial_n_tol_pct}};
  j["trials"] = trials;
  j["seed"] = seed;
  if (!snapshot) j["output_dir"] = output_dir;
  return j.dump(2) + "\n";
}

ToolkitConfig ToolkitConfig::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    raise(ErrorCode::Config, std::string("config is not valid JSON: ") + e.what());
  }

  ToolkitConfig cfg = default_config();
  StrictObject root(j, "config");

  if (const json* g = root.child("geometry")) {
    StrictObject o(*g, "geometry");
    cfg.geometry.n_chambers = o.integer("n_chambers", cfg.geometry.n_chambers);
    cfg.geometry.chamber_width = o.number("chamber_width_mm", cfg.geometry.chamber_width);
    cfg.geometry.chamber_height = o.number("chamber_height_mm", cfg.geometry.chamber_height);
    cfg.geometry.wall_thickness = o.number("wall_thickness_mm", cfg.geometry.wall_thickness);
    cfg.geometry.top_thickness = o.number("top_thickness_mm", cfg.geometry.top_thickness);
    cfg.geometry.channel_height = o.number("channel_height_mm", cfg.geometry.channel_height);
    cfg.geometry.base_thickness = o.number("base_thickness_mm", cfg.geometry.base_thickness);
    cfg.geometry.limiting_layer_thickness =
        o.number("limiting_layer_thickness_mm", cfg.geometry.limiting_layer_thickness);
    cfg.geometry.end_cap_length = o.number("end_cap_length_mm", cfg.geometry.end_cap_length);
    o.finish();
  }
  if (const json* m = root.child("mesh")) {
    StrictObject o(*m, "mesh");
    cfg.mesh_target_h = o.number("target_h_mm", cfg.mesh_target_h);
    o.finish();
  }
  if (const json* m = root.child("materials")) {
    StrictObject o(*m, "materials");
    if (const json* b = o.child("body")) cfg.materials.body = parse_hyperelastic(*b, "materials.body");
    if (const json* s = o.child("sealing"))
      cfg.materials.sealing = parse_hyperelastic(*s, "materials.sealing");
    if (const json* w = o.child("interior_walls"))
      cfg.materials.walls = parse_hyperelastic(*w, "materials.interior_walls");
    if (const json* l = o.child("limiting"))
      cfg.materials.limiting = parse_linear(*l, "materials.limiting");
    o.finish();
  }
  if (const json* s = root.child("simulate")) {
    StrictObject o(*s, "simulate");
    cfg.simulate_max_pressure = o.number("max_pressure_kPa", cfg.simulate_max_pressure);
    cfg.simulate_initial_increment =
        o.number("initial_increment_kPa", cfg.simulate_initial_increment);
    o.finish();
  }
  if (const json* p = root.child("protocol")) {
    StrictObject o(*p, "protocol");
    cfg.protocol.start_pressure = o.number("start_pressure_kPa", cfg.protocol.start_pressure);
    cfg.protocol.step_increment = o.number("step_increment_kPa", cfg.protocol.step_increment);
    cfg.protocol.n_steps = o.integer("n_steps", cfg.protocol.n_steps);
    cfg.protocol.hold_duration = o.number("hold_duration_s", cfg.protocol.hold_duration);
    o.finish();
  }
  if (const json* n = root.child("noise")) {
    StrictObject o(*n, "noise");
    cfg.noise.enabled = o.boolean("enabled", cfg.noise.enabled);
    cfg.noise.pressure_sigma = o.number("pressure_sigma_kPa", cfg.noise.pressure_sigma);
    cfg.noise.angle_sigma = o.number("angle_sigma_deg", cfg.noise.angle_sigma);
    o.finish();
  }
  if (const json* f = root.child("fatigue")) {
    if (f->is_string()) {
      if (f->get<std::string>() != "calibrate")
        raise(ErrorCode::Config, "fatigue: expected \"calibrate\" or a parameter object");
      cfg.fatigue_resolved = false;
    } else {
      cfg.fatigue = parse_fatigue(*f, "fatigue");
      cfg.fatigue_resolved = true;
    }
  }
  if (const json* c = root.child("calibration")) {
    StrictObject o(*c, "calibration");
    cfg.calibration.target_pressure = o.number("target_pressure_kPa", cfg.calibration.target_pressure);
    cfg.calibration.target_angle = o.number("target_angle_deg", cfg.calibration.target_angle);
    cfg.calibration.angle_tolerance =
        o.number("angle_tolerance_deg", cfg.calibration.angle_tolerance);
    cfg.calibration.max_ramps = o.integer("max_ramps", cfg.calibration.max_ramps);
    cfg.calibration.fatigue_targets.trial1_max_nrmse_pct =
        o.number("trial1_max_nrmse_pct", cfg.calibration.fatigue_targets.trial1_max_nrmse_pct);
    cfg.calibration.fatigue_targets.trial_n_nrmse_pct =
        o.number("trial_n_nrmse_pct", cfg.calibration.fatigue_targets.trial_n_nrmse_pct);
    cfg.calibration.fatigue_targets.trial_n_tol_pct =
        o.number("trial_n_tol_pct", cfg.calibration.fatigue_targets.trial_n_tol_pct);
    o.finish();
  }
  cfg.trials = root.integer("trials", cfg.trials);
  cfg.seed = root.uinteger("seed", cfg.seed);
  cfg.output_dir = root.text("output_dir", cfg.output_dir);
  root.finish();
  cfg.validate();
  return cfg;
}

ToolkitConfig ToolkitConfig::load(const std::filesystem::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const Error&) {
    raise(ErrorCode::Config, "cannot read config file '" + path.string() + "'");
  }
  return from_json(text);
}

void ToolkitConfig::save(const std::filesystem::path& path) const {
  write_text_file(path, to_json(false));
}

ToolkitConfig default_config() {
  ToolkitConfig cfg;
  cfg.materials.body = ecoflex50_yeoh3();
  cfg.materials.sealing = ecoflex50_yeoh3();
  cfg.materials.walls = ecoflex50_yeoh3();
  cfg.materials.limiting = {6.5e6, 0.2};  // 6.5 GPa fabric layer
  return cfg;
}

}  // namespace pneusim
