// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "core/fem.hpp"
#include "core/geometry.hpp"
#include "core/rig.hpp"

namespace pneusim {

struct CalibrationConfig {
  double target_pressure = 45.0;  // kPa
  double target_angle = 167.0;    // deg
  double angle_tolerance = 2.0;   // deg
  int max_ramps = 12;
  FatigueTargets fatigue_targets;
};

/// Whole-toolkit configuration. Every dimensioned key in the JSON form
/// carries its unit in the key name (_mm, _kPa, _s, _deg) or, for material
/// coefficients, an explicit "unit" field; parsing is strict, so a
/// dimensioned key without its unit suffix is rejected as unknown.
struct ToolkitConfig {
  PneuNetGeometry geometry;
  double mesh_target_h = 2.5;  // mm
  RegionMaterials materials;
  double simulate_max_pressure = 50.0;     // kPa
  double simulate_initial_increment = 5.0; // kPa
  StaircaseProtocol protocol;
  NoiseParams noise;
  bool fatigue_resolved = false;  // false = "calibrate" placeholder
  FatigueParams fatigue;
  CalibrationConfig calibration;
  int trials = 10;
  std::uint64_t seed = 20260808;
  std::string output_dir = "out";

  void validate() const;

  /// Canonical JSON (kPa units). `snapshot` omits runtime-only fields
  /// (the output directory) so reports are byte-stable across working dirs.
  std::string to_json(bool snapshot = false) const;

  static ToolkitConfig from_json(const std::string& text);
  static ToolkitConfig load(const std::filesystem::path& path);
  void save(const std::filesystem::path& path) const;
};

ToolkitConfig default_config();

}  // namespace pneusim
