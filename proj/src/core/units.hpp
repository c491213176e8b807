// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

#include "core/error.hpp"

namespace pneusim {

// Internal unit system: lengths in mm, pressures/stresses in kPa, forces in
// mN (1 mN/mm^2 = 1 kPa), times in s, angles in degrees unless noted.

/// Conversion factor from a named pressure unit to kPa.
inline double pressure_unit_to_kpa(const std::string& unit) {
  if (unit == "Pa") return 1e-3;
  if (unit == "kPa") return 1.0;
  if (unit == "MPa") return 1e3;
  if (unit == "GPa") return 1e6;
  raise(ErrorCode::Config,
        "unknown pressure unit '" + unit + "' (expected Pa, kPa, MPa or GPa)");
}

inline double kpa_to_mpa(double kpa) { return kpa * 1e-3; }

}  // namespace pneusim
