// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/fatigue.hpp"

#include <algorithm>
#include <cmath>

#include "core/error.hpp"

namespace pneusim {

void FatigueParams::validate() const {
  if (damage_rate < 0.0) raise(ErrorCode::Config, "fatigue: damage rate must be >= 0");
  if (stress_exponent < 1.0) raise(ErrorCode::Config, "fatigue: stress exponent must be >= 1");
  if (!(damage_cap > 0.0 && damage_cap < 1.0))
    raise(ErrorCode::Config, "fatigue: damage cap must lie in (0, 1)");
  if (softening_gain < 0.0) raise(ErrorCode::Config, "fatigue: softening gain must be >= 0");
  if (creep_gain < 0.0) raise(ErrorCode::Config, "fatigue: creep gain must be >= 0");
  if (!(response_time > 0.0)) raise(ErrorCode::Config, "fatigue: response time must be > 0");
  if (damage_rate > 0.0 && !(sigma_ref > 0.0))
    raise(ErrorCode::Config, "fatigue: reference stress must be > 0 when damage accumulates");
  if (!(softening_ramp_width > 0.0))
    raise(ErrorCode::Config, "fatigue: softening ramp width must be > 0");
}

DamageState cycle_update(const DamageState& state, double peak_vm, const FatigueParams& p) {
  if (peak_vm < 0.0) raise(ErrorCode::InvalidArgument, "peak stress must be >= 0");
  DamageState next = state;
  double delta = 0.0;
  if (p.damage_rate > 0.0) {
    const double over = std::max(0.0, peak_vm / p.sigma_ref - 1.0);
    delta = p.damage_rate * std::pow(over, p.stress_exponent);
  }
  next.damage = std::min(p.damage_cap, state.damage + delta);
  next.cycles = state.cycles + 1;
  next.history.push_back({peak_vm, next.damage - state.damage, next.damage});
  return next;
}

double softening_ramp(double pressure, const FatigueParams& p) {
  return std::clamp((pressure - p.creep_onset) / p.softening_ramp_width, 0.0, 1.0);
}

double softened_angle(double theta_fem_deg, double pressure, double damage,
                      const FatigueParams& p) {
  return theta_fem_deg * (1.0 + p.softening_gain * damage * softening_ramp(pressure, p));
}

double creep_rate(double pressure, double damage, const FatigueParams& p) {
  return p.creep_gain * damage * std::max(0.0, pressure - p.creep_onset);
}

}  // namespace pneusim
