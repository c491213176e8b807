// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <vector>

namespace pneusim {

/// Cycle-level damage model: a scalar damage variable driven by the hotspot
/// stress of each trial produces the two observed fatigue signatures,
/// steady-state softening at high pressure and in-hold creep drift.
struct FatigueParams {
  double damage_rate = 0.0;          // alpha, per cycle
  double stress_exponent = 2.0;      // m >= 1
  double sigma_ref = 0.0;            // kPa; damage threshold stress
  double damage_cap = 0.5;           // D_max in (0, 1)
  double softening_gain = 0.0;       // gamma
  double creep_onset = 32.5;         // p_c, kPa
  double creep_gain = 0.0;           // k_c, deg/s per kPa per unit damage
  double response_time = 0.8;        // tau_r, s; first-order plant constant
  double softening_ramp_width = 10.0;  // kPa; softening fades in over this span

  void validate() const;
};

struct DamageState {
  double damage = 0.0;  // D in [0, damage_cap]
  int cycles = 0;

  struct CycleRecord {
    double peak_vm;  // kPa
    double delta_d;
    double damage_after;
  };
  std::vector<CycleRecord> history;
};

/// One loading cycle: D' = min(D_max, D + alpha * max(0, s/s_ref - 1)^m)
/// with s the cycle's peak von Mises stress.
DamageState cycle_update(const DamageState& state, double peak_vm, const FatigueParams& p);

/// Softening ramp r(p) = clamp((p - p_c) / ramp_width, 0, 1).
double softening_ramp(double pressure, const FatigueParams& p);

/// Steady-state angle of the fatigued actuator:
/// theta_fem * (1 + gamma * D * r(p)). Identity at D = 0 or below onset.
double softened_angle(double theta_fem_deg, double pressure, double damage,
                      const FatigueParams& p);

/// In-hold drift rate k_c * D * max(0, p - p_c), deg/s.
double creep_rate(double pressure, double damage, const FatigueParams& p);

}  // namespace pneusim
