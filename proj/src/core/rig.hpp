// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <vector>

#include "core/fatigue.hpp"
#include "core/fem.hpp"

namespace pneusim {

/// Constant-pressure holds with fixed increments, e.g. 0,5,...,45 kPa for
/// 16 s each.
struct StaircaseProtocol {
  double start_pressure = 0.0;  // kPa
  double step_increment = 5.0;  // kPa
  int n_steps = 10;
  double hold_duration = 16.0;  // s

  void validate() const;
  double pressure_of_step(int k) const { return start_pressure + k * step_increment; }
  double max_pressure() const { return pressure_of_step(n_steps - 1); }
  double total_duration() const { return n_steps * hold_duration; }
};

struct NoiseParams {
  bool enabled = true;
  double pressure_sigma = 0.2;  // kPa
  double angle_sigma = 0.5;     // deg
};

constexpr double kPressureSampleHz = 400.0;
constexpr double kAngleSampleHz = 30.0;
constexpr double kPressureLagTime = 0.1;  // s; inlet line + valve response

/// Raw sampled series of one staircase trial. Pressure at 400 Hz, angle at
/// 30 fps, both spanning n_steps * hold_duration.
struct TrialLog {
  int trial_index = 0;  // 1-based
  std::vector<double> pressure_time;  // s
  std::vector<double> pressure_kpa;
  std::vector<double> angle_time;  // s
  std::vector<double> angle_deg;
  double damage_before = 0.0;
  double damage_after = 0.0;
  std::uint64_t seed = 0;
};

struct TrialResult {
  TrialLog log;
  DamageState damage;
};

/// Simulates one staircase trial: the commanded pressure passes through a
/// first-order lag (tau_p = 0.1 s); the angle plant is first-order toward the
/// fatigue-softened static curve with an in-hold creep accumulator, integrated
/// with fixed-step RK4 on the 400 Hz grid. Sensor noise is Gaussian and purely
/// additive on the logged series; the pressure-noise and angle-noise streams
/// are independent. After the hold sequence the damage state advances one
/// cycle using the pristine hotspot stress at the trial's peak pressure,
/// scaled by (1 + gamma * D) since a softened body strains further.
TrialResult run_trial(const StaticCurve& curve, const DamageState& damage,
                      const FatigueParams& fatigue, const StaircaseProtocol& protocol,
                      const NoiseParams& noise, std::uint64_t trial_seed, int trial_index);

/// Explicit control over the two sensor-noise streams (they are independent,
/// so pressure noise can be re-seeded without disturbing the angle series).
struct TrialStreams {
  std::uint64_t pressure_seed = 0;
  std::uint64_t angle_seed = 0;
};

TrialResult run_trial_with_streams(const StaticCurve& curve, const DamageState& damage,
                                   const FatigueParams& fatigue,
                                   const StaircaseProtocol& protocol, const NoiseParams& noise,
                                   const TrialStreams& streams, int trial_index);

struct Campaign {
  std::vector<TrialLog> logs;
  DamageState damage;  // after the last trial
};

/// Sequential trials threading the damage state; per-trial seeds derived
/// deterministically from the master seed.
Campaign run_campaign(const StaticCurve& curve, const FatigueParams& fatigue,
                      const StaircaseProtocol& protocol, const NoiseParams& noise,
                      std::uint64_t master_seed, int n_trials);

// Per-trial CSV contract consumed by the analysis stage.
void write_trial_csv(const TrialLog& log, const std::filesystem::path& dir);
TrialLog read_trial_csv(const std::filesystem::path& dir, int trial_index,
                        const StaircaseProtocol& protocol);

struct StaticCalibration {
  double scale = 1.0;  // multiplier applied to the hyperelastic coefficients
  double achieved_angle = 0.0;  // deg at the target pressure
  int ramps_used = 0;
};

/// Tunes one scalar knob, a uniform scale on the Yeoh coefficients, until the
/// bending angle at the target pressure lands within tolerance. The supplied
/// evaluator runs a full pressure ramp at a given scale and returns the
/// angle. Softer material bends further, so the response must decrease with
/// scale; the bracket evaluations verify that before the search starts.
/// Throws ErrorCode::Calibration when the target is unreachable inside
/// [scale_lo, scale_hi] or the ramp budget runs out.
StaticCalibration calibrate_static(const std::function<double(double)>& angle_at_scale,
                                   double target_angle_deg, double tolerance_deg,
                                   int max_ramps = 12, double scale_lo = 1.0 / 50.0,
                                   double scale_hi = 50.0);

struct FatigueTargets {
  double trial1_max_nrmse_pct = 5.0;
  double trial_n_nrmse_pct = 20.0;
  double trial_n_tol_pct = 1.0;
};

/// Fills the free fatigue parameters (alpha, gamma, k_c, sigma_ref) so that a
/// fixed-seed campaign reproduces the target error growth:
///   - sigma_ref is the pristine hotspot stress at the highest sub-onset step;
///   - alpha is chosen (nested bisection, damage recursion only) so damage
///     before the last trial reaches 60% of the cap;
///   - k_c makes the last trial's lowest creeping step drift visibly
///     (~2.5 deg over the hold) while staying below half the softening offset;
///   - gamma is bisected on the last trial's NRMSE from the injected
///     campaign evaluator.
/// Throws ErrorCode::Calibration with the best-achieved values when the
/// targets cannot be met by a monotone damage model.
FatigueParams calibrate_fatigue(
    const StaticCurve& curve, const StaircaseProtocol& protocol, FatigueParams base,
    int n_trials, const FatigueTargets& targets,
    const std::function<std::vector<double>(const FatigueParams&)>& campaign_nrmse);

}  // namespace pneusim
