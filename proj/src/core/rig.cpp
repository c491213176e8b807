// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/rig.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/csvio.hpp"
#include "core/error.hpp"
#include "core/rng.hpp"

namespace pneusim {

void StaircaseProtocol::validate() const {
  if (!(step_increment > 0.0)) raise(ErrorCode::Config, "protocol: step increment must be > 0");
  if (!(hold_duration > 0.0)) raise(ErrorCode::Config, "protocol: hold duration must be > 0");
  if (n_steps < 1) raise(ErrorCode::Config, "protocol: need at least one step");
  if (start_pressure < 0.0) raise(ErrorCode::Config, "protocol: start pressure must be >= 0");
}

TrialResult run_trial(const StaticCurve& curve, const DamageState& damage,
                      const FatigueParams& fatigue, const StaircaseProtocol& protocol,
                      const NoiseParams& noise, std::uint64_t trial_seed, int trial_index) {
  TrialStreams streams{derive_seed(trial_seed, 0xA11CEu), derive_seed(trial_seed, 0xB0B5EEDu)};
  TrialResult result =
      run_trial_with_streams(curve, damage, fatigue, protocol, noise, streams, trial_index);
  result.log.seed = trial_seed;
  return result;
}

TrialResult run_trial_with_streams(const StaticCurve& curve, const DamageState& damage,
                                   const FatigueParams& fatigue,
                                   const StaircaseProtocol& protocol, const NoiseParams& noise,
                                   const TrialStreams& streams, int trial_index) {
  protocol.validate();
  fatigue.validate();
  if (!curve.covers(protocol.max_pressure()))
    raise(ErrorCode::InvalidArgument,
          "protocol reaches " + format_double(protocol.max_pressure()) +
              " kPa but the static curve ends at " +
              format_double(curve.samples.back().pressure) + " kPa");

  const double d = damage.damage;
  const double dt = 1.0 / kPressureSampleHz;
  const int n_pressure = static_cast<int>(std::llround(protocol.total_duration() * kPressureSampleHz));
  const int n_angle = static_cast<int>(std::llround(protocol.total_duration() * kAngleSampleHz));

  const auto commanded = [&](int sample) {
    const int step = std::min(
        static_cast<int>(sample * dt / protocol.hold_duration + 1e-9), protocol.n_steps - 1);
    return protocol.pressure_of_step(step);
  };
  const auto steady_angle = [&](double p) {
    const double p_clamped = std::clamp(p, 0.0, protocol.max_pressure());
    return softened_angle(curve.angle_at(p_clamped), p_clamped, d, fatigue);
  };

  // States: lagged pressure, creep accumulator (reset at each hold), angle.
  std::vector<double> p_lag(static_cast<std::size_t>(n_pressure));
  std::vector<double> theta(static_cast<std::size_t>(n_pressure));
  double p = 0.0, creep_acc = 0.0, th = 0.0;
  int current_step = 0;
  for (int i = 0; i < n_pressure; ++i) {
    const int step = std::min(
        static_cast<int>(i * dt / protocol.hold_duration + 1e-9), protocol.n_steps - 1);
    if (step != current_step) {
      current_step = step;
      creep_acc = 0.0;
    }
    p_lag[static_cast<std::size_t>(i)] = p;
    theta[static_cast<std::size_t>(i)] = th;
    if (!(std::isfinite(th) && th < 360.0))
      raise(ErrorCode::Internal, "trial integration produced an unphysical angle");

    // RK4 on (p, c, th); the command is constant across the substep.
    const double p_cmd = commanded(i);
    const auto deriv = [&](double ps, double cs, double ths, double* out) {
      out[0] = (p_cmd - ps) / kPressureLagTime;
      out[1] = creep_rate(ps, d, fatigue);
      out[2] = (steady_angle(ps) + cs - ths) / fatigue.response_time;
    };
    double k1[3], k2[3], k3[3], k4[3];
    deriv(p, creep_acc, th, k1);
    deriv(p + 0.5 * dt * k1[0], creep_acc + 0.5 * dt * k1[1], th + 0.5 * dt * k1[2], k2);
    deriv(p + 0.5 * dt * k2[0], creep_acc + 0.5 * dt * k2[1], th + 0.5 * dt * k2[2], k3);
    deriv(p + dt * k3[0], creep_acc + dt * k3[1], th + dt * k3[2], k4);
    p += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0]);
    creep_acc += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1]);
    th += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2]);
  }

  TrialResult result;
  TrialLog& log = result.log;
  log.trial_index = trial_index;
  log.seed = streams.pressure_seed;
  log.damage_before = d;

  GaussianStream pressure_noise(streams.pressure_seed);
  GaussianStream angle_noise(streams.angle_seed);

  log.pressure_time.resize(static_cast<std::size_t>(n_pressure));
  log.pressure_kpa.resize(static_cast<std::size_t>(n_pressure));
  for (int i = 0; i < n_pressure; ++i) {
    log.pressure_time[static_cast<std::size_t>(i)] = i * dt;
    double v = p_lag[static_cast<std::size_t>(i)];
    if (noise.enabled) v += pressure_noise.next(noise.pressure_sigma);
    log.pressure_kpa[static_cast<std::size_t>(i)] = v;
  }

  log.angle_time.resize(static_cast<std::size_t>(n_angle));
  log.angle_deg.resize(static_cast<std::size_t>(n_angle));
  for (int j = 0; j < n_angle; ++j) {
    const double t = j / kAngleSampleHz;
    // Virtual camera: linear interpolation between plant grid states.
    const double x = t * kPressureSampleHz;
    const int i0 = std::min(static_cast<int>(x), n_pressure - 1);
    const int i1 = std::min(i0 + 1, n_pressure - 1);
    const double frac = x - i0;
    double v = (1.0 - frac) * theta[static_cast<std::size_t>(i0)] +
               frac * theta[static_cast<std::size_t>(i1)];
    if (noise.enabled) v += angle_noise.next(noise.angle_sigma);
    log.angle_time[static_cast<std::size_t>(j)] = t;
    log.angle_deg[static_cast<std::size_t>(j)] = v;
  }

  const double peak_vm =
      curve.max_vm_at(protocol.max_pressure()) * (1.0 + fatigue.softening_gain * d);
  result.damage = cycle_update(damage, peak_vm, fatigue);
  log.damage_after = result.damage.damage;
  return result;
}

Campaign run_campaign(const StaticCurve& curve, const FatigueParams& fatigue,
                      const StaircaseProtocol& protocol, const NoiseParams& noise,
                      std::uint64_t master_seed, int n_trials) {
  if (n_trials < 1) raise(ErrorCode::InvalidArgument, "campaign needs at least one trial");
  Campaign campaign;
  DamageState damage;
  for (int k = 1; k <= n_trials; ++k) {
    const std::uint64_t trial_seed = derive_seed(master_seed, static_cast<std::uint64_t>(k));
    TrialResult r = run_trial(curve, damage, fatigue, protocol, noise, trial_seed, k);
    damage = std::move(r.damage);
    campaign.logs.push_back(std::move(r.log));
  }
  campaign.damage = std::move(damage);
  return campaign;
}

namespace {

std::filesystem::path trial_file(const std::filesystem::path& dir, int trial_index,
                                 const char* kind) {
  return dir / ("trial_" + std::to_string(trial_index) + "_" + kind + ".csv");
}

void write_series(const std::filesystem::path& path, const char* header,
                  const std::vector<double>& t, const std::vector<double>& v) {
  std::ostringstream out;
  out << header << "\n";
  for (std::size_t i = 0; i < t.size(); ++i)
    out << format_double(t[i]) << "," << format_double(v[i]) << "\n";
  write_text_file(path, out.str());
}

}  // namespace

void write_trial_csv(const TrialLog& log, const std::filesystem::path& dir) {
  write_series(trial_file(dir, log.trial_index, "pressure"), "t_s,p_kPa", log.pressure_time,
               log.pressure_kpa);
  write_series(trial_file(dir, log.trial_index, "angle"), "t_s,theta_deg", log.angle_time,
               log.angle_deg);
}

TrialLog read_trial_csv(const std::filesystem::path& dir, int trial_index,
                        const StaircaseProtocol& protocol) {
  TrialLog log;
  log.trial_index = trial_index;
  const CsvTable pressure = read_csv(trial_file(dir, trial_index, "pressure"));
  const CsvTable angle = read_csv(trial_file(dir, trial_index, "angle"));
  if (pressure.header != std::vector<std::string>{"t_s", "p_kPa"})
    raise(ErrorCode::LogIntegrity, "trial " + std::to_string(trial_index) +
                                       ": unexpected pressure CSV header");
  if (angle.header != std::vector<std::string>{"t_s", "theta_deg"})
    raise(ErrorCode::LogIntegrity,
          "trial " + std::to_string(trial_index) + ": unexpected angle CSV header");
  for (const auto& row : pressure.rows) {
    log.pressure_time.push_back(row[0]);
    log.pressure_kpa.push_back(row[1]);
  }
  for (const auto& row : angle.rows) {
    log.angle_time.push_back(row[0]);
    log.angle_deg.push_back(row[1]);
  }

  const std::size_t want_p =
      static_cast<std::size_t>(std::llround(protocol.total_duration() * kPressureSampleHz));
  const std::size_t want_a =
      static_cast<std::size_t>(std::llround(protocol.total_duration() * kAngleSampleHz));
  if (log.pressure_time.size() != want_p || log.angle_time.size() != want_a)
    raise(ErrorCode::LogIntegrity,
          "trial " + std::to_string(trial_index) + ": sample counts do not span the protocol");
  for (std::size_t i = 1; i < log.pressure_time.size(); ++i)
    if (std::abs(log.pressure_time[i] - log.pressure_time[i - 1] - 1.0 / kPressureSampleHz) >
        1e-9)
      raise(ErrorCode::LogIntegrity,
            "trial " + std::to_string(trial_index) + ": pressure series is not 400 Hz");
  for (std::size_t i = 1; i < log.angle_time.size(); ++i)
    if (std::abs(log.angle_time[i] - log.angle_time[i - 1] - 1.0 / kAngleSampleHz) > 1e-9)
      raise(ErrorCode::LogIntegrity,
            "trial " + std::to_string(trial_index) + ": angle series is not 30 fps");
  return log;
}

StaticCalibration calibrate_static(const std::function<double(double)>& angle_at_scale,
                                   double target_angle_deg, double tolerance_deg,
                                   int max_ramps, double scale_lo, double scale_hi) {
  StaticCalibration cal;
  const auto eval = [&](double scale) {
    if (cal.ramps_used >= max_ramps)
      raise(ErrorCode::Calibration,
            "static calibration exhausted its ramp budget (" + std::to_string(max_ramps) +
                "); best angle so far " + format_double(cal.achieved_angle) + " deg");
    ++cal.ramps_used;
    return angle_at_scale(scale);
  };

  // Verification ramp at the current scale; often already in tolerance.
  double angle_mid = eval(1.0);
  cal.scale = 1.0;
  cal.achieved_angle = angle_mid;
  if (std::abs(angle_mid - target_angle_deg) <= tolerance_deg) return cal;

  // Softer material bends further, so the angle decreases with scale. Pick
  // the bracket side accordingly and verify monotonicity across it.
  double lo, hi, angle_lo, angle_hi;
  if (angle_mid < target_angle_deg) {
    lo = scale_lo;
    hi = 1.0;
    angle_hi = angle_mid;
    angle_lo = eval(lo);
  } else {
    lo = 1.0;
    hi = scale_hi;
    angle_lo = angle_mid;
    angle_hi = eval(hi);
  }
  if (!(angle_lo > angle_hi))
    raise(ErrorCode::Calibration,
          "bending angle is not decreasing in material scale over [" + format_double(lo) +
              ", " + format_double(hi) + "]");
  if (target_angle_deg > angle_lo + tolerance_deg || target_angle_deg < angle_hi - tolerance_deg)
    raise(ErrorCode::Calibration,
          "target angle " + format_double(target_angle_deg) + " deg unreachable: bracket [" +
              format_double(angle_hi) + ", " + format_double(angle_lo) + "] deg at scales [" +
              format_double(lo) + ", " + format_double(hi) + "]");

  // Regula falsi in log-scale with bisection fallback (Illinois scheme).
  double f_lo = angle_lo - target_angle_deg;  // > 0
  double f_hi = angle_hi - target_angle_deg;  // < 0
  int side = 0;
  while (true) {
    double llo = std::log(lo), lhi = std::log(hi);
    double lmid = (llo * f_hi - lhi * f_lo) / (f_hi - f_lo);
    const double lbis = 0.5 * (llo + lhi);
    if (!(lmid > llo && lmid < lhi)) lmid = lbis;
    // Blend toward bisection to keep the bracket shrinking.
    lmid = 0.7 * lmid + 0.3 * lbis;
    const double s = std::exp(lmid);
    const double angle = eval(s);
    cal.scale = s;
    cal.achieved_angle = angle;
    const double f = angle - target_angle_deg;
    if (std::abs(f) <= tolerance_deg) return cal;
    if (f > 0.0) {
      lo = s;
      f_lo = f;
      if (side == 1) f_hi *= 0.5;
      side = 1;
    } else {
      hi = s;
      f_hi = f;
      if (side == -1) f_lo *= 0.5;
      side = -1;
    }
  }
}

FatigueParams calibrate_fatigue(
    const StaticCurve& curve, const StaircaseProtocol& protocol, FatigueParams base,
    int n_trials, const FatigueTargets& targets,
    const std::function<std::vector<double>(const FatigueParams&)>& campaign_nrmse) {
  protocol.validate();
  if (n_trials < 2) raise(ErrorCode::InvalidArgument, "fatigue calibration needs >= 2 trials");

  FatigueParams params = base;
  params.damage_rate = 0.0;
  params.softening_gain = 0.0;
  params.creep_gain = 0.0;

  // Reference stress: pristine hotspot at the highest step below creep onset
  // (30 kPa for the default staircase).
  double p_ref = -1.0;
  double p_creep_lo = -1.0;
  for (int k = 0; k < protocol.n_steps; ++k) {
    const double p = protocol.pressure_of_step(k);
    if (p <= params.creep_onset) p_ref = std::max(p_ref, p);
    if (p > params.creep_onset && (p_creep_lo < 0.0 || p < p_creep_lo)) p_creep_lo = p;
  }
  if (p_ref < 0.0)
    raise(ErrorCode::Calibration, "no protocol step at or below the creep onset pressure");
  params.sigma_ref = curve.max_vm_at(p_ref);
  if (!(params.sigma_ref > 0.0))
    raise(ErrorCode::Calibration, "pristine hotspot stress at the reference step is zero");

  if (targets.trial_n_nrmse_pct <= targets.trial_n_tol_pct) return params;  // nothing to match

  const double vm_peak = curve.max_vm_at(protocol.max_pressure());
  if (vm_peak <= params.sigma_ref)
    raise(ErrorCode::Calibration,
          "peak stress does not exceed the damage threshold; the targets are unreachable");

  const double d_last_target = 0.6 * params.damage_cap;  // damage before the last trial
  const auto damage_before_last = [&](double alpha, double gamma) {
    double d = 0.0;
    for (int k = 1; k < n_trials; ++k) {
      const double peak = vm_peak * (1.0 + gamma * d);
      const double over = std::max(0.0, peak / params.sigma_ref - 1.0);
      d = std::min(params.damage_cap, d + alpha * std::pow(over, params.stress_exponent));
    }
    return d;
  };
  const auto alpha_for = [&](double gamma) {
    double hi = 1.0;
    while (damage_before_last(hi, gamma) < d_last_target && hi < 1e6) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      (damage_before_last(mid, gamma) < d_last_target ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };

  const double hold_past_mark = std::max(protocol.hold_duration - 2.5, 1.0);
  const auto creep_gain_for = [&](double gamma) {
    if (p_creep_lo < 0.0) return 0.0;  // protocol never crosses the onset
    // Visible drift (~2.5 deg) at the lowest creeping step of the last trial,
    // capped at half the softening offset at peak pressure.
    const double k_drift =
        2.5 / (d_last_target * (p_creep_lo - params.creep_onset) * hold_past_mark);
    const double soft_offset =
        gamma * d_last_target * curve.angle_at(protocol.max_pressure());
    const double drift_unit =
        d_last_target * (protocol.max_pressure() - params.creep_onset) * hold_past_mark;
    const double k_cap = drift_unit > 0.0 ? 0.5 * soft_offset / drift_unit : k_drift;
    return std::min(k_drift, k_cap);
  };

  const auto metric = [&](double gamma) {
    FatigueParams trial_params = params;
    trial_params.softening_gain = gamma;
    trial_params.damage_rate = alpha_for(gamma);
    trial_params.creep_gain = creep_gain_for(gamma);
    const std::vector<double> nrmse = campaign_nrmse(trial_params);
    return std::pair<double, FatigueParams>(nrmse.back(), trial_params);
  };

  double g_lo = 0.0;
  auto m_lo = metric(g_lo);
  if (m_lo.first > targets.trial_n_nrmse_pct + targets.trial_n_tol_pct)
    raise(ErrorCode::Calibration,
          "baseline error " + format_double(m_lo.first) + "% already exceeds the trial-" +
              std::to_string(n_trials) + " target");

  double g_hi = 1.0;
  auto m_hi = metric(g_hi);
  while (m_hi.first < targets.trial_n_nrmse_pct && g_hi < 64.0) {
    g_hi *= 2.0;
    m_hi = metric(g_hi);
  }
  if (m_hi.first < targets.trial_n_nrmse_pct - targets.trial_n_tol_pct)
    raise(ErrorCode::Calibration,
          "softening gain " + format_double(g_hi) + " only reaches " +
              format_double(m_hi.first) + "% NRMSE; target unreachable");

  std::pair<double, FatigueParams> best = m_hi;
  for (int it = 0; it < 48; ++it) {
    if (std::abs(best.first - targets.trial_n_nrmse_pct) <= 0.5 * targets.trial_n_tol_pct)
      break;
    const double g_mid = 0.5 * (g_lo + g_hi);
    best = metric(g_mid);
    if (best.first < targets.trial_n_nrmse_pct)
      g_lo = g_mid;
    else
      g_hi = g_mid;
  }

  const std::vector<double> final_nrmse = campaign_nrmse(best.second);
  if (std::abs(final_nrmse.back() - targets.trial_n_nrmse_pct) > targets.trial_n_tol_pct)
    raise(ErrorCode::Calibration,
          "calibrated trial-" + std::to_string(n_trials) + " NRMSE " +
              format_double(final_nrmse.back()) + "% missed the target " +
              format_double(targets.trial_n_nrmse_pct) + "% +/- " +
              format_double(targets.trial_n_tol_pct));
  if (final_nrmse.front() > targets.trial1_max_nrmse_pct)
    raise(ErrorCode::Calibration,
          "trial-1 NRMSE " + format_double(final_nrmse.front()) +
              "% exceeds the allowed " + format_double(targets.trial1_max_nrmse_pct) + "%");
  return best.second;
}

}  // namespace pneusim
