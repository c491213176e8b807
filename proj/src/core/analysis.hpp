// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/rig.hpp"

namespace pneusim {

/// Per-hold summary extracted from one trial. The mark is the paper-style
/// steady-state reading 2.5 s into the hold; the end value is where the hold
/// finishes. Both are window medians so sensor noise cannot flip flags.
struct StepSummary {
  double pressure = 0.0;       // kPa
  double angle_at_mark = 0.0;  // deg, median over [2.4 s, 2.6 s] into the step
  double angle_at_end = 0.0;   // deg, median over the final 0.2 s
  bool plateau = true;         // |end - mark| < 1.0 deg
  double fem_angle = 0.0;      // deg, static-curve prediction at this pressure
};

constexpr double kMarkTime = 2.5;            // s into each hold
constexpr double kMarkHalfWindow = 0.1;      // s
constexpr double kEndWindow = 0.2;           // s
constexpr double kPlateauThreshold = 1.0;    // deg

/// Step boundaries come from the commanded schedule, never from the noisy
/// pressure trace. Throws ErrorCode::LogIntegrity when a window has no
/// samples.
std::vector<StepSummary> extract_steps(const TrialLog& log, const StaircaseProtocol& protocol,
                                       const StaticCurve& curve);

/// RMSE of (mark - FEM) over the steps, normalized by the FEM angle range
/// across the same steps, in percent. Throws on a flat FEM curve.
double nrmse(const std::vector<StepSummary>& summaries);

struct StepError {
  double pressure = 0.0;
  double abs_error = 0.0;      // |mark - FEM| deg
  double end_extension = 0.0;  // end - mark deg (the in-hold drift)
};

std::vector<StepError> per_step_errors(const std::vector<StepSummary>& summaries);

struct CampaignReport {
  std::vector<double> trial_nrmse_pct;                  // per trial
  std::vector<std::vector<StepSummary>> trial_steps;    // [trial][step]
  std::vector<std::vector<StepError>> trial_errors;     // [trial][step]
  std::vector<double> damage_before;                    // per trial
  std::string config_json;                              // snapshot (no output paths)
};

/// Full campaign analysis. Every log must carry data spanning the protocol;
/// the caller guarantees a consistent config (the toolkit layer refuses
/// mixed-config inputs before this point).
CampaignReport analyze_campaign(const std::vector<TrialLog>& logs,
                                const StaircaseProtocol& protocol, const StaticCurve& curve,
                                const std::string& config_json);

/// Writes report.json, nrmse.csv, step_errors.csv and the figure SVGs
/// (fig8a, fig8b, fig9, fig10, fig11) into `dir`.
void write_report(const CampaignReport& report, const std::vector<TrialLog>& logs,
                  const StaticCurve& curve, const std::filesystem::path& dir);

}  // namespace pneusim
