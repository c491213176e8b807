// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/material.hpp"

namespace pneusim {

/// Uniaxial tension test data: (stretch, nominal stress in kPa) pairs,
/// sorted by stretch.
struct UniaxialDataset {
  struct Sample {
    double stretch;
    double nominal_stress;
  };
  std::vector<Sample> samples;
  std::string label;

  /// Throws ErrorCode::Fit unless sorted, positive stretches, and at least
  /// max(4, order + 1) samples for the given fit order.
  void validate(int order) const;
};

/// CSV ingestion: header `stretch,nominal_stress_<unit>`, `#` comments.
/// Stress values are converted to kPa.
UniaxialDataset read_uniaxial_csv(const std::filesystem::path& path);

struct FitDiagnostics {
  double rms_residual = 0.0;        // kPa
  double rms_residual_rel = 0.0;    // relative to max |stress|
  double condition_estimate = 0.0;  // of the column-scaled regressor
  bool monotone_over_range = true;  // sampled dP/dlambda > 0 check
};

struct FitResult {
  HyperelasticModel model;
  FitDiagnostics diagnostics;
};

/// Linear least squares for the Yeoh coefficients: the uniaxial nominal
/// stress is linear in (C10, C20, C30) with regressor columns
/// 2(l - l^-2) * [1, 2(I1-3), 3(I1-3)^2]. Records the data's stretch range
/// on the returned model. Throws ErrorCode::Fit on rank deficiency, a
/// non-positive C10, or a response that loses monotonicity inside the
/// fitted range.
FitResult fit_yeoh(const UniaxialDataset& data, int order,
                   double bulk_multiplier = kDefaultBulkPenaltyMultiplier);

/// Warnings for stretches queried outside the model's fitted range.
/// Empty when the query range is covered.
std::vector<std::string> validity_check(const HyperelasticModel& model,
                                        double query_lo, double query_hi);

}  // namespace pneusim
