// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "core/linalg.hpp"

namespace pneusim {

enum class HyperelasticKind { Yeoh1, Yeoh2, Yeoh3, MooneyRivlin };

std::string to_string(HyperelasticKind kind);
HyperelasticKind hyperelastic_kind_from_string(const std::string& name);

struct StretchRange {
  double lo = 1.0;
  double hi = 1.0;
};

/// Isochoric-invariant hyperelastic law plus a quadratic volumetric penalty,
/// evaluated under the plane-strain convention (out-of-plane stretch fixed
/// at 1, so I1 = tr(F^T F) + 1 and J = det F on 2x2 arguments).
///
/// Yeoh order n: W_dev = sum_{i=1..n} c_i (I1bar - 3)^i, coefficients
/// (C10, C20, C30). Mooney-Rivlin: W_dev = C10 (I1bar - 3) + C01 (I2bar - 3).
/// Coefficients and the penalty modulus are stored in kPa.
struct HyperelasticModel {
  HyperelasticKind kind = HyperelasticKind::Yeoh3;
  std::vector<double> coefficients;
  double bulk_penalty = 0.0;
  std::optional<StretchRange> fitted_stretch_range;

  /// Throws ErrorCode::Config on a coefficient-count mismatch, a
  /// non-positive initial shear modulus, or a non-positive penalty.
  void validate() const;
};

constexpr double kDefaultBulkPenaltyMultiplier = 2000.0;

HyperelasticModel make_yeoh(const std::vector<double>& coefficients,
                            double bulk_multiplier = kDefaultBulkPenaltyMultiplier);
HyperelasticModel make_mooney_rivlin(double c10, double c01,
                                     double bulk_multiplier = kDefaultBulkPenaltyMultiplier);

/// Ecoflex-50 3rd-order Yeoh coefficients, interpreted in kPa.
HyperelasticModel ecoflex50_yeoh3();

/// Strain-limiting layer: linear elastic, turned into a Saint
/// Venant-Kirchhoff law for large-rotation analysis. E in kPa.
struct LinearElasticModel {
  double youngs_modulus = 0.0;
  double poisson_ratio = 0.0;

  void validate() const;
  double lame_lambda() const;
  double lame_mu() const;
};

struct StressTangent {
  Mat2 stress;      // second Piola-Kirchhoff, kPa
  Tensor4 tangent;  // 2 dS/dC = 4 d2W/dCdC, kPa
  double energy;    // strain-energy density, kPa
  double s33;       // out-of-plane PK2 component, kPa (plane strain)
};

struct SmallStrainModuli {
  double shear;  // mu, kPa
  double bulk;   // K, kPa
};

/// Energy density at deformation gradient F (plane strain).
/// Throws InvalidDeformation on det F <= 0.
double strain_energy(const HyperelasticModel& model, const Mat2& F);

/// Energy density at right Cauchy-Green C = F^T F (plane strain).
double strain_energy_from_C(const HyperelasticModel& model, const Mat2& C);

/// PK2 stress, material tangent, energy and the out-of-plane stress
/// component at C. Throws InvalidDeformation if C is not SPD.
StressTangent pk2_stress_and_tangent(const HyperelasticModel& model, const Mat2& C);

/// Saint Venant-Kirchhoff response of the linear model at C.
StressTangent svk_stress_and_tangent(const LinearElasticModel& model, const Mat2& C);

/// Nominal (first Piola-Kirchhoff) stress of the exact incompressible
/// uniaxial reduction at stretch lambda. Fitting/validation path only; the
/// volumetric penalty plays no part. Throws InvalidArgument on lambda <= 0.
double uniaxial_nominal_stress(const HyperelasticModel& model, double lambda);

/// dW_dev/dI1 on the incompressible uniaxial path at first invariant I1.
double deviatoric_dW_dI1(const HyperelasticModel& model, double i1);

SmallStrainModuli small_strain_moduli(const HyperelasticModel& model);

}  // namespace pneusim
