// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/material.hpp"

#include <cmath>

#include "core/error.hpp"

namespace pneusim {

std::string to_string(HyperelasticKind kind) {
  switch (kind) {
    case HyperelasticKind::Yeoh1: return "yeoh1";
    case HyperelasticKind::Yeoh2: return "yeoh2";
    case HyperelasticKind::Yeoh3: return "yeoh3";
    case HyperelasticKind::MooneyRivlin: return "mooney-rivlin";
  }
  return "?";
}

HyperelasticKind hyperelastic_kind_from_string(const std::string& name) {
  if (name == "yeoh1") return HyperelasticKind::Yeoh1;
  if (name == "yeoh2") return HyperelasticKind::Yeoh2;
  if (name == "yeoh3") return HyperelasticKind::Yeoh3;
  if (name == "mooney-rivlin") return HyperelasticKind::MooneyRivlin;
  raise(ErrorCode::Config, "unknown hyperelastic kind '" + name + "'");
}

namespace {

std::size_t expected_coefficient_count(HyperelasticKind kind) {
  switch (kind) {
    case HyperelasticKind::Yeoh1: return 1;
    case HyperelasticKind::Yeoh2: return 2;
    case HyperelasticKind::Yeoh3: return 3;
    case HyperelasticKind::MooneyRivlin: return 2;
  }
  return 0;
}

}  // namespace

void HyperelasticModel::validate() const {
  const std::size_t want = expected_coefficient_count(kind);
  if (coefficients.size() != want)
    raise(ErrorCode::Config, to_string(kind) + " takes exactly " + std::to_string(want) +
                                 " coefficients, got " + std::to_string(coefficients.size()));
  if (coefficients[0] <= 0.0)
    raise(ErrorCode::Config, to_string(kind) + ": C10 must be positive");
  if (small_strain_moduli(*this).shear <= 0.0)
    raise(ErrorCode::Config, to_string(kind) + ": initial shear modulus must be positive");
  if (bulk_penalty <= 0.0)
    raise(ErrorCode::Config, to_string(kind) + ": bulk penalty must be positive");
  if (fitted_stretch_range && fitted_stretch_range->lo > fitted_stretch_range->hi)
    raise(ErrorCode::Config, "fitted stretch range is inverted");
}

HyperelasticModel make_yeoh(const std::vector<double>& coefficients, double bulk_multiplier) {
  HyperelasticModel m;
  switch (coefficients.size()) {
    case 1: m.kind = HyperelasticKind::Yeoh1; break;
    case 2: m.kind = HyperelasticKind::Yeoh2; break;
    case 3: m.kind = HyperelasticKind::Yeoh3; break;
    default:
      raise(ErrorCode::Config, "Yeoh order must be 1, 2 or 3");
  }
  m.coefficients = coefficients;
  m.bulk_penalty = bulk_multiplier * 2.0 * coefficients[0];
  m.validate();
  return m;
}

HyperelasticModel make_mooney_rivlin(double c10, double c01, double bulk_multiplier) {
  HyperelasticModel m;
  m.kind = HyperelasticKind::MooneyRivlin;
  m.coefficients = {c10, c01};
  m.bulk_penalty = bulk_multiplier * 2.0 * (c10 + c01);
  m.validate();
  return m;
}

HyperelasticModel ecoflex50_yeoh3() {
  HyperelasticModel m = make_yeoh({1.9e2, 9e-4, -4.75e-6});
  m.fitted_stretch_range = StretchRange{1.0, 9.0};
  return m;
}

void LinearElasticModel::validate() const {
  if (youngs_modulus <= 0.0)
    raise(ErrorCode::Config, "linear-elastic: Young's modulus must be positive");
  if (poisson_ratio <= -1.0 || poisson_ratio >= 0.5)
    raise(ErrorCode::Config, "linear-elastic: Poisson ratio must lie in (-1, 0.5)");
}

double LinearElasticModel::lame_lambda() const {
  return youngs_modulus * poisson_ratio /
         ((1.0 + poisson_ratio) * (1.0 - 2.0 * poisson_ratio));
}

double LinearElasticModel::lame_mu() const {
  return youngs_modulus / (2.0 * (1.0 + poisson_ratio));
}

namespace {

struct Invariants {
  double j;       // det F = sqrt(det C)
  double i1;      // tr C + 1
  double i2;      // tr C + J^2 (3D second invariant under plane strain)
  double i1_bar;  // J^{-2/3} I1
  double i2_bar;  // J^{-4/3} I2
  Mat2 c_inv;
};

Invariants invariants_of(const Mat2& C, const char* where) {
  const double det = C.determinant();
  if (!(det > 0.0) || !(C(0, 0) > 0.0))
    throw InvalidDeformation{where};
  Invariants iv;
  iv.j = std::sqrt(det);
  iv.i1 = C.trace() + 1.0;
  iv.i2 = C.trace() + det;
  iv.i1_bar = std::pow(iv.j, -2.0 / 3.0) * iv.i1;
  iv.i2_bar = std::pow(iv.j, -4.0 / 3.0) * iv.i2;
  iv.c_inv = C.inverse();
  return iv;
}

/// First and second derivatives of the deviatoric energy w.r.t. I1bar for the
/// Yeoh family; Mooney-Rivlin handles its I2bar term separately.
struct DevDerivs {
  double w = 0.0;
  double w1 = 0.0;
  double w11 = 0.0;
};

DevDerivs yeoh_derivs(const std::vector<double>& c, double i1_bar) {
  DevDerivs d;
  const double x = i1_bar - 3.0;
  for (std::size_t i = c.size(); i >= 1; --i) {
    const double n = static_cast<double>(i);
    d.w = d.w * x + c[i - 1];
    d.w1 = d.w1 * x + n * c[i - 1];
    if (i >= 2) d.w11 = d.w11 * x + n * (n - 1.0) * c[i - 1];
  }
  d.w *= x;
  return d;
}

}  // namespace

double strain_energy_from_C(const HyperelasticModel& model, const Mat2& C) {
  const Invariants iv = invariants_of(C, "strain_energy");
  double w_dev = 0.0;
  if (model.kind == HyperelasticKind::MooneyRivlin) {
    w_dev = model.coefficients[0] * (iv.i1_bar - 3.0) +
            model.coefficients[1] * (iv.i2_bar - 3.0);
  } else {
    w_dev = yeoh_derivs(model.coefficients, iv.i1_bar).w;
  }
  const double jm1 = iv.j - 1.0;
  return w_dev + 0.5 * model.bulk_penalty * jm1 * jm1;
}

double strain_energy(const HyperelasticModel& model, const Mat2& F) {
  if (!(F.determinant() > 0.0)) throw InvalidDeformation{"strain_energy"};
  return strain_energy_from_C(model, F.transpose() * F);
}

StressTangent pk2_stress_and_tangent(const HyperelasticModel& model, const Mat2& C) {
  if (std::abs(C(0, 1) - C(1, 0)) > 1e-12 * (1.0 + C.norm()))
    throw InvalidDeformation{"pk2: C not symmetric"};
  const Invariants iv = invariants_of(C, "pk2");
  const Mat2 I = Mat2::Identity();
  const Mat2& Ci = iv.c_inv;
  const double K = model.bulk_penalty;
  const double j = iv.j;
  const double jm23 = std::pow(j, -2.0 / 3.0);

  // dI1bar/dC and its derivative.
  const Mat2 A = jm23 * I - (iv.i1_bar / 3.0) * Ci;
  Tensor4 dA = outer(I, Ci);
  dA += outer(Ci, I);
  dA *= -jm23 / 3.0;
  dA += scaled(outer(Ci, Ci), iv.i1_bar / 9.0);
  dA += scaled(sym_identity(Ci), iv.i1_bar / 3.0);

  StressTangent out;
  out.energy = strain_energy_from_C(model, C);

  if (model.kind == HyperelasticKind::MooneyRivlin) {
    const double c10 = model.coefficients[0];
    const double c01 = model.coefficients[1];
    const double jm43 = std::pow(j, -4.0 / 3.0);
    const double j23 = std::pow(j, 2.0 / 3.0);
    const double beta = j23 - (2.0 / 3.0) * iv.i2_bar;
    const Mat2 B = jm43 * I + beta * Ci;

    Tensor4 dB = outer(I, Ci);
    dB += outer(Ci, I);
    dB *= -2.0 / 3.0 * jm43;
    dB += scaled(outer(Ci, Ci), j23 / 3.0 - (2.0 / 3.0) * beta);
    dB += scaled(sym_identity(Ci), -beta);

    out.stress = 2.0 * (c10 * A + c01 * B);
    out.tangent = scaled(dA, 4.0 * c10);
    out.tangent += scaled(dB, 4.0 * c01);
    out.s33 = 2.0 * (c10 * jm23 * (1.0 - iv.i1 / 3.0) +
                     c01 * jm43 * ((iv.i1 - 1.0) - (2.0 / 3.0) * iv.i2));
  } else {
    const DevDerivs d = yeoh_derivs(model.coefficients, iv.i1_bar);
    out.stress = 2.0 * d.w1 * A;
    out.tangent = scaled(outer(A, A), 4.0 * d.w11);
    out.tangent += scaled(dA, 4.0 * d.w1);
    out.s33 = 2.0 * d.w1 * jm23 * (1.0 - iv.i1 / 3.0);
  }

  // Volumetric penalty, shared by every kind.
  out.stress += K * (j * j - j) * Ci;
  out.tangent += scaled(outer(Ci, Ci), K * (2.0 * j * j - j));
  out.tangent += scaled(sym_identity(Ci), -2.0 * K * (j * j - j));
  out.s33 += K * (j - 1.0) * j;
  return out;
}

StressTangent svk_stress_and_tangent(const LinearElasticModel& model, const Mat2& C) {
  const Mat2 I = Mat2::Identity();
  const Mat2 E = 0.5 * (C - I);
  const double la = model.lame_lambda();
  const double mu = model.lame_mu();
  const double tr_e = E.trace();

  StressTangent out;
  out.stress = la * tr_e * I + 2.0 * mu * E;
  out.tangent = outer(I, I);
  out.tangent *= la;
  out.tangent += scaled(sym_identity(I), 2.0 * mu);
  out.energy = 0.5 * la * tr_e * tr_e + mu * (E * E).trace();
  out.s33 = la * tr_e;  // E33 = 0 under plane strain
  return out;
}

double deviatoric_dW_dI1(const HyperelasticModel& model, double i1) {
  if (model.kind == HyperelasticKind::MooneyRivlin) return model.coefficients[0];
  return yeoh_derivs(model.coefficients, i1).w1;
}

double uniaxial_nominal_stress(const HyperelasticModel& model, double lambda) {
  if (!(lambda > 0.0))
    raise(ErrorCode::InvalidArgument, "uniaxial stretch must be positive");
  const double i1 = lambda * lambda + 2.0 / lambda;
  const double geom = 2.0 * (lambda - 1.0 / (lambda * lambda));
  if (model.kind == HyperelasticKind::MooneyRivlin)
    return geom * (model.coefficients[0] + model.coefficients[1] / lambda);
  return geom * deviatoric_dW_dI1(model, i1);
}

SmallStrainModuli small_strain_moduli(const HyperelasticModel& model) {
  double mu = 2.0 * model.coefficients[0];
  if (model.kind == HyperelasticKind::MooneyRivlin)
    mu = 2.0 * (model.coefficients[0] + model.coefficients[1]);
  return {mu, model.bulk_penalty};
}

}  // namespace pneusim
