// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Core>
#include <Eigen/Dense>
#include <array>

namespace pneusim {

using Vec2 = Eigen::Vector2d;
using Mat2 = Eigen::Matrix2d;
using VecX = Eigen::VectorXd;
using MatX = Eigen::MatrixXd;

/// Fourth-order tensor on 2x2 symmetric arguments, stored dense (16 doubles).
/// Used for material tangents dS/dC with both minor and major symmetry.
struct Tensor4 {
  std::array<double, 16> v{};

  double& operator()(int i, int j, int k, int l) {
    return v[static_cast<std::size_t>(((i * 2 + j) * 2 + k) * 2 + l)];
  }
  double operator()(int i, int j, int k, int l) const {
    return v[static_cast<std::size_t>(((i * 2 + j) * 2 + k) * 2 + l)];
  }

  Tensor4& operator+=(const Tensor4& o) {
    for (std::size_t n = 0; n < v.size(); ++n) v[n] += o.v[n];
    return *this;
  }
  Tensor4& operator*=(double s) {
    for (double& x : v) x *= s;
    return *this;
  }
};

/// a ⊗ b, i.e. T_ijkl = a_ij b_kl.
inline Tensor4 outer(const Mat2& a, const Mat2& b) {
  Tensor4 t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l) t(i, j, k, l) = a(i, j) * b(k, l);
  return t;
}

/// Symmetrized identity built from a symmetric matrix m:
/// T_ijkl = (m_ik m_jl + m_il m_jk) / 2. With m = C^{-1} this is -dC^{-1}/dC.
inline Tensor4 sym_identity(const Mat2& m) {
  Tensor4 t;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int l = 0; l < 2; ++l)
          t(i, j, k, l) = 0.5 * (m(i, k) * m(j, l) + m(i, l) * m(j, k));
  return t;
}

inline Tensor4 scaled(Tensor4 t, double s) {
  t *= s;
  return t;
}

}  // namespace pneusim
