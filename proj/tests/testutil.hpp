// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <functional>
#include <random>
#include <string>

#include "core/linalg.hpp"

namespace pneusim::testutil {

/// Central finite difference of a scalar energy w.r.t. the symmetric tensor C,
/// in the S = 2 dW/dC convention: diagonal entries need the factor 2, an
/// off-diagonal perturbation moves both symmetric entries at once.
inline Mat2 fd_pk2(const std::function<double(const Mat2&)>& energy, const Mat2& c, double h) {
  Mat2 s;
  for (int i = 0; i < 2; ++i) {
    for (int j = i; j < 2; ++j) {
      Mat2 dp = Mat2::Zero();
      dp(i, j) = h;
      dp(j, i) = h;
      const double wp = energy(c + dp);
      const double wm = energy(c - dp);
      const double deriv = (wp - wm) / (2.0 * h);
      s(i, j) = (i == j) ? 2.0 * deriv : deriv;
      s(j, i) = s(i, j);
    }
  }
  return s;
}

/// Central finite difference of the PK2 stress, in the C4 = 2 dS/dC
/// convention (same symmetric-perturbation bookkeeping as fd_pk2).
inline Tensor4 fd_tangent(const std::function<Mat2(const Mat2&)>& stress, const Mat2& c,
                          double h) {
  Tensor4 t;
  for (int k = 0; k < 2; ++k) {
    for (int l = k; l < 2; ++l) {
      Mat2 dp = Mat2::Zero();
      dp(k, l) = h;
      dp(l, k) = h;
      const Mat2 sp = stress(c + dp);
      const Mat2 sm = stress(c - dp);
      const Mat2 d = (sp - sm) / (2.0 * h);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
          const double v = (k == l) ? 2.0 * d(i, j) : d(i, j);
          t(i, j, k, l) = v;
          t(i, j, l, k) = v;
        }
    }
  }
  return t;
}

inline double rel_err(double got, double want, double floor = 1e-12) {
  return std::abs(got - want) / std::max(std::abs(want), floor);
}

inline double tensor_rel_err(const Tensor4& a, const Tensor4& b, double floor) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.v.size(); ++i) {
    num += (a.v[i] - b.v[i]) * (a.v[i] - b.v[i]);
    den += b.v[i] * b.v[i];
  }
  return std::sqrt(num) / std::max(std::sqrt(den), floor);
}

/// Random plane-strain deformation gradient with entries in [-2, 2] and
/// det F restricted to [lo, hi] (rejection sampling, deterministic engine).
inline Mat2 random_gradient(std::mt19937_64& rng, double det_lo = 0.9, double det_hi = 1.1) {
  std::uniform_real_distribution<double> entry(-2.0, 2.0);
  while (true) {
    Mat2 f;
    f << entry(rng), entry(rng), entry(rng), entry(rng);
    const double det = f.determinant();
    if (det >= det_lo && det <= det_hi) return f;
  }
}

/// Unique scratch directory under the system temp path; removed on request
/// by the caller (tests leave artifacts behind for debugging on failure).
inline std::filesystem::path scratch_dir(const std::string& tag) {
  static int counter = 0;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("pneusim_test_" + tag + "_" + std::to_string(++counter) + "_" +
                    std::to_string(static_cast<unsigned>(::getpid())));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace pneusim::testutil
