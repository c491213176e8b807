// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/matfit.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "core/csvio.hpp"
#include "core/error.hpp"
#include "core/units.hpp"

namespace pneusim {

void UniaxialDataset::validate(int order) const {
  if (order < 1 || order > 3) raise(ErrorCode::Fit, "Yeoh fit order must be 1, 2 or 3");
  const std::size_t needed = std::max<std::size_t>(4, static_cast<std::size_t>(order) + 1);
  if (samples.size() < needed)
    raise(ErrorCode::Fit, "dataset '" + label + "' has " + std::to_string(samples.size()) +
                              " samples, need at least " + std::to_string(needed));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    if (!(samples[i].stretch > 0.0))
      raise(ErrorCode::Fit, "dataset '" + label + "': stretches must be positive");
    if (i > 0 && !(samples[i].stretch > samples[i - 1].stretch))
      raise(ErrorCode::Fit, "dataset '" + label + "': stretches must be strictly increasing");
  }
}

UniaxialDataset read_uniaxial_csv(const std::filesystem::path& path) {
  const CsvTable table = read_csv(path);
  if (table.header.size() != 2 || table.header[0] != "stretch" ||
      table.header[1].rfind("nominal_stress_", 0) != 0)
    raise(ErrorCode::Fit,
          path.string() + ": expected header 'stretch,nominal_stress_<unit>'");
  const double to_kpa = pressure_unit_to_kpa(table.header[1].substr(15));
  UniaxialDataset data;
  data.label = path.filename().string();
  for (const auto& row : table.rows)
    data.samples.push_back({row[0], row[1] * to_kpa});
  return data;
}

namespace {

/// Regressor row for P(lambda): P = sum_i c_i * phi_i(lambda).
void regressor_row(double lambda, int order, double* phi) {
  const double i1 = lambda * lambda + 2.0 / lambda;
  const double x = i1 - 3.0;
  const double geom = 2.0 * (lambda - 1.0 / (lambda * lambda));
  phi[0] = geom;
  if (order >= 2) phi[1] = geom * 2.0 * x;
  if (order >= 3) phi[2] = geom * 3.0 * x * x;
}

}  // namespace

FitResult fit_yeoh(const UniaxialDataset& data, int order, double bulk_multiplier) {
  data.validate(order);
  const int m = static_cast<int>(data.samples.size());

  MatX A(m, order);
  VecX b(m);
  double max_stress = 0.0;
  for (int i = 0; i < m; ++i) {
    double phi[3] = {0, 0, 0};
    regressor_row(data.samples[static_cast<std::size_t>(i)].stretch, order, phi);
    for (int j = 0; j < order; ++j) A(i, j) = phi[j];
    b(i) = data.samples[static_cast<std::size_t>(i)].nominal_stress;
    max_stress = std::max(max_stress, std::abs(b(i)));
  }

  // Column scaling keeps the higher-order columns (which grow like x^2)
  // from swamping the conditioning; one refinement step recovers the last
  // digits on noiseless in-class data.
  VecX colnorm(order);
  for (int j = 0; j < order; ++j) {
    colnorm(j) = A.col(j).norm();
    if (!(colnorm(j) > 0.0)) raise(ErrorCode::Fit, "degenerate regressor column");
  }
  MatX As = A * colnorm.cwiseInverse().asDiagonal();

  Eigen::JacobiSVD<MatX> svd(As, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double smax = svd.singularValues()(0);
  const double smin = svd.singularValues()(order - 1);
  if (!(smin > smax * 1e-12))
    raise(ErrorCode::Fit, "rank-deficient regressor (stretch samples too clustered)");

  VecX cs = svd.solve(b);
  cs += svd.solve(b - As * cs);  // iterative refinement
  VecX coeffs = colnorm.cwiseInverse().asDiagonal() * cs;

  FitDiagnostics diag;
  diag.condition_estimate = smax / smin;
  diag.rms_residual = std::sqrt((A * coeffs - b).squaredNorm() / m);
  diag.rms_residual_rel = max_stress > 0.0 ? diag.rms_residual / max_stress : 0.0;

  if (coeffs(0) <= 0.0) {
    std::ostringstream msg;
    msg << "unstable fit: C10 = " << coeffs(0) << " <= 0 (rms residual " << diag.rms_residual
        << " kPa, condition " << diag.condition_estimate << ")";
    raise(ErrorCode::Fit, msg.str());
  }

  HyperelasticModel model =
      make_yeoh(std::vector<double>(coeffs.data(), coeffs.data() + order), bulk_multiplier);
  model.fitted_stretch_range =
      StretchRange{data.samples.front().stretch, data.samples.back().stretch};

  // Sampled Drucker-type check: tension response must be monotone within
  // the fitted range.
  const double lo = std::max(1.0, model.fitted_stretch_range->lo);
  const double hi = model.fitted_stretch_range->hi;
  if (hi > lo) {
    double prev = uniaxial_nominal_stress(model, lo);
    for (int k = 1; k <= 200; ++k) {
      const double lam = lo + (hi - lo) * k / 200.0;
      const double p = uniaxial_nominal_stress(model, lam);
      if (p <= prev) {
        diag.monotone_over_range = false;
        break;
      }
      prev = p;
    }
  }
  if (!diag.monotone_over_range) {
    std::ostringstream msg;
    msg << "unstable fit: dP/dlambda loses positivity inside the fitted range ["
        << lo << ", " << hi << "] (condition " << diag.condition_estimate << ")";
    raise(ErrorCode::Fit, msg.str());
  }

  return {std::move(model), diag};
}

std::vector<std::string> validity_check(const HyperelasticModel& model, double query_lo,
                                        double query_hi) {
  if (!model.fitted_stretch_range)
    raise(ErrorCode::InvalidArgument, "model has no fitted stretch range recorded");
  if (query_lo > query_hi) std::swap(query_lo, query_hi);
  std::vector<std::string> warnings;
  const StretchRange r = *model.fitted_stretch_range;
  std::ostringstream msg;
  if (query_lo < r.lo) {
    msg << "query stretch " << query_lo << " is below the fitted range [" << r.lo << ", "
        << r.hi << "]; extrapolated response is unreliable";
    warnings.push_back(msg.str());
    msg.str("");
  }
  if (query_hi > r.hi) {
    msg << "query stretch " << query_hi << " is above the fitted range [" << r.lo << ", "
        << r.hi << "]; extrapolated response is unreliable";
    warnings.push_back(msg.str());
  }
  return warnings;
}

}  // namespace pneusim
