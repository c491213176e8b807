// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/fem.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

#include "core/csvio.hpp"
#include "core/error.hpp"
#include "core/units.hpp"

namespace pneusim {

void RegionMaterials::validate() const {
  body.validate();
  sealing.validate();
  walls.validate();
  limiting.validate();
}

StressTangent RegionMaterials::evaluate(const RegionTag& tag, const Mat2& C) const {
  switch (tag.kind) {
    case RegionKind::Body: return pk2_stress_and_tangent(body, C);
    case RegionKind::Sealing: return pk2_stress_and_tangent(sealing, C);
    case RegionKind::InteriorWall: return pk2_stress_and_tangent(walls, C);
    case RegionKind::Limiting: return svk_stress_and_tangent(limiting, C);
  }
  raise(ErrorCode::Internal, "unhandled region kind");
}

FemProblem make_pneunet_problem(const Mesh& mesh, RegionMaterials materials) {
  FemProblem p;
  p.mesh = &mesh;
  p.materials = std::move(materials);
  for (int n : mesh.fixed_end) {
    p.fixed_dofs.emplace_back(n, 0);
    p.fixed_dofs.emplace_back(n, 1);
  }
  p.pressure_edges = mesh.pressure_edges;
  return p;
}

std::vector<Edge3> outline_edges_where(const Mesh& mesh,
                                       const std::function<bool(const Vec2&)>& pred) {
  std::vector<Edge3> out;
  for (const Edge3& e : mesh.outline_edges) {
    const Vec2 mid = 0.5 * (mesh.nodes[static_cast<std::size_t>(e.a)] +
                            mesh.nodes[static_cast<std::size_t>(e.b)]);
    if (pred(mid)) out.push_back(e);
  }
  return out;
}

FemState initial_state(const FemProblem& problem) {
  FemState s;
  s.displacement = VecX::Zero(2 * problem.mesh->node_count());
  return s;
}

namespace {

// 6-point degree-4 rule on the reference triangle (weights sum to 1/2).
struct QuadPoint {
  double xi, eta, w;
};

constexpr double kQa1 = 0.445948490915965;
constexpr double kQw1 = 0.223381589678011 * 0.5;
constexpr double kQa2 = 0.091576213509771;
constexpr double kQw2 = 0.109951743655322 * 0.5;

constexpr std::array<QuadPoint, 6> kTriQuad = {{
    {kQa1, kQa1, kQw1},
    {1.0 - 2.0 * kQa1, kQa1, kQw1},
    {kQa1, 1.0 - 2.0 * kQa1, kQw1},
    {kQa2, kQa2, kQw2},
    {1.0 - 2.0 * kQa2, kQa2, kQw2},
    {kQa2, 1.0 - 2.0 * kQa2, kQw2},
}};

/// dN/d(xi,eta) of the 6 quadratic shape functions at (xi, eta).
std::array<Vec2, 6> tri6_grad_ref(double xi, double eta) {
  const double l1 = 1.0 - xi - eta;
  return {Vec2(-(4.0 * l1 - 1.0), -(4.0 * l1 - 1.0)),
          Vec2(4.0 * xi - 1.0, 0.0),
          Vec2(0.0, 4.0 * eta - 1.0),
          Vec2(4.0 * (l1 - xi), -4.0 * xi),
          Vec2(4.0 * eta, 4.0 * xi),
          Vec2(-4.0 * eta, 4.0 * (l1 - eta))};
}

/// Per-element reference data; the geometric map of straight-sided TRI6 with
/// midside nodes at edge midpoints is affine, so one Jacobian serves all
/// quadrature points.
struct ElementGeometry {
  Mat2 jac_inv_t;  // J0^{-T}
  double det_j = 0.0;
};

ElementGeometry element_geometry(const Mesh& mesh, int e) {
  const Tri6& t = mesh.elements[static_cast<std::size_t>(e)];
  const Vec2& x0 = mesh.nodes[static_cast<std::size_t>(t.n[0])];
  const Vec2& x1 = mesh.nodes[static_cast<std::size_t>(t.n[1])];
  const Vec2& x2 = mesh.nodes[static_cast<std::size_t>(t.n[2])];
  Mat2 j0;
  j0.col(0) = x1 - x0;
  j0.col(1) = x2 - x0;
  ElementGeometry g;
  g.det_j = j0.determinant();
  if (!(g.det_j > 0.0)) raise(ErrorCode::Internal, "element with non-positive Jacobian");
  g.jac_inv_t = j0.inverse().transpose();
  return g;
}

Mat2 deformation_gradient(const VecX& u, const Tri6& t, const std::array<Vec2, 6>& grad_x) {
  Mat2 f = Mat2::Identity();
  for (int a = 0; a < 6; ++a) {
    const int n = t.n[static_cast<std::size_t>(a)];
    f(0, 0) += u(2 * n) * grad_x[static_cast<std::size_t>(a)](0);
    f(0, 1) += u(2 * n) * grad_x[static_cast<std::size_t>(a)](1);
    f(1, 0) += u(2 * n + 1) * grad_x[static_cast<std::size_t>(a)](0);
    f(1, 1) += u(2 * n + 1) * grad_x[static_cast<std::size_t>(a)](1);
  }
  return f;
}

/// Follower pressure: the edge traction is -p n ds on the deformed edge; with
/// the length-weighted normal (g_z, -g_y) the line Jacobian cancels.
void add_pressure_force(const Mesh& mesh, const std::vector<Edge3>& edges, const VecX& u,
                        double pressure, VecX& f_ext) {
  if (pressure == 0.0 || edges.empty()) return;
  constexpr double kS[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  constexpr double kW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (const Edge3& e : edges) {
    const int ids[3] = {e.a, e.b, e.mid};
    Vec2 x[3];
    for (int k = 0; k < 3; ++k)
      x[k] = mesh.nodes[static_cast<std::size_t>(ids[k])] +
             Vec2(u(2 * ids[k]), u(2 * ids[k] + 1));
    for (int q = 0; q < 3; ++q) {
      const double s = kS[q];
      const double shp[3] = {0.5 * s * (s - 1.0), 0.5 * s * (s + 1.0), 1.0 - s * s};
      const double dshp[3] = {s - 0.5, s + 0.5, -2.0 * s};
      const Vec2 g = dshp[0] * x[0] + dshp[1] * x[1] + dshp[2] * x[2];
      const Vec2 normal(g(1), -g(0));  // outward from the solid
      for (int k = 0; k < 3; ++k) {
        const Vec2 contrib = -pressure * shp[k] * kW[q] * normal;
        f_ext(2 * ids[k]) += contrib(0);
        f_ext(2 * ids[k] + 1) += contrib(1);
      }
    }
  }
}

struct DofMap {
  std::vector<int> free_index;  // dof -> free id or -1
  int n_free = 0;
};


DofMap build_dof_map(const FemProblem& problem) {
  DofMap map;
  map.free_index.assign(static_cast<std::size_t>(2 * problem.mesh->node_count()), 0);
  for (const auto& [node, comp] : problem.fixed_dofs)
    map.free_index[static_cast<std::size_t>(2 * node + comp)] = -1;
  for (int d = 0; d < 2 * problem.mesh->node_count(); ++d)
    if (map.free_index[static_cast<std::size_t>(d)] == 0)
      map.free_index[static_cast<std::size_t>(d)] = map.n_free++;
    else
      map.free_index[static_cast<std::size_t>(d)] = -1;
  return map;
}

double free_norm(const VecX& v, const DofMap& map) {
  double s = 0.0;
  for (std::size_t d = 0; d < map.free_index.size(); ++d)
    if (map.free_index[d] >= 0) s += v(static_cast<Eigen::Index>(d)) * v(static_cast<Eigen::Index>(d));
  return std::sqrt(s);
}

}  // namespace

VecX internal_force(const FemProblem& problem, const VecX& u) {
  const Mesh& mesh = *problem.mesh;
  VecX f = VecX::Zero(2 * mesh.node_count());
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Tri6& t = mesh.elements[static_cast<std::size_t>(e)];
    const ElementGeometry geo = element_geometry(mesh, e);
    for (const QuadPoint& qp : kTriQuad) {
      const auto grad_ref = tri6_grad_ref(qp.xi, qp.eta);
      std::array<Vec2, 6> grad_x;
      for (int a = 0; a < 6; ++a) grad_x[static_cast<std::size_t>(a)] = geo.jac_inv_t * grad_ref[static_cast<std::size_t>(a)];
      const Mat2 f_def = deformation_gradient(u, t, grad_x);
      if (!(f_def.determinant() > 0.0)) throw InvalidDeformation{"internal_force"};
      const StressTangent mat =
          problem.materials.evaluate(mesh.region[static_cast<std::size_t>(e)], f_def.transpose() * f_def);
      const Mat2 pk1 = f_def * mat.stress;
      const double w = qp.w * geo.det_j;
      for (int a = 0; a < 6; ++a) {
        const int n = t.n[static_cast<std::size_t>(a)];
        const Vec2 fa = w * (pk1 * grad_x[static_cast<std::size_t>(a)]);
        f(2 * n) += fa(0);
        f(2 * n + 1) += fa(1);
      }
    }
  }
  return f;
}

namespace {

/// Residual and, optionally, the tangent restricted to free dofs.
Assembled assemble_impl(const FemProblem& problem, const VecX& u, double pressure,
                        bool with_tangent) {
  const Mesh& mesh = *problem.mesh;
  const DofMap map = build_dof_map(problem);

  VecX f_int = VecX::Zero(2 * mesh.node_count());
  VecX f_abs = VecX::Zero(2 * mesh.node_count());
  VecX f_ext = VecX::Zero(2 * mesh.node_count());
  add_pressure_force(mesh, problem.pressure_edges, u, pressure, f_ext);

  std::vector<Eigen::Triplet<double>> triplets;
  if (with_tangent) triplets.reserve(static_cast<std::size_t>(mesh.element_count()) * 144);

  for (int e = 0; e < mesh.element_count(); ++e) {
    const Tri6& t = mesh.elements[static_cast<std::size_t>(e)];
    const ElementGeometry geo = element_geometry(mesh, e);
    double ke[12][12] = {};
    for (const QuadPoint& qp : kTriQuad) {
      const auto grad_ref = tri6_grad_ref(qp.xi, qp.eta);
      std::array<Vec2, 6> grad_x;
      for (int a = 0; a < 6; ++a)
        grad_x[static_cast<std::size_t>(a)] = geo.jac_inv_t * grad_ref[static_cast<std::size_t>(a)];
      const Mat2 f_def = deformation_gradient(u, t, grad_x);
      if (!(f_def.determinant() > 0.0)) throw InvalidDeformation{"assemble"};
      const StressTangent mat =
          problem.materials.evaluate(mesh.region[static_cast<std::size_t>(e)], f_def.transpose() * f_def);
      const Mat2 pk1 = f_def * mat.stress;
      const double w = qp.w * geo.det_j;

      for (int a = 0; a < 6; ++a) {
        const int n = t.n[static_cast<std::size_t>(a)];
        const Vec2 fa = w * (pk1 * grad_x[static_cast<std::size_t>(a)]);
        f_int(2 * n) += fa(0);
        f_int(2 * n + 1) += fa(1);
        f_abs(2 * n) += std::abs(fa(0));
        f_abs(2 * n + 1) += std::abs(fa(1));
      }
      if (!with_tangent) continue;

      // Material part F C F contracted with shape gradients, plus the
      // geometric (initial-stress) part on the diagonal of each 2x2 block.
      for (int a = 0; a < 6; ++a) {
        const Vec2& ga = grad_x[static_cast<std::size_t>(a)];
        for (int b = 0; b < 6; ++b) {
          const Vec2& gb = grad_x[static_cast<std::size_t>(b)];
          const double geo_term = ga.dot(mat.stress * gb);
          for (int i = 0; i < 2; ++i) {
            for (int k = 0; k < 2; ++k) {
              double s = 0.0;
              for (int bi = 0; bi < 2; ++bi)
                for (int bj = 0; bj < 2; ++bj)
                  for (int bk = 0; bk < 2; ++bk)
                    for (int bl = 0; bl < 2; ++bl)
                      s += f_def(i, bi) * ga(bj) * mat.tangent(bi, bj, bk, bl) *
                           f_def(k, bk) * gb(bl);
              ke[2 * a + i][2 * b + k] += w * (s + (i == k ? geo_term : 0.0));
            }
          }
        }
      }
    }
    if (with_tangent) {
      for (int a = 0; a < 6; ++a)
        for (int i = 0; i < 2; ++i) {
          const int p = map.free_index[static_cast<std::size_t>(2 * t.n[static_cast<std::size_t>(a)] + i)];
          if (p < 0) continue;
          for (int b = 0; b < 6; ++b)
            for (int k = 0; k < 2; ++k) {
              const int q = map.free_index[static_cast<std::size_t>(2 * t.n[static_cast<std::size_t>(b)] + k)];
              if (q < 0) continue;
              triplets.emplace_back(p, q, ke[2 * a + i][2 * b + k]);
            }
        }
    }
  }

  // Follower-load stiffness: the pressure resultant rotates with the edge,
  // d(n~)/dx_b = M'_b * [[0,1],[-1,0]], so dr/du picks up +p * M_a M'_b Rot.
  // Nonsymmetric, which the sparse LU downstream accepts.
  if (with_tangent && pressure != 0.0) {
    constexpr double kS[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    constexpr double kW[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    for (const Edge3& e : problem.pressure_edges) {
      const int ids[3] = {e.a, e.b, e.mid};
      for (int q = 0; q < 3; ++q) {
        const double s = kS[q];
        const double shp[3] = {0.5 * s * (s - 1.0), 0.5 * s * (s + 1.0), 1.0 - s * s};
        const double dshp[3] = {s - 0.5, s + 0.5, -2.0 * s};
        for (int a = 0; a < 3; ++a) {
          for (int b = 0; b < 3; ++b) {
            const double coef = pressure * kW[q] * shp[a] * dshp[b];
            // Rot(0,1) = 1, Rot(1,0) = -1.
            const int pa0 = map.free_index[static_cast<std::size_t>(2 * ids[a])];
            const int pa1 = map.free_index[static_cast<std::size_t>(2 * ids[a] + 1)];
            const int qb0 = map.free_index[static_cast<std::size_t>(2 * ids[b])];
            const int qb1 = map.free_index[static_cast<std::size_t>(2 * ids[b] + 1)];
            if (pa0 >= 0 && qb1 >= 0) triplets.emplace_back(pa0, qb1, coef);
            if (pa1 >= 0 && qb0 >= 0) triplets.emplace_back(pa1, qb0, -coef);
          }
        }
      }
    }
  }

  Assembled out;
  out.residual = f_int - f_ext;
  for (const auto& [node, comp] : problem.fixed_dofs) out.residual(2 * node + comp) = 0.0;
  out.residual_free_norm = free_norm(out.residual, map);
  out.external_free_norm = free_norm(f_ext, map);
  out.force_magnitude = free_norm(f_abs, map);
  if (with_tangent) {
    out.tangent.resize(map.n_free, map.n_free);
    out.tangent.setFromTriplets(triplets.begin(), triplets.end());
  }
  return out;
}

}  // namespace

Assembled assemble(const FemProblem& problem, const VecX& u, double pressure) {
  return assemble_impl(problem, u, pressure, true);
}

NewtonReport newton_solve(const FemProblem& problem, FemState& state, double pressure,
                          const NewtonOptions& opts) {
  const DofMap map = build_dof_map(problem);
  NewtonReport report;
  VecX u = state.displacement;

  const auto residual_only = [&](const VecX& ut, double& norm) -> bool {
    try {
      const Assembled a = assemble_impl(problem, ut, pressure, false);
      norm = a.residual_free_norm;
      return true;
    } catch (const InvalidDeformation&) {
      return false;
    }
  };

  double r_norm = 0.0;
  if (!residual_only(u, r_norm)) {
    // Starting point already inverted (bad predictor): report nonconvergence.
    state.converged = false;
    return report;
  }

  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  for (int it = 0; it < opts.max_iterations; ++it) {
    Assembled sys;
    try {
      sys = assemble_impl(problem, u, pressure, true);
    } catch (const InvalidDeformation&) {
      state.converged = false;
      return report;
    }
    r_norm = sys.residual_free_norm;
    report.residual_history.push_back(r_norm);
    // Relative to the load, but never below what cancellation noise in the
    // force sums allows the residual to reach.
    const double tol =
        std::max(opts.relative_tolerance * std::max(sys.external_free_norm, opts.absolute_floor),
                 1e-12 * sys.force_magnitude);
    if (r_norm < tol) {
      state.displacement = u;
      state.pressure = pressure;
      state.converged = true;
      state.residual_norm = r_norm;
      report.converged = true;
      report.iterations = it;
      return report;
    }

    VecX r_free(map.n_free);
    for (std::size_t d = 0; d < map.free_index.size(); ++d)
      if (map.free_index[d] >= 0)
        r_free(map.free_index[d]) = sys.residual(static_cast<Eigen::Index>(d));

    lu.compute(sys.tangent);
    if (lu.info() != Eigen::Success) {
      state.converged = false;
      return report;
    }
    const VecX step_free = lu.solve(-r_free);

    VecX step = VecX::Zero(u.size());
    for (std::size_t d = 0; d < map.free_index.size(); ++d)
      if (map.free_index[d] >= 0)
        step(static_cast<Eigen::Index>(d)) = step_free(map.free_index[d]);

    // Backtracking: halve until the residual norm decreases (or drops
    // straight below tolerance).
    double alpha = 1.0;
    bool accepted = false;
    for (int bt = 0; bt <= opts.max_backtracks; ++bt) {
      double trial_norm = 0.0;
      const VecX u_try = u + alpha * step;
      if (residual_only(u_try, trial_norm) && (trial_norm < r_norm || trial_norm < tol)) {
        u = u_try;
        r_norm = trial_norm;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      state.displacement = u;
      state.residual_norm = r_norm;
      // A stall at the cancellation/conditioning noise floor of the force
      // sums is as converged as this system can get.
      state.converged = r_norm < 1e-10 * sys.force_magnitude;
      report.converged = state.converged;
      if (state.converged) {
        state.pressure = pressure;
        report.iterations = it;
      }
      return report;
    }
  }
  state.displacement = u;
  state.converged = false;
  state.residual_norm = r_norm;
  return report;
}

bool StaticCurve::covers(double pressure) const {
  return !samples.empty() && pressure >= samples.front().pressure - 1e-9 &&
         pressure <= samples.back().pressure + 1e-9;
}

namespace {

double interp_curve(const std::vector<CurveSample>& samples, double p,
                    double (*pick)(const CurveSample&)) {
  if (samples.empty()) raise(ErrorCode::InvalidArgument, "empty static curve");
  if (p <= samples.front().pressure) return pick(samples.front());
  if (p >= samples.back().pressure) return pick(samples.back());
  for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
    if (p <= samples[i + 1].pressure) {
      const double t =
          (p - samples[i].pressure) / (samples[i + 1].pressure - samples[i].pressure);
      return (1.0 - t) * pick(samples[i]) + t * pick(samples[i + 1]);
    }
  }
  return pick(samples.back());
}

}  // namespace

double StaticCurve::angle_at(double pressure) const {
  if (!covers(pressure))
    raise(ErrorCode::InvalidArgument, "pressure " + format_double(pressure) +
                                          " kPa is outside the static curve range");
  return interp_curve(samples, pressure, [](const CurveSample& s) { return s.angle_deg; });
}

double StaticCurve::max_vm_at(double pressure) const {
  if (!covers(pressure))
    raise(ErrorCode::InvalidArgument, "pressure outside the static curve range");
  return interp_curve(samples, pressure, [](const CurveSample& s) { return s.max_vm; });
}

const CurveSample& StaticCurve::sample_at(double pressure) const {
  for (const CurveSample& s : samples)
    if (std::abs(s.pressure - pressure) < 1e-6) return s;
  raise(ErrorCode::InvalidArgument,
        "no curve sample at " + format_double(pressure) + " kPa");
}

void StaticCurve::validate() const {
  if (samples.empty()) raise(ErrorCode::Internal, "static curve has no samples");
  for (std::size_t i = 0; i + 1 < samples.size(); ++i)
    if (!(samples[i + 1].pressure > samples[i].pressure))
      raise(ErrorCode::Internal, "static curve pressures are not strictly increasing");
  if (samples.front().pressure == 0.0 && std::abs(samples.front().angle_deg) > 1e-9)
    raise(ErrorCode::Internal, "static curve angle at zero pressure is nonzero");
}

StaticCurve ramp_solve(const FemProblem& problem, double p_max, const RampOptions& opts) {
  FemState state;
  return ramp_solve(problem, p_max, opts, state);
}

namespace {

/// Cold starts stall when the constitutive stiffness spans many decades: a
/// bending-mode Newton step carries second-order membrane/volumetric errors
/// of order (E_limiting + K) |du|^2 that swamp the load, and the line search
/// collapses. Walking the stiff moduli (volumetric penalty and the
/// limiting-layer modulus) up from soft values, re-solving from each
/// converged state, sidesteps that.
bool solve_with_stiffness_continuation(const FemProblem& problem, FemState& state,
                                       double pressure, const NewtonOptions& opts) {
  FemState work = state;
  for (int stage = 6; stage >= 0; --stage) {
    const double factor = 1.0 / static_cast<double>(1 << (2 * stage));  // 4^-stage
    FemProblem softened = problem;
    for (HyperelasticModel* m :
         {&softened.materials.body, &softened.materials.sealing, &softened.materials.walls})
      m->bulk_penalty *= factor;
    softened.materials.limiting.youngs_modulus *= factor;
    // The damped phase advances slowly but monotonically through the soft
    // near-mechanism zone, so the stages get a deep iteration budget.
    NewtonOptions stage_opts = opts;
    stage_opts.max_iterations = std::max(250, opts.max_iterations);
    stage_opts.max_backtracks = std::max(16, opts.max_backtracks);
    if (stage > 0) stage_opts.relative_tolerance = std::max(1e-6, opts.relative_tolerance);
    if (!newton_solve(softened, work, pressure, stage_opts).converged) return false;
  }
  state = work;
  return true;
}

}  // namespace

StaticCurve ramp_solve(const FemProblem& problem, double p_max, const RampOptions& opts,
                       FemState& final_state) {
  problem.materials.validate();
  if (p_max < 0.0) raise(ErrorCode::InvalidArgument, "p_max must be nonnegative");
  const Mesh& mesh = *problem.mesh;

  StaticCurve curve;
  FemState state = initial_state(problem);

  RegionTag rest_tag{RegionKind::Body, -1};
  for (const RegionTag& tag : mesh.region)
    if (tag.kind != RegionKind::Limiting) {
      rest_tag = tag;
      break;
    }
  curve.samples.push_back({0.0, 0.0, 0.0, rest_tag, 0.0});
  if (opts.on_sample) opts.on_sample(curve.samples.back());

  const auto record = [&](double p) {
    CurveSample s;
    s.pressure = p;
    s.angle_deg = bending_angle(mesh, state.displacement);
    const std::vector<double> vm = von_mises_field(problem, state);
    const Hotspot h = hotspot(mesh, vm);
    s.max_vm = h.vm;
    s.hotspot = h.region;
    s.max_j_dev = max_jacobian_deviation(problem, state.displacement);
    curve.samples.push_back(s);
    if (opts.on_sample) opts.on_sample(s);
  };

  if (p_max > 0.0) {
    double p_cur = 0.0;
    double dp = opts.initial_increment;
    int successes = 0;
    bool have_prev = false;
    double p_prev = 0.0;
    VecX u_prev;

    while (p_cur < p_max - 1e-12) {
      const double next_mark = std::min(
          (std::floor(p_cur / opts.record_every + 1e-9) + 1.0) * opts.record_every, p_max);
      const double p_try = std::min(p_cur + dp, next_mark);

      FemState trial = state;
      if (have_prev && p_cur > p_prev) {
        trial.displacement =
            state.displacement +
            (state.displacement - u_prev) * ((p_try - p_cur) / (p_cur - p_prev));
      }
      NewtonReport rep = newton_solve(problem, trial, p_try, opts.newton);
      if (!rep.converged && have_prev) {
        trial = state;
        rep = newton_solve(problem, trial, p_try, opts.newton);
      }
      if (!rep.converged) {
        trial = state;
        rep.converged = solve_with_stiffness_continuation(problem, trial, p_try, opts.newton);
      }

      if (rep.converged) {
        u_prev = state.displacement;
        p_prev = p_cur;
        have_prev = true;
        state = trial;
        p_cur = p_try;
        if (++successes >= opts.successes_to_grow) {
          dp = std::min(dp * 2.0, opts.initial_increment);
          successes = 0;
        }
        if (std::abs(p_cur - next_mark) < 1e-12) record(p_cur);
      } else {
        successes = 0;
        dp *= 0.5;
        if (dp < opts.min_increment) {
          std::ostringstream msg;
          msg << "load ramp failed: increment underflowed " << opts.min_increment
              << " kPa; last converged pressure " << p_cur << " kPa";
          raise(ErrorCode::Solver, msg.str());
        }
      }
    }
  }

  if (opts.store_final_field)
    curve.final_vm_field = von_mises_field(problem, state);
  curve.validate();
  final_state = state;
  return curve;
}

double bending_angle(const Mesh& mesh, const VecX& u) {
  if (mesh.moving_end.empty())
    raise(ErrorCode::InvalidArgument, "mesh has no moving end-face nodes");

  const auto deformed = [&](int n) -> Vec2 {
    return mesh.nodes[static_cast<std::size_t>(n)] + Vec2(u(2 * n), u(2 * n + 1));
  };

  Vec2 mean = Vec2::Zero();
  for (int n : mesh.moving_end) mean += deformed(n);
  mean /= static_cast<double>(mesh.moving_end.size());

  double cyy = 0.0, czz = 0.0, cyz = 0.0;
  for (int n : mesh.moving_end) {
    const Vec2 d = deformed(n) - mean;
    cyy += d(0) * d(0);
    czz += d(1) * d(1);
    cyz += d(0) * d(1);
  }
  const double spread = 0.5 * (cyy + czz) +
                        std::sqrt(0.25 * (cyy - czz) * (cyy - czz) + cyz * cyz);
  if (!(spread > 1e-20))
    raise(ErrorCode::InvalidArgument, "moving end-face nodes are degenerate (coincident)");

  // Principal direction of the node cloud = the face line; its normal is the
  // face normal up to sign.
  const double theta_p = 0.5 * std::atan2(2.0 * cyz, cyy - czz);
  const Vec2 dir(std::cos(theta_p), std::sin(theta_p));
  Vec2 normal(-dir(1), dir(0));

  // Orient outward using the material just inside the face.
  std::set<int> face(mesh.moving_end.begin(), mesh.moving_end.end());
  Vec2 interior = Vec2::Zero();
  int count = 0;
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    bool touches = false;
    for (int k = 0; k < 6; ++k)
      if (face.count(mesh.elements[e].n[static_cast<std::size_t>(k)])) touches = true;
    if (!touches) continue;
    for (int k = 0; k < 6; ++k) {
      const int n = mesh.elements[e].n[static_cast<std::size_t>(k)];
      if (!face.count(n)) {
        interior += deformed(n);
        ++count;
      }
    }
  }
  if (count == 0)
    raise(ErrorCode::InvalidArgument, "no interior nodes adjacent to the moving end");
  interior /= static_cast<double>(count);
  if (normal.dot(mean - interior) < 0.0) normal = -normal;

  // Rotation from the reference outward normal (+y), positive toward the
  // limiting layer (clockwise), unwrapped to [0, 360).
  const double ccw = std::atan2(normal(1), normal(0));
  double deg = -ccw * 180.0 / std::numbers::pi;
  if (deg < 0.0) deg += 360.0;
  if (deg >= 360.0 - 1e-9) deg = 0.0;
  return deg;
}

std::vector<double> von_mises_field(const FemProblem& problem, const FemState& state) {
  const Mesh& mesh = *problem.mesh;
  std::vector<double> vm(static_cast<std::size_t>(mesh.element_count()), 0.0);
  const auto grad_ref = tri6_grad_ref(1.0 / 3.0, 1.0 / 3.0);
  for (int e = 0; e < mesh.element_count(); ++e) {
    const Tri6& t = mesh.elements[static_cast<std::size_t>(e)];
    const ElementGeometry geo = element_geometry(mesh, e);
    std::array<Vec2, 6> grad_x;
    for (int a = 0; a < 6; ++a)
      grad_x[static_cast<std::size_t>(a)] = geo.jac_inv_t * grad_ref[static_cast<std::size_t>(a)];
    const Mat2 f_def = deformation_gradient(state.displacement, t, grad_x);
    const double j = f_def.determinant();
    if (!(j > 0.0)) throw InvalidDeformation{"von_mises_field"};
    const StressTangent mat =
        problem.materials.evaluate(mesh.region[static_cast<std::size_t>(e)], f_def.transpose() * f_def);
    const Mat2 cauchy = (f_def * mat.stress * f_def.transpose()) / j;
    const double s33 = mat.s33 / j;
    const double syy = cauchy(0, 0);
    const double szz = cauchy(1, 1);
    const double syz = cauchy(0, 1);
    vm[static_cast<std::size_t>(e)] =
        std::sqrt(0.5 * ((syy - szz) * (syy - szz) + (szz - s33) * (szz - s33) +
                         (s33 - syy) * (s33 - syy)) +
                  3.0 * syz * syz);
  }
  return vm;
}

Hotspot hotspot(const Mesh& mesh, const std::vector<double>& vm_field) {
  Hotspot best;
  bool found = false;
  for (std::size_t e = 0; e < vm_field.size(); ++e) {
    if (mesh.region[e].kind == RegionKind::Limiting) continue;
    if (!found || vm_field[e] > best.vm) {
      best.vm = vm_field[e];
      best.region = mesh.region[e];
      found = true;
    }
  }
  if (!found) raise(ErrorCode::InvalidArgument, "mesh has no non-limiting elements");
  return best;
}

double max_jacobian_deviation(const FemProblem& problem, const VecX& u) {
  const Mesh& mesh = *problem.mesh;
  double worst = 0.0;
  for (int e = 0; e < mesh.element_count(); ++e) {
    if (mesh.region[static_cast<std::size_t>(e)].kind == RegionKind::Limiting) continue;
    const Tri6& t = mesh.elements[static_cast<std::size_t>(e)];
    const ElementGeometry geo = element_geometry(mesh, e);
    for (const QuadPoint& qp : kTriQuad) {
      const auto grad_ref = tri6_grad_ref(qp.xi, qp.eta);
      std::array<Vec2, 6> grad_x;
      for (int a = 0; a < 6; ++a)
        grad_x[static_cast<std::size_t>(a)] = geo.jac_inv_t * grad_ref[static_cast<std::size_t>(a)];
      const double j = deformation_gradient(u, t, grad_x).determinant();
      worst = std::max(worst, std::abs(j - 1.0));
    }
  }
  return worst;
}

void write_static_curve_csv(const StaticCurve& curve, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "pressure_kPa,angle_deg,max_vm_MPa,hotspot_region\n";
  for (const CurveSample& s : curve.samples)
    out << format_double(s.pressure) << "," << format_double(s.angle_deg) << ","
        << format_double(kpa_to_mpa(s.max_vm)) << "," << to_string(s.hotspot) << "\n";
  write_text_file(path, out.str());
}

StaticCurve read_static_curve_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("pressure_kPa,angle_deg,max_vm_MPa", 0) != 0)
    raise(ErrorCode::LogIntegrity, path.string() + ": bad static-curve header");
  StaticCurve curve;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string field;
    CurveSample s;
    std::getline(row, field, ',');
    s.pressure = std::stod(field);
    std::getline(row, field, ',');
    s.angle_deg = std::stod(field);
    std::getline(row, field, ',');
    s.max_vm = std::stod(field) * 1e3;  // MPa -> kPa
    std::getline(row, field, ',');
    s.hotspot = region_tag_from_string(field);
    curve.samples.push_back(s);
  }
  curve.validate();
  return curve;
}

void write_stress_field_csv(const Mesh& mesh, const std::vector<double>& vm_field,
                            const std::filesystem::path& path) {
  std::ostringstream out;
  out << "elem_id,region,vm_MPa\n";
  for (std::size_t e = 0; e < vm_field.size(); ++e)
    out << e << "," << to_string(mesh.region[e]) << "," << format_double(kpa_to_mpa(vm_field[e]))
        << "\n";
  write_text_file(path, out.str());
}

}  // namespace pneusim
