// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <Eigen/Sparse>
#include <filesystem>
#include <functional>
#include <vector>

#include "core/material.hpp"
#include "core/mesh.hpp"

namespace pneusim {

/// Constitutive assignment per region family. Hyperelastic regions share the
/// Yeoh/Mooney-Rivlin laws; the limiting layer is linear elastic, evaluated
/// as Saint Venant-Kirchhoff so large rotations stay objective.
struct RegionMaterials {
  HyperelasticModel body;
  HyperelasticModel sealing;
  HyperelasticModel walls;
  LinearElasticModel limiting;

  void validate() const;
  StressTangent evaluate(const RegionTag& tag, const Mat2& C) const;
  bool is_hyperelastic(const RegionTag& tag) const { return tag.kind != RegionKind::Limiting; }
};

/// Static plane-strain total-Lagrangian problem: encastre constraints plus a
/// follower-pressure boundary integrated over the deformed edges.
struct FemProblem {
  const Mesh* mesh = nullptr;
  RegionMaterials materials;
  std::vector<std::pair<int, int>> fixed_dofs;  // (node, component), zero displacement
  std::vector<Edge3> pressure_edges;
};

/// Encastre on the mesh's fixed end, pressure on the cavity boundary.
FemProblem make_pneunet_problem(const Mesh& mesh, RegionMaterials materials);

/// Outline edges whose (reference) midpoint satisfies a predicate; used to
/// put pressure on custom faces in patch tests.
std::vector<Edge3> outline_edges_where(const Mesh& mesh,
                                       const std::function<bool(const Vec2&)>& pred);

struct FemState {
  VecX displacement;  // 2 dofs per node, mm
  double pressure = 0.0;
  bool converged = false;
  double residual_norm = 0.0;  // mN, over free dofs
};

FemState initial_state(const FemProblem& problem);

struct Assembled {
  VecX residual;  // full-length; constrained dofs zeroed
  Eigen::SparseMatrix<double> tangent;  // reduced to free dofs
  double residual_free_norm = 0.0;
  double external_free_norm = 0.0;
  double force_magnitude = 0.0;  // pre-cancellation scale; bounds the
                                 // roundoff floor of the residual
};

/// Residual = internal force - follower pressure load at displacement u.
/// Throws InvalidDeformation when an element inverts.
VecX internal_force(const FemProblem& problem, const VecX& u);
Assembled assemble(const FemProblem& problem, const VecX& u, double pressure);

struct NewtonOptions {
  int max_iterations = 30;
  double relative_tolerance = 1e-8;
  int max_backtracks = 8;
  double absolute_floor = 1e-6;  // mN, reference norm floor at zero load
};

struct NewtonReport {
  bool converged = false;
  int iterations = 0;
  std::vector<double> residual_history;
};

/// Full Newton with backtracking line search. Leaves `state` at the last
/// accepted iterate; `state.converged` mirrors the report.
NewtonReport newton_solve(const FemProblem& problem, FemState& state, double pressure,
                          const NewtonOptions& opts = {});

struct CurveSample {
  double pressure = 0.0;     // kPa
  double angle_deg = 0.0;
  double max_vm = 0.0;       // kPa, limiting layer excluded
  RegionTag hotspot;         // region holding that maximum
  double max_j_dev = 0.0;    // max |J-1| over hyperelastic elements
};

/// Pressure sweep result; strictly increasing pressures, zero angle at rest.
struct StaticCurve {
  std::vector<CurveSample> samples;
  std::vector<double> final_vm_field;  // per element, at samples.back()

  bool covers(double pressure) const;
  double angle_at(double pressure) const;   // piecewise-linear
  double max_vm_at(double pressure) const;  // piecewise-linear
  const CurveSample& sample_at(double pressure) const;
  void validate() const;
};

struct RampOptions {
  double initial_increment = 5.0;  // kPa
  double record_every = 5.0;       // kPa; every multiple is hit exactly
  double min_increment = 0.01;     // kPa; below this the ramp is a hard failure
  int successes_to_grow = 3;
  NewtonOptions newton;
  bool store_final_field = true;
  std::function<void(const CurveSample&)> on_sample;  // progress hook
};

/// Adaptive incremental loading from 0 to p_max: halve the increment on
/// nonconvergence, double it back after repeated successes, and record a
/// sample at every multiple of `record_every` plus p_max. Throws
/// ErrorCode::Solver (naming the last converged pressure) if the increment
/// underflows `min_increment`.
StaticCurve ramp_solve(const FemProblem& problem, double p_max, const RampOptions& opts = {});

/// Ramp that also returns the final state (for stress-field export).
StaticCurve ramp_solve(const FemProblem& problem, double p_max, const RampOptions& opts,
                       FemState& final_state);

/// Unsigned bending angle in degrees, in [0, 360): the rotation of the
/// moving end-face normal from its reference direction, measured positive
/// toward the limiting layer and unwrapped past 180.
double bending_angle(const Mesh& mesh, const VecX& u);

/// Per-element von Mises stress (kPa) at element centroids, from the Cauchy
/// push-forward with the plane-strain out-of-plane component included.
std::vector<double> von_mises_field(const FemProblem& problem, const FemState& state);

struct Hotspot {
  RegionTag region;
  double vm = 0.0;  // kPa
};

/// Maximum von Mises stress outside the limiting layer.
Hotspot hotspot(const Mesh& mesh, const std::vector<double>& vm_field);

/// Max |det F - 1| over hyperelastic elements (quasi-incompressibility check).
double max_jacobian_deviation(const FemProblem& problem, const VecX& u);

// Static-curve CSV contract: pressure_kPa,angle_deg,max_vm_MPa,hotspot_region
void write_static_curve_csv(const StaticCurve& curve, const std::filesystem::path& path);
StaticCurve read_static_curve_csv(const std::filesystem::path& path);

// Stress-field CSV contract: elem_id,region,vm_MPa
void write_stress_field_csv(const Mesh& mesh, const std::vector<double>& vm_field,
                            const std::filesystem::path& path);

}  // namespace pneusim
