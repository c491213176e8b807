// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/fem.hpp"

#include <cmath>
#include <numbers>
#include <set>

#include <doctest.h>

#include "core/error.hpp"
#include "testutil.hpp"

using namespace pneusim;
namespace tu = pneusim::testutil;

namespace {

RegionMaterials uniform_materials(const HyperelasticModel& m) {
  RegionMaterials mats;
  mats.body = m;
  mats.sealing = m;
  mats.walls = m;
  mats.limiting = {6.5e6, 0.2};
  return mats;
}

PneuNetGeometry tiny_geometry() {
  PneuNetGeometry g;
  g.n_chambers = 2;
  g.chamber_width = 3.0;
  g.chamber_height = 6.0;
  g.wall_thickness = 1.5;
  g.top_thickness = 1.5;
  g.channel_height = 1.5;
  g.base_thickness = 2.0;
  g.limiting_layer_thickness = 0.3;
  g.end_cap_length = 3.0;
  return g;
}

/// Independent patch oracle: plane-strain homogeneous state F = diag(a, b)
/// under Cauchy stress (sigma_yy, sigma_zz) = (-p, 0), solved by Newton with
/// finite differences on a scalar energy written out here, not in the
/// library.
struct PatchOracle {
  double c10, bulk;

  double energy(double c1, double c2) const {
    const double j = std::sqrt(c1 * c2);
    const double i1 = c1 + c2 + 1.0;
    const double i1_bar = std::pow(j, -2.0 / 3.0) * i1;
    return c10 * (i1_bar - 3.0) + 0.5 * bulk * (j - 1.0) * (j - 1.0);
  }

  // Cauchy sigma_ii = lambda_i^2 * S_ii / J, S_ii = 2 dW/dc_i.
  std::pair<double, double> cauchy(double a, double b) const {
    const double h = 1e-7;
    const double c1 = a * a, c2 = b * b;
    const double s1 = (energy(c1 + h, c2) - energy(c1 - h, c2)) / h;  // 2 dW/dc1
    const double s2 = (energy(c1, c2 + h) - energy(c1, c2 - h)) / h;
    const double j = a * b;
    return {c1 * s1 / j, c2 * s2 / j};
  }

  std::pair<double, double> solve(double pressure) const {
    double a = 1.0, b = 1.0;
    for (int it = 0; it < 100; ++it) {
      const auto [syy, szz] = cauchy(a, b);
      const double r1 = syy + pressure;
      const double r2 = szz;
      if (std::abs(r1) < 1e-12 * bulk && std::abs(r2) < 1e-12 * bulk) break;
      const double h = 1e-7;
      const auto [syy_a, szz_a] = cauchy(a + h, b);
      const auto [syy_b, szz_b] = cauchy(a, b + h);
      const double j11 = (syy_a - syy) / h, j12 = (syy_b - syy) / h;
      const double j21 = (szz_a - szz) / h, j22 = (szz_b - szz) / h;
      const double det = j11 * j22 - j12 * j21;
      a -= (j22 * r1 - j12 * r2) / det;
      b -= (-j21 * r1 + j11 * r2) / det;
    }
    return {a, b};
  }
};

}  // namespace

TEST_SUITE_BEGIN("fem");

TEST_CASE("rigid translation produces no internal force") {
  const Mesh mesh = mesh_rectangle(2.0, 1.0, 0.5);
  FemProblem problem;
  problem.mesh = &mesh;
  problem.materials = uniform_materials(make_yeoh({0.5}));

  VecX u = VecX::Zero(2 * mesh.node_count());
  for (int n = 0; n < mesh.node_count(); ++n) {
    u(2 * n) = 0.37;
    u(2 * n + 1) = -1.21;
  }
  const VecX f = internal_force(problem, u);
  CHECK(f.norm() < 1e-9);
}

TEST_CASE("zero load, zero displacement: already in equilibrium") {
  const Mesh mesh = generate_mesh(tiny_geometry(), 1.5);
  const FemProblem problem = make_pneunet_problem(mesh, uniform_materials(ecoflex50_yeoh3()));
  FemState state = initial_state(problem);
  const NewtonReport rep = newton_solve(problem, state, 0.0);
  CHECK(rep.converged);
  CHECK(rep.iterations == 0);
  CHECK(state.displacement.norm() == 0.0);
}

TEST_CASE("assembled tangent matches finite differences of the residual") {
  // Two-element patch with a perturbed displacement and follower pressure on
  // the right face, so material, geometric and load stiffness all enter.
  const Mesh mesh = mesh_rectangle(1.0, 1.0, 1.0);
  REQUIRE(mesh.element_count() == 2);
  FemProblem problem;
  problem.mesh = &mesh;
  problem.materials = uniform_materials(make_yeoh({0.5, 0.05}));
  problem.fixed_dofs = {{mesh.fixed_end[0], 0}, {mesh.fixed_end[0], 1}};
  problem.pressure_edges =
      outline_edges_where(mesh, [](const Vec2& mid) { return mid(0) > 1.0 - 1e-9; });
  const double pressure = 0.3;

  VecX u = VecX::Zero(2 * mesh.node_count());
  std::mt19937_64 rng(0xFE11ULL);
  std::uniform_real_distribution<double> d(-0.05, 0.05);
  for (Eigen::Index i = 0; i < u.size(); ++i) u(i) = d(rng);
  u(2 * mesh.fixed_end[0]) = 0.0;
  u(2 * mesh.fixed_end[0] + 1) = 0.0;

  const Assembled sys = assemble(problem, u, pressure);

  // Map free dofs the same way the assembler does.
  std::vector<int> free;
  for (int dof = 0; dof < 2 * mesh.node_count(); ++dof) {
    bool fixed = false;
    for (const auto& [n, c] : problem.fixed_dofs)
      if (2 * n + c == dof) fixed = true;
    if (!fixed) free.push_back(dof);
  }
  REQUIRE(sys.tangent.rows() == static_cast<Eigen::Index>(free.size()));

  const double h = 1e-7;
  double worst = 0.0;
  const MatX dense = MatX(sys.tangent);
  for (std::size_t q = 0; q < free.size(); ++q) {
    VecX up = u, um = u;
    up(free[q]) += h;
    um(free[q]) -= h;
    const VecX rp = assemble(problem, up, pressure).residual;
    const VecX rm = assemble(problem, um, pressure).residual;
    for (std::size_t p = 0; p < free.size(); ++p) {
      const double fd = (rp(free[p]) - rm(free[p])) / (2.0 * h);
      worst = std::max(worst, std::abs(fd - dense(static_cast<Eigen::Index>(p),
                                                  static_cast<Eigen::Index>(q))));
    }
  }
  CHECK(worst / dense.norm() < 1e-4);
}

TEST_CASE("tangent is symmetric") {
  const Mesh mesh = mesh_rectangle(1.0, 1.0, 0.5);
  FemProblem problem;
  problem.mesh = &mesh;
  problem.materials = uniform_materials(ecoflex50_yeoh3());
  problem.fixed_dofs = {{mesh.fixed_end[0], 0}, {mesh.fixed_end[0], 1}};
  VecX u = VecX::Zero(2 * mesh.node_count());
  for (int n = 0; n < mesh.node_count(); ++n) u(2 * n) = 0.02 * mesh.nodes[static_cast<std::size_t>(n)](0);
  const Assembled sys = assemble(problem, u, 0.0);
  const MatX dense = MatX(sys.tangent);
  CHECK((dense - dense.transpose()).norm() / dense.norm() < 1e-12);
}

TEST_CASE("patch test: homogeneous follower traction matches the analytic state") {
  const HyperelasticModel material = make_yeoh({0.5});
  const double pressure = 0.12;  // kPa, well into the nonlinear range for mu = 1 kPa

  const PatchOracle oracle{material.coefficients[0], material.bulk_penalty};
  const auto [a, b] = oracle.solve(pressure);
  REQUIRE(a < 1.0);  // compressed along y
  REQUIRE(b > 1.0);  // expands along z

  for (double h : {0.5, 0.25}) {
    const Mesh mesh = mesh_rectangle(1.0, 1.0, h);
    FemProblem problem;
    problem.mesh = &mesh;
    problem.materials = uniform_materials(material);
    for (int n = 0; n < mesh.node_count(); ++n) {
      const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
      if (p(0) < 1e-9) problem.fixed_dofs.emplace_back(n, 0);  // roller at y = 0
      if (p(1) < 1e-9) problem.fixed_dofs.emplace_back(n, 1);  // roller at z = 0
    }
    problem.pressure_edges =
        outline_edges_where(mesh, [](const Vec2& mid) { return mid(0) > 1.0 - 1e-9; });
    REQUIRE(!problem.pressure_edges.empty());

    FemState state = initial_state(problem);
    const NewtonReport rep = newton_solve(problem, state, pressure);
    REQUIRE(rep.converged);

    for (int n = 0; n < mesh.node_count(); ++n) {
      const Vec2& X = mesh.nodes[static_cast<std::size_t>(n)];
      const double uy = state.displacement(2 * n);
      const double uz = state.displacement(2 * n + 1);
      CHECK(std::abs(uy - (a - 1.0) * X(0)) < 0.005 * std::max(std::abs(a - 1.0), 1e-3));
      CHECK(std::abs(uz - (b - 1.0) * X(1)) < 0.005 * std::max(std::abs(b - 1.0), 1e-3));
    }
  }
}

TEST_CASE("pressure on a closed loop exerts zero net force") {
  const Mesh mesh = generate_mesh(tiny_geometry(), 1.0);
  const FemProblem problem = make_pneunet_problem(mesh, uniform_materials(ecoflex50_yeoh3()));
  // Assemble at a nonzero displacement so the deformed normals are exercised.
  VecX u = VecX::Zero(2 * mesh.node_count());
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
    u(2 * n) = 0.01 * p(1) * p(1) / mesh.height;
    u(2 * n + 1) = 0.015 * p(0) / mesh.length;
  }
  const Assembled with_pressure = assemble(problem, u, 7.0);
  const Assembled without = assemble(problem, u, 0.0);
  const VecX f_ext = without.residual - with_pressure.residual;  // pressure contribution
  double fy = 0.0, fz = 0.0;
  for (int n = 0; n < mesh.node_count(); ++n) {
    fy += f_ext(2 * n);
    fz += f_ext(2 * n + 1);
  }
  CHECK(std::abs(fy) < 1e-9 * f_ext.norm());
  CHECK(std::abs(fz) < 1e-9 * f_ext.norm());
}

TEST_CASE("small-pressure solution matches the linearized prediction") {
  const Mesh mesh = generate_mesh(tiny_geometry(), 1.5);
  const FemProblem problem = make_pneunet_problem(mesh, uniform_materials(ecoflex50_yeoh3()));

  const double p = 0.1;  // kPa
  FemState state = initial_state(problem);
  REQUIRE(newton_solve(problem, state, p).converged);

  // One tangent solve from the reference state.
  const Assembled sys = assemble(problem, initial_state(problem).displacement, p);
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(sys.tangent);
  REQUIRE(lu.info() == Eigen::Success);
  std::vector<int> free;
  for (int n = 0; n < mesh.node_count(); ++n)
    for (int c = 0; c < 2; ++c) free.push_back(2 * n + c);
  // Drop constrained dofs (fixed end, both components).
  std::vector<int> free_dofs;
  {
    std::set<int> fixed;
    for (const auto& [n, c] : problem.fixed_dofs) fixed.insert(2 * n + c);
    for (int dof : free)
      if (!fixed.count(dof)) free_dofs.push_back(dof);
  }
  VecX r(free_dofs.size());
  for (std::size_t i = 0; i < free_dofs.size(); ++i) r(static_cast<Eigen::Index>(i)) = sys.residual(free_dofs[i]);
  const VecX du = lu.solve(-r);
  VecX linear = VecX::Zero(2 * mesh.node_count());
  for (std::size_t i = 0; i < free_dofs.size(); ++i) linear(free_dofs[i]) = du(static_cast<Eigen::Index>(i));

  CHECK((state.displacement - linear).norm() / linear.norm() < 0.01);
}

TEST_CASE("Newton contracts superlinearly near the solution") {
  const Mesh mesh = generate_mesh(tiny_geometry(), 1.5);
  const FemProblem problem = make_pneunet_problem(mesh, uniform_materials(ecoflex50_yeoh3()));
  // Walk into the basin with the incremental ramp, then take one plain
  // Newton step to a nearby load level and look at the contraction history.
  RampOptions ramp;
  ramp.initial_increment = 1.0;
  ramp.store_final_field = false;
  FemState state;
  ramp_solve(problem, 2.0, ramp, state);
  FemState state2 = state;
  const NewtonReport rep = newton_solve(problem, state2, 2.5);
  REQUIRE(rep.converged);
  REQUIRE(rep.residual_history.size() >= 3);
  const auto& h = rep.residual_history;
  // Ratios shrink as the iterates close in (superlinear contraction).
  const double r_early = h[1] / h[0];
  const double r_late = h[h.size() - 1] / h[h.size() - 2];
  CHECK(r_late < r_early);
  CHECK(r_late < 0.2);
}

TEST_CASE("bending angle extraction") {
  const Mesh mesh = generate_mesh(tiny_geometry(), 1.0);

  SUBCASE("zero displacement reads zero") {
    CHECK(bending_angle(mesh, VecX::Zero(2 * mesh.node_count())) == doctest::Approx(0.0));
  }
  SUBCASE("rigid rotation by 90 degrees in the bending direction") {
    VecX u(2 * mesh.node_count());
    for (int n = 0; n < mesh.node_count(); ++n) {
      const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
      // Clockwise rotation (toward the limiting layer): (y, z) -> (z, -y).
      u(2 * n) = p(1) - p(0);
      u(2 * n + 1) = -p(0) - p(1);
    }
    CHECK(std::abs(bending_angle(mesh, u) - 90.0) < 1e-9);
  }
  SUBCASE("circular-arc map reproduces a 212 degree bend") {
    const double arc_deg = 212.0;
    const double arc = arc_deg * std::numbers::pi / 180.0;
    const double radius = mesh.length / arc;
    VecX u(2 * mesh.node_count());
    for (int n = 0; n < mesh.node_count(); ++n) {
      const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
      const double phi = p(0) / radius;
      const double y = (radius + p(1)) * std::sin(phi);
      const double z = -radius + (radius + p(1)) * std::cos(phi);
      u(2 * n) = y - p(0);
      u(2 * n + 1) = z - p(1);
    }
    CHECK(std::abs(bending_angle(mesh, u) - arc_deg) < 0.5);
  }
  SUBCASE("coincident end nodes are rejected") {
    VecX u(2 * mesh.node_count());
    for (int n = 0; n < mesh.node_count(); ++n) {
      const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
      u(2 * n) = -p(0);
      u(2 * n + 1) = -p(1);  // collapse everything to the origin
    }
    CHECK_THROWS_AS(bending_angle(mesh, u), Error);
  }
}

TEST_CASE("von Mises field: homogeneous stretch against the hand formula") {
  const HyperelasticModel material = make_yeoh({0.5});
  const Mesh mesh = mesh_rectangle(1.0, 1.0, 0.5);
  FemProblem problem;
  problem.mesh = &mesh;
  problem.materials = uniform_materials(material);

  const double a = 1.08, b = 0.95;
  FemState state = initial_state(problem);
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
    state.displacement(2 * n) = (a - 1.0) * p(0);
    state.displacement(2 * n + 1) = (b - 1.0) * p(1);
  }
  const std::vector<double> vm = von_mises_field(problem, state);

  // Hand evaluation from the same homogeneous state.
  Mat2 c = Mat2::Zero();
  c(0, 0) = a * a;
  c(1, 1) = b * b;
  const StressTangent st = pk2_stress_and_tangent(material, c);
  const double j = a * b;
  const double syy = a * a * st.stress(0, 0) / j;
  const double szz = b * b * st.stress(1, 1) / j;
  const double sxx = st.s33 / j;
  const double expect = std::sqrt(
      0.5 * ((syy - szz) * (syy - szz) + (szz - sxx) * (szz - sxx) + (sxx - syy) * (sxx - syy)));
  for (double v : vm) CHECK(v == doctest::Approx(expect).epsilon(1e-9));
}

TEST_CASE("ramp on a small pneu-net") {
  const Mesh mesh = generate_mesh(tiny_geometry(), 1.5);
  const RegionMaterials mats = uniform_materials(make_yeoh({20.0}));  // soft, bends visibly
  const FemProblem problem = make_pneunet_problem(mesh, mats);

  SUBCASE("zero target returns the single rest sample") {
    const StaticCurve curve = ramp_solve(problem, 0.0);
    REQUIRE(curve.samples.size() == 1);
    CHECK(curve.samples[0].pressure == 0.0);
    CHECK(curve.samples[0].angle_deg == 0.0);
    CHECK(curve.samples[0].max_vm == 0.0);
  }
  SUBCASE("records the staircase pressures and bends monotonically") {
    RampOptions opts;
    opts.initial_increment = 2.0;
    const StaticCurve curve = ramp_solve(problem, 12.0, opts);
    REQUIRE(curve.samples.size() == 4);  // 0, 5, 10, 12
    CHECK(curve.samples[1].pressure == doctest::Approx(5.0));
    CHECK(curve.samples[2].pressure == doctest::Approx(10.0));
    CHECK(curve.samples[3].pressure == doctest::Approx(12.0));
    for (std::size_t i = 1; i < curve.samples.size(); ++i)
      CHECK(curve.samples[i].angle_deg > curve.samples[i - 1].angle_deg);
    CHECK(curve.final_vm_field.size() == static_cast<std::size_t>(mesh.element_count()));
    CHECK(curve.angle_at(7.5) > curve.angle_at(5.0));
    CHECK(curve.covers(12.0));
    CHECK(!curve.covers(12.5));
  }
  SUBCASE("softer material bends further at every recorded pressure") {
    RampOptions opts;
    opts.store_final_field = false;
    const StaticCurve base = ramp_solve(problem, 8.0, opts);
    RegionMaterials softer = mats;
    for (HyperelasticModel* m : {&softer.body, &softer.sealing, &softer.walls}) {
      for (double& c : m->coefficients) c *= 0.8;
      m->bulk_penalty *= 0.8;
    }
    const StaticCurve soft_curve =
        ramp_solve(make_pneunet_problem(mesh, softer), 8.0, opts);
    REQUIRE(soft_curve.samples.size() == base.samples.size());
    for (std::size_t i = 1; i < base.samples.size(); ++i)
      CHECK(soft_curve.samples[i].angle_deg > base.samples[i].angle_deg);
  }
}

TEST_CASE("static curve CSV round trip") {
  StaticCurve curve;
  curve.samples.push_back({0.0, 0.0, 0.0, RegionTag{RegionKind::Body, -1}, 0.0});
  curve.samples.push_back({5.0, 12.25, 31.5, RegionTag{RegionKind::InteriorWall, 3}, 1e-4});
  const auto dir = tu::scratch_dir("curve_io");
  write_static_curve_csv(curve, dir / "curve.csv");
  const StaticCurve back = read_static_curve_csv(dir / "curve.csv");
  REQUIRE(back.samples.size() == 2);
  CHECK(back.samples[1].pressure == 5.0);
  CHECK(back.samples[1].angle_deg == 12.25);
  CHECK(back.samples[1].max_vm == doctest::Approx(31.5).epsilon(1e-12));
  CHECK(back.samples[1].hotspot == RegionTag{RegionKind::InteriorWall, 3});
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
