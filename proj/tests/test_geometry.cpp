// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/geometry.hpp"

#include <algorithm>
#include <set>

#include <doctest.h>

#include "core/error.hpp"
#include "core/mesh.hpp"
#include "testutil.hpp"

using namespace pneusim;
namespace tu = pneusim::testutil;

namespace {

PneuNetGeometry small_geometry() {
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

}  // namespace

TEST_SUITE_BEGIN("geometry");

TEST_CASE("default cross-section dimensions") {
  const PneuNetGeometry g;  // 11 chambers, the stock profile
  CHECK(g.total_length() == doctest::Approx(11 * 4.0 + 12 * 2.0 + 2 * 4.0));  // 76 mm
  CHECK(g.total_height() == doctest::Approx(3.0 + 2.0 + 10.0 + 2.0));
  const CrossSection cs = build_cross_section(g);
  CHECK(cs.length == doctest::Approx(76.0));
  CHECK(cs.chambers.size() == 11);
  CHECK(cs.walls.size() == 12);
  // The cut runs through the walls, so every chamber is its own hole.
  CHECK(cs.hole_count == 11);
  const double expect_cavity = 11 * (4.0 * 12.0);
  CHECK(cs.cavity_area == doctest::Approx(expect_cavity));
  CHECK(cs.solid_area == doctest::Approx(76.0 * 17.0 - expect_cavity));
}

TEST_CASE("single-chamber cross-section has exactly one cavity") {
  PneuNetGeometry g = small_geometry();
  g.n_chambers = 1;
  const CrossSection cs = build_cross_section(g);
  CHECK(cs.hole_count == 1);
  CHECK(cs.chambers.size() == 1);
  // The cavity spans from the sealing plane to the underside of the cover.
  CHECK(cs.chambers[0].z0 == doctest::Approx(g.base_thickness));
  CHECK(cs.chambers[0].z1 ==
        doctest::Approx(g.base_thickness + g.channel_height + g.chamber_height));
}

TEST_CASE("degenerate geometry is rejected with the violated constraint named") {
  PneuNetGeometry g = small_geometry();
  g.wall_thickness = 0.0;
  try {
    build_cross_section(g);
    FAIL("expected a geometry error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Config);
    CHECK(std::string(e.what()).find("wall_thickness") != std::string::npos);
  }

  g = small_geometry();
  g.channel_height = g.chamber_height;  // channel must be shorter than the chamber
  CHECK_THROWS_AS(build_cross_section(g), Error);

  g = small_geometry();
  g.n_chambers = 0;
  CHECK_THROWS_AS(build_cross_section(g), Error);

  g = small_geometry();
  g.limiting_layer_thickness = g.base_thickness;  // fabric cannot fill the base
  CHECK_THROWS_AS(build_cross_section(g), Error);
}

TEST_CASE("region tags parse and print") {
  CHECK(to_string(RegionTag{RegionKind::InteriorWall, 7}) == "interior_wall_7");
  CHECK(region_tag_from_string("interior_wall_7") ==
        RegionTag{RegionKind::InteriorWall, 7});
  CHECK(region_tag_from_string("body") == RegionTag{RegionKind::Body, -1});
  CHECK_THROWS_AS(region_tag_from_string("chamber"), Error);
}

TEST_CASE("unit-square mesh respects the target edge length") {
  const Mesh mesh = mesh_rectangle(1.0, 1.0, 0.5);
  CHECK(mesh.element_count() > 0);
  for (int e = 0; e < mesh.element_count(); ++e) CHECK(mesh.element_area(e) > 0.0);
  for (const Edge3& edge : mesh.outline_edges) {
    const Vec2 d = mesh.nodes[static_cast<std::size_t>(edge.a)] -
                   mesh.nodes[static_cast<std::size_t>(edge.b)];
    CHECK(d.norm() <= 0.5 + 1e-12);
  }
  CHECK(mesh.total_area() == doctest::Approx(1.0));
  CHECK(mesh.pressure_edges.empty());
}

TEST_CASE("default pneu-net mesh")
{
  const Mesh mesh = generate_mesh(PneuNetGeometry{}, 2.5);
  const CrossSection cs = build_cross_section(PneuNetGeometry{});

  SUBCASE("area matches the cross-section polygon") {
    CHECK(tu::rel_err(mesh.total_area(), cs.solid_area) < 1e-6);
  }
  SUBCASE("pressure edges trace one closed loop per chamber") {
    CHECK(count_pressure_loops(mesh) == 11);
    CHECK(!mesh.pressure_edges.empty());
  }
  SUBCASE("boundary edges respect the seed size") {
    for (const Edge3& edge : mesh.pressure_edges) {
      const Vec2 d = mesh.nodes[static_cast<std::size_t>(edge.a)] -
                     mesh.nodes[static_cast<std::size_t>(edge.b)];
      CHECK(d.norm() <= 2.5 + 1e-12);
    }
  }
  SUBCASE("end-face sets") {
    CHECK(mesh.fixed_end.size() >= 3);
    CHECK(mesh.moving_end.size() >= 3);
    for (int n : mesh.fixed_end)
      CHECK(mesh.nodes[static_cast<std::size_t>(n)](0) == doctest::Approx(0.0));
    for (int n : mesh.moving_end)
      CHECK(mesh.nodes[static_cast<std::size_t>(n)](0) == doctest::Approx(76.0));
  }
  SUBCASE("every wall index is represented and tags partition the elements") {
    std::set<int> wall_indices;
    std::size_t limiting = 0, sealing = 0;
    for (const RegionTag& tag : mesh.region) {
      if (tag.kind == RegionKind::InteriorWall) wall_indices.insert(tag.wall_index);
      if (tag.kind == RegionKind::Limiting) ++limiting;
      if (tag.kind == RegionKind::Sealing) ++sealing;
    }
    CHECK(wall_indices.size() == 12);
    CHECK(*wall_indices.begin() == 0);
    CHECK(*wall_indices.rbegin() == 11);
    CHECK(limiting > 0);
    CHECK(sealing > 0);
  }
  SUBCASE("positive Jacobians everywhere") {
    for (int e = 0; e < mesh.element_count(); ++e) CHECK(mesh.element_area(e) > 0.0);
  }
}

TEST_CASE("refinement keeps the boundary topology and multiplies elements") {
  const Mesh coarse = generate_mesh(PneuNetGeometry{}, 2.5);
  const Mesh fine = generate_mesh(PneuNetGeometry{}, 1.25);
  CHECK(count_pressure_loops(coarse) == count_pressure_loops(fine));
  CHECK(coarse.fixed_end.size() <= fine.fixed_end.size());
  const double factor =
      static_cast<double>(fine.element_count()) / coarse.element_count();
  CHECK(factor >= 3.0);
  CHECK(factor <= 5.0);
}

TEST_CASE("single-chamber mesh pressure loop follows the cavity outline") {
  PneuNetGeometry g = small_geometry();
  g.n_chambers = 1;
  const Mesh mesh = generate_mesh(g, 1.0);
  CHECK(count_pressure_loops(mesh) == 1);
  // The loop visits both the cavity floor (the sealing plane) and its top.
  const double z_floor = g.base_thickness;
  const double z_top = g.base_thickness + g.channel_height + g.chamber_height;
  bool saw_floor = false, saw_top = false;
  for (const Edge3& e : mesh.pressure_edges) {
    const double z = 0.5 * (mesh.nodes[static_cast<std::size_t>(e.a)](1) +
                            mesh.nodes[static_cast<std::size_t>(e.b)](1));
    if (std::abs(z - z_floor) < 1e-9) saw_floor = true;
    if (std::abs(z - z_top) < 1e-9) saw_top = true;
  }
  CHECK(saw_floor);
  CHECK(saw_top);
}

TEST_CASE("mesh file round trip") {
  const auto dir = tu::scratch_dir("mesh_io");
  const Mesh mesh = generate_mesh(small_geometry(), 1.5);
  write_mesh(mesh, dir / "mesh.txt");
  const Mesh back = read_mesh(dir / "mesh.txt");
  REQUIRE(back.node_count() == mesh.node_count());
  REQUIRE(back.element_count() == mesh.element_count());
  for (int n = 0; n < mesh.node_count(); ++n)
    CHECK((back.nodes[static_cast<std::size_t>(n)] - mesh.nodes[static_cast<std::size_t>(n)])
              .norm() == 0.0);
  for (int e = 0; e < mesh.element_count(); ++e) {
    CHECK(back.elements[static_cast<std::size_t>(e)].n ==
          mesh.elements[static_cast<std::size_t>(e)].n);
    CHECK(back.region[static_cast<std::size_t>(e)] == mesh.region[static_cast<std::size_t>(e)]);
  }
  CHECK(back.fixed_end == mesh.fixed_end);
  CHECK(back.moving_end == mesh.moving_end);
  CHECK(back.pressure_edges.size() == mesh.pressure_edges.size());
  std::filesystem::remove_all(dir);
}

TEST_SUITE_END();
