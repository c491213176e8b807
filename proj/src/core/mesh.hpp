// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <filesystem>
#include <vector>

#include "core/geometry.hpp"
#include "core/linalg.hpp"

namespace pneusim {

/// 6-node quadratic triangle. Corners 0,1,2 are counter-clockwise; midside
/// node 3 sits between corners 0-1, node 4 between 1-2, node 5 between 2-0.
struct Tri6 {
  std::array<int, 6> n;
};

/// Boundary edge with the solid on its left when walking a -> b, so the
/// outward normal of the solid is the direction (g_z, -g_y) for tangent g.
struct Edge3 {
  int a;
  int b;
  int mid;
};

struct Mesh {
  std::vector<Vec2> nodes;  // mm
  std::vector<Tri6> elements;
  std::vector<RegionTag> region;      // per element
  std::vector<int> fixed_end;         // nodes on the y = 0 face
  std::vector<int> moving_end;        // nodes on the y = L face
  std::vector<Edge3> pressure_edges;  // cavity boundary, chained into loops
  std::vector<Edge3> outline_edges;   // outer boundary
  double length = 0.0;                // reference y extent
  double height = 0.0;

  int node_count() const { return static_cast<int>(nodes.size()); }
  int element_count() const { return static_cast<int>(elements.size()); }

  double element_area(int e) const;
  Vec2 element_centroid(int e) const;
  double total_area() const;
};

/// Structured conforming quadratic-triangle mesh of the cross-section.
/// Feature lines of the parametrization are always respected; intervals are
/// subdivided so no boundary edge exceeds target_h. Throws ErrorCode::Config
/// for meshes that would degenerate (target_h <= 0).
Mesh generate_mesh(const CrossSection& section, double target_h);

inline Mesh generate_mesh(const PneuNetGeometry& geom, double target_h) {
  return generate_mesh(build_cross_section(geom), target_h);
}

/// Plain rectangle [0,w]x[0,h], single `body` region; used by patch tests.
Mesh mesh_rectangle(double width, double height, double target_h);

/// Number of closed loops formed by the pressure edges.
std::size_t count_pressure_loops(const Mesh& mesh);

/// Plain-text export (`pneusim-mesh v1`) and its reader.
void write_mesh(const Mesh& mesh, const std::filesystem::path& path);
Mesh read_mesh(const std::filesystem::path& path);

}  // namespace pneusim
