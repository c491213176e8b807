// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

namespace pneusim {

/// Axis convention for the longitudinal (y-z) cross-section: y runs along the
/// actuator from the fixed end (y = 0) to the moving end, z from the bottom of
/// the base upward. All lengths in mm.
struct PneuNetGeometry {
  int n_chambers = 11;
  double chamber_width = 4.0;
  double chamber_height = 10.0;
  double wall_thickness = 2.0;  // interior walls between cavities
  double top_thickness = 2.0;
  double channel_height = 2.0;
  double base_thickness = 3.0;
  double limiting_layer_thickness = 0.3;
  double end_cap_length = 4.0;

  /// Throws ErrorCode::Config naming the violated constraint.
  void validate() const;

  double total_length() const;
  double total_height() const;
};

struct Rect {
  double y0, z0, y1, z1;
  double width() const { return y1 - y0; }
  double height() const { return z1 - z0; }
  double area() const { return width() * height(); }
  bool contains(double y, double z) const {
    return y >= y0 && y <= y1 && z >= z0 && z <= z1;
  }
};

enum class RegionKind { Body, Sealing, Limiting, InteriorWall };

struct RegionTag {
  RegionKind kind = RegionKind::Body;
  int wall_index = -1;

  bool operator==(const RegionTag&) const = default;
};

std::string to_string(const RegionTag& tag);
RegionTag region_tag_from_string(const std::string& name);

/// The solid outline is the bounding rectangle [0,L]x[0,H] minus one
/// rectangular cavity per chamber. The cut plane passes through the
/// interior walls, which run solid from the base to the top cover (the air
/// channel that feeds the chambers lies out of plane; its height still sets
/// where the chamber band starts relative to the nominal wall band). Each
/// cavity is its own hole, so the pressurized boundary is one closed loop
/// per chamber.
struct CrossSection {
  PneuNetGeometry geom;
  double length = 0.0;
  double height = 0.0;
  std::vector<Rect> chambers;      // full cavity height, sealing to cover
  std::vector<Rect> walls;         // n_chambers + 1 strips flanking chambers
  Rect limiting_strip{};           // fabric layer inside the base
  Rect sealing_strip{};            // thin bonding layer at the top of the base
  std::size_t hole_count = 0;      // == n_chambers
  double cavity_area = 0.0;
  double solid_area = 0.0;

  /// Region of a solid point; points inside the cavity report Body and are
  /// never asked for in practice (the mesher only queries solid centroids).
  RegionTag region_at(double y, double z) const;
  bool in_cavity(double y, double z) const;
};

CrossSection build_cross_section(const PneuNetGeometry& geom);

}  // namespace pneusim
