// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/geometry.hpp"

#include <sstream>

#include "core/error.hpp"

namespace pneusim {

namespace {

void require(bool ok, const std::string& constraint) {
  if (!ok) raise(ErrorCode::Config, "geometry: constraint violated: " + constraint);
}

}  // namespace

void PneuNetGeometry::validate() const {
  require(n_chambers >= 1, "n_chambers >= 1");
  require(chamber_width > 0.0, "chamber_width > 0");
  require(chamber_height > 0.0, "chamber_height > 0");
  require(wall_thickness > 0.0, "wall_thickness > 0");
  require(top_thickness > 0.0, "top_thickness > 0");
  require(channel_height > 0.0, "channel_height > 0");
  require(base_thickness > 0.0, "base_thickness > 0");
  require(limiting_layer_thickness > 0.0, "limiting_layer_thickness > 0");
  require(end_cap_length > 0.0, "end_cap_length > 0");
  require(channel_height < chamber_height, "channel_height < chamber_height");
  // The fabric strip and the sealing strip above it both live inside the base.
  require(2.0 * limiting_layer_thickness < base_thickness,
          "2 * limiting_layer_thickness < base_thickness");
}

double PneuNetGeometry::total_length() const {
  return 2.0 * end_cap_length + (n_chambers + 1) * wall_thickness +
         n_chambers * chamber_width;
}

double PneuNetGeometry::total_height() const {
  return base_thickness + channel_height + chamber_height + top_thickness;
}

std::string to_string(const RegionTag& tag) {
  switch (tag.kind) {
    case RegionKind::Body: return "body";
    case RegionKind::Sealing: return "sealing";
    case RegionKind::Limiting: return "limiting";
    case RegionKind::InteriorWall: return "interior_wall_" + std::to_string(tag.wall_index);
  }
  return "?";
}

RegionTag region_tag_from_string(const std::string& name) {
  if (name == "body") return {RegionKind::Body, -1};
  if (name == "sealing") return {RegionKind::Sealing, -1};
  if (name == "limiting") return {RegionKind::Limiting, -1};
  if (name.rfind("interior_wall_", 0) == 0)
    return {RegionKind::InteriorWall, std::stoi(name.substr(14))};
  raise(ErrorCode::Config, "unknown region tag '" + name + "'");
}

CrossSection build_cross_section(const PneuNetGeometry& geom) {
  geom.validate();
  CrossSection cs;
  cs.geom = geom;
  cs.length = geom.total_length();
  cs.height = geom.total_height();

  const double t = geom.limiting_layer_thickness;
  const double z_base = geom.base_thickness;
  const double z_cavity_top = z_base + geom.channel_height + geom.chamber_height;

  cs.limiting_strip = {0.0, z_base - 2.0 * t, cs.length, z_base - t};
  cs.sealing_strip = {0.0, z_base - t, cs.length, z_base};

  double y = geom.end_cap_length;
  for (int k = 0; k <= geom.n_chambers; ++k) {
    cs.walls.push_back({y, z_base, y + geom.wall_thickness, z_cavity_top});
    y += geom.wall_thickness;
    if (k < geom.n_chambers) {
      cs.chambers.push_back({y, z_base, y + geom.chamber_width, z_cavity_top});
      y += geom.chamber_width;
    }
  }

  cs.hole_count = cs.chambers.size();
  cs.cavity_area = 0.0;
  for (const Rect& c : cs.chambers) cs.cavity_area += c.area();
  cs.solid_area = cs.length * cs.height - cs.cavity_area;
  return cs;
}

bool CrossSection::in_cavity(double y, double z) const {
  for (const Rect& c : chambers)
    if (c.contains(y, z)) return true;
  return false;
}

RegionTag CrossSection::region_at(double y, double z) const {
  if (limiting_strip.contains(y, z)) return {RegionKind::Limiting, -1};
  if (sealing_strip.contains(y, z)) return {RegionKind::Sealing, -1};
  for (std::size_t k = 0; k < walls.size(); ++k)
    if (walls[k].contains(y, z)) return {RegionKind::InteriorWall, static_cast<int>(k)};
  return {RegionKind::Body, -1};
}

}  // namespace pneusim
