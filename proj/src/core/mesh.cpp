// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "core/csvio.hpp"
#include "core/error.hpp"

namespace pneusim {

double Mesh::element_area(int e) const {
  const Tri6& t = elements[static_cast<std::size_t>(e)];
  const Vec2& a = nodes[static_cast<std::size_t>(t.n[0])];
  const Vec2& b = nodes[static_cast<std::size_t>(t.n[1])];
  const Vec2& c = nodes[static_cast<std::size_t>(t.n[2])];
  return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y()));
}

Vec2 Mesh::element_centroid(int e) const {
  const Tri6& t = elements[static_cast<std::size_t>(e)];
  return (nodes[static_cast<std::size_t>(t.n[0])] + nodes[static_cast<std::size_t>(t.n[1])] +
          nodes[static_cast<std::size_t>(t.n[2])]) /
         3.0;
}

double Mesh::total_area() const {
  double area = 0.0;
  for (int e = 0; e < element_count(); ++e) area += element_area(e);
  return area;
}

namespace {

/// Subdivision of one axis: feature coordinates refined so that every
/// sub-interval is at most target_h long. Structural bands (anything above
/// 1 mm) always get at least two subdivisions so thin bending members carry
/// more than a single element through their thickness at any seed size;
/// the sub-millimetre fabric strips are membrane-dominated and stay single.
std::vector<double> refine_lines(std::vector<double> feature, double target_h) {
  std::sort(feature.begin(), feature.end());
  feature.erase(std::unique(feature.begin(), feature.end(),
                            [](double a, double b) { return std::abs(a - b) < 1e-12; }),
                feature.end());
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < feature.size(); ++i) {
    const double len = feature[i + 1] - feature[i];
    int n = std::max(1, static_cast<int>(std::ceil(len / target_h - 1e-9)));
    if (len > 1.0) n = std::max(n, 2);
    for (int k = 0; k < n; ++k) out.push_back(feature[i] + len * k / n);
  }
  out.push_back(feature.back());
  return out;
}

struct GridMesher {
  const std::vector<double>& ys;
  const std::vector<double>& zs;
  Mesh mesh;
  std::vector<int> corner_id;  // dense grid -> node id, -1 if unused
  std::map<std::pair<int, int>, int> midside;

  GridMesher(const std::vector<double>& y, const std::vector<double>& z) : ys(y), zs(z) {
    corner_id.assign(ys.size() * zs.size(), -1);
  }

  int corner(std::size_t iy, std::size_t iz) {
    int& id = corner_id[iz * ys.size() + iy];
    if (id < 0) {
      id = mesh.node_count();
      mesh.nodes.emplace_back(ys[iy], zs[iz]);
    }
    return id;
  }

  int mid(int a, int b) {
    const auto key = std::minmax(a, b);
    const auto it = midside.find(key);
    if (it != midside.end()) return it->second;
    const int id = mesh.node_count();
    mesh.nodes.emplace_back(
        0.5 * (mesh.nodes[static_cast<std::size_t>(a)] + mesh.nodes[static_cast<std::size_t>(b)]));
    midside.emplace(key, id);
    return id;
  }

  void add_triangle(int a, int b, int c, const RegionTag& tag) {
    Tri6 t{{a, b, c, mid(a, b), mid(b, c), mid(c, a)}};
    mesh.elements.push_back(t);
    mesh.region.push_back(tag);
  }
};

void collect_boundary(Mesh& mesh, double length, double height) {
  // Corner-node edge -> (count, oriented pair, element midside node).
  struct EdgeInfo {
    int count = 0;
    int a = -1, b = -1, mid = -1;
  };
  std::map<std::pair<int, int>, EdgeInfo> edges;
  for (const Tri6& t : mesh.elements) {
    const int corner[3] = {t.n[0], t.n[1], t.n[2]};
    const int mids[3] = {t.n[3], t.n[4], t.n[5]};
    for (int k = 0; k < 3; ++k) {
      const int a = corner[k];
      const int b = corner[(k + 1) % 3];
      EdgeInfo& info = edges[std::minmax(a, b)];
      ++info.count;
      info.a = a;  // CCW element order: solid on the left of a->b
      info.b = b;
      info.mid = mids[k];
    }
  }

  const double tol = 1e-9;
  std::vector<Edge3> pressure;
  for (const auto& [key, info] : edges) {
    if (info.count != 1) continue;
    const Vec2 pa = mesh.nodes[static_cast<std::size_t>(info.a)];
    const Vec2 pb = mesh.nodes[static_cast<std::size_t>(info.b)];
    const Vec2 m = 0.5 * (pa + pb);
    const bool on_outline = m.x() < tol || m.x() > length - tol || m.y() < tol ||
                            m.y() > height - tol;
    if (on_outline)
      mesh.outline_edges.push_back({info.a, info.b, info.mid});
    else
      pressure.push_back({info.a, info.b, info.mid});
  }

  // Chain cavity edges into loops so consumers see them in walk order.
  std::map<int, std::size_t> next_from;
  for (std::size_t i = 0; i < pressure.size(); ++i) next_from[pressure[i].a] = i;
  std::vector<bool> used(pressure.size(), false);
  for (std::size_t start = 0; start < pressure.size(); ++start) {
    if (used[start]) continue;
    std::size_t i = start;
    while (!used[i]) {
      used[i] = true;
      mesh.pressure_edges.push_back(pressure[i]);
      const auto it = next_from.find(pressure[i].b);
      if (it == next_from.end()) break;
      i = it->second;
    }
  }

  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2& p = mesh.nodes[static_cast<std::size_t>(n)];
    if (p.x() < tol) mesh.fixed_end.push_back(n);
    if (p.x() > length - tol) mesh.moving_end.push_back(n);
  }
  if (mesh.fixed_end.empty() || mesh.moving_end.empty())
    raise(ErrorCode::Config, "mesh tagging produced an empty end-face node set");
}

Mesh grid_mesh(const std::vector<double>& ys, const std::vector<double>& zs,
               const std::function<bool(double, double)>& solid,
               const std::function<RegionTag(double, double)>& tag_of) {
  GridMesher gm(ys, zs);
  for (std::size_t iz = 0; iz + 1 < zs.size(); ++iz) {
    for (std::size_t iy = 0; iy + 1 < ys.size(); ++iy) {
      const double cy = 0.5 * (ys[iy] + ys[iy + 1]);
      const double cz = 0.5 * (zs[iz] + zs[iz + 1]);
      if (!solid(cy, cz)) continue;
      const RegionTag tag = tag_of(cy, cz);
      const int p00 = gm.corner(iy, iz);
      const int p10 = gm.corner(iy + 1, iz);
      const int p11 = gm.corner(iy + 1, iz + 1);
      const int p01 = gm.corner(iy, iz + 1);
      if ((iy + iz) % 2 == 0) {
        gm.add_triangle(p00, p10, p11, tag);
        gm.add_triangle(p00, p11, p01, tag);
      } else {
        gm.add_triangle(p00, p10, p01, tag);
        gm.add_triangle(p10, p11, p01, tag);
      }
    }
  }
  return std::move(gm.mesh);
}

}  // namespace

Mesh generate_mesh(const CrossSection& section, double target_h) {
  if (!(target_h > 0.0)) raise(ErrorCode::Config, "mesh: target_h must be positive");
  const PneuNetGeometry& g = section.geom;

  std::vector<double> y_feat = {0.0, g.end_cap_length, section.length - g.end_cap_length,
                                section.length};
  for (const Rect& w : section.walls) {
    y_feat.push_back(w.y0);
    y_feat.push_back(w.y1);
  }
  const double z_base = g.base_thickness;
  std::vector<double> z_feat = {0.0,
                                section.limiting_strip.z0,
                                section.limiting_strip.z1,
                                z_base,
                                z_base + g.channel_height + g.chamber_height,
                                section.height};

  Mesh mesh = grid_mesh(
      refine_lines(y_feat, target_h), refine_lines(z_feat, target_h),
      [&](double y, double z) { return !section.in_cavity(y, z); },
      [&](double y, double z) { return section.region_at(y, z); });
  mesh.length = section.length;
  mesh.height = section.height;

  for (int e = 0; e < mesh.element_count(); ++e)
    if (!(mesh.element_area(e) > 0.0))
      raise(ErrorCode::Internal, "mesh: non-positive element Jacobian");

  collect_boundary(mesh, mesh.length, mesh.height);
  return mesh;
}

Mesh mesh_rectangle(double width, double height, double target_h) {
  if (!(width > 0.0 && height > 0.0 && target_h > 0.0))
    raise(ErrorCode::Config, "mesh_rectangle: dimensions must be positive");
  Mesh mesh = grid_mesh(
      refine_lines({0.0, width}, target_h), refine_lines({0.0, height}, target_h),
      [](double, double) { return true; },
      [](double, double) { return RegionTag{RegionKind::Body, -1}; });
  mesh.length = width;
  mesh.height = height;
  collect_boundary(mesh, width, height);
  return mesh;
}

std::size_t count_pressure_loops(const Mesh& mesh) {
  if (mesh.pressure_edges.empty()) return 0;
  std::map<int, int> next;
  for (const Edge3& e : mesh.pressure_edges) next[e.a] = e.b;
  std::set<int> seen;
  std::size_t loops = 0;
  for (const Edge3& e : mesh.pressure_edges) {
    if (seen.count(e.a)) continue;
    ++loops;
    int n = e.a;
    while (!seen.count(n)) {
      seen.insert(n);
      const auto it = next.find(n);
      if (it == next.end()) break;  // open chain; counted as one component
      n = it->second;
    }
  }
  return loops;
}

void write_mesh(const Mesh& mesh, const std::filesystem::path& path) {
  std::ostringstream out;
  out << "pneusim-mesh v1\n";
  out << "nodes " << mesh.node_count() << "\n";
  for (int i = 0; i < mesh.node_count(); ++i) {
    const Vec2& p = mesh.nodes[static_cast<std::size_t>(i)];
    out << i << " " << format_double(p.x()) << " " << format_double(p.y()) << "\n";
  }
  out << "elements " << mesh.element_count() << "\n";
  for (int e = 0; e < mesh.element_count(); ++e) {
    out << e;
    for (int k = 0; k < 6; ++k) out << " " << mesh.elements[static_cast<std::size_t>(e)].n[k];
    out << " " << to_string(mesh.region[static_cast<std::size_t>(e)]) << "\n";
  }
  const auto write_nodeset = [&](const char* name, const std::vector<int>& ids) {
    out << "nodeset " << name << " " << ids.size() << "\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
      out << ids[i] << (i + 1 == ids.size() ? "\n" : " ");
    if (ids.empty()) out << "\n";
  };
  const auto write_edgeset = [&](const char* name, const std::vector<Edge3>& edges) {
    out << "edgeset " << name << " " << edges.size() << "\n";
    for (const Edge3& e : edges) out << e.a << " " << e.b << " " << e.mid << "\n";
  };
  write_nodeset("fixed_end", mesh.fixed_end);
  write_nodeset("moving_end", mesh.moving_end);
  write_edgeset("pressure_edges", mesh.pressure_edges);
  write_edgeset("outline_edges", mesh.outline_edges);
  write_text_file(path, out.str());
}

Mesh read_mesh(const std::filesystem::path& path) {
  std::istringstream in(read_text_file(path));
  std::string line;
  const auto fail = [&](const std::string& why) -> void {
    raise(ErrorCode::Io, path.string() + ": bad mesh file: " + why);
  };
  if (!std::getline(in, line) || line != "pneusim-mesh v1") fail("missing version header");

  Mesh mesh;
  std::string word;
  std::size_t count = 0;
  in >> word >> count;
  if (word != "nodes") fail("expected 'nodes'");
  mesh.nodes.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    int id = 0;
    double y = 0.0, z = 0.0;
    in >> id >> y >> z;
    mesh.nodes[static_cast<std::size_t>(id)] = Vec2(y, z);
  }
  in >> word >> count;
  if (word != "elements") fail("expected 'elements'");
  mesh.elements.resize(count);
  mesh.region.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    int id = 0;
    Tri6 t{};
    std::string tag;
    in >> id;
    for (int k = 0; k < 6; ++k) in >> t.n[k];
    in >> tag;
    mesh.elements[static_cast<std::size_t>(id)] = t;
    mesh.region[static_cast<std::size_t>(id)] = region_tag_from_string(tag);
  }
  while (in >> word) {
    std::string name;
    in >> name >> count;
    if (word == "nodeset") {
      std::vector<int>& ids = name == "fixed_end" ? mesh.fixed_end : mesh.moving_end;
      ids.resize(count);
      for (std::size_t i = 0; i < count; ++i) in >> ids[i];
    } else if (word == "edgeset") {
      std::vector<Edge3>& edges =
          name == "pressure_edges" ? mesh.pressure_edges : mesh.outline_edges;
      edges.resize(count);
      for (std::size_t i = 0; i < count; ++i) in >> edges[i].a >> edges[i].b >> edges[i].mid;
    } else {
      fail("unexpected section '" + word + "'");
    }
  }
  if (!mesh.nodes.empty()) {
    for (const Vec2& p : mesh.nodes) {
      mesh.length = std::max(mesh.length, p.x());
      mesh.height = std::max(mesh.height, p.y());
    }
  }
  return mesh;
}

}  // namespace pneusim
