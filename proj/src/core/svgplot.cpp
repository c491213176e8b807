// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#include "core/svgplot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/csvio.hpp"

namespace pneusim {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

}  // namespace

SvgCanvas::SvgCanvas(double width, double height) : width_(width), height_(height) {}

void SvgCanvas::line(double x1, double y1, double x2, double y2, const std::string& color,
                     double stroke_width) {
  body_ += "<line x1='" + fmt(x1) + "' y1='" + fmt(y1) + "' x2='" + fmt(x2) + "' y2='" +
           fmt(y2) + "' stroke='" + color + "' stroke-width='" + fmt(stroke_width) + "'/>\n";
}

void SvgCanvas::polyline(const std::vector<std::pair<double, double>>& pts,
                         const std::string& color, double stroke_width) {
  if (pts.size() < 2) return;
  body_ += "<polyline fill='none' stroke='" + color + "' stroke-width='" + fmt(stroke_width) +
           "' points='";
  for (const auto& [x, y] : pts) body_ += fmt(x) + "," + fmt(y) + " ";
  body_ += "'/>\n";
}

void SvgCanvas::rect(double x, double y, double w, double h, const std::string& fill,
                     const std::string& stroke) {
  body_ += "<rect x='" + fmt(x) + "' y='" + fmt(y) + "' width='" + fmt(w) + "' height='" +
           fmt(h) + "' fill='" + fill + "' stroke='" + stroke + "'/>\n";
}

void SvgCanvas::circle(double cx, double cy, double r, const std::string& fill) {
  body_ += "<circle cx='" + fmt(cx) + "' cy='" + fmt(cy) + "' r='" + fmt(r) + "' fill='" +
           fill + "'/>\n";
}

void SvgCanvas::polygon(const std::vector<std::pair<double, double>>& pts,
                        const std::string& fill) {
  body_ += "<polygon fill='" + fill + "' stroke='none' points='";
  for (const auto& [x, y] : pts) body_ += fmt(x) + "," + fmt(y) + " ";
  body_ += "'/>\n";
}

void SvgCanvas::text(double x, double y, const std::string& s, double size,
                     const std::string& anchor, double rotate_deg) {
  body_ += "<text x='" + fmt(x) + "' y='" + fmt(y) + "' font-family='sans-serif' font-size='" +
           fmt(size) + "' text-anchor='" + anchor + "'";
  if (rotate_deg != 0.0)
    body_ += " transform='rotate(" + fmt(rotate_deg) + " " + fmt(x) + " " + fmt(y) + ")'";
  body_ += ">" + s + "</text>\n";
}

std::string SvgCanvas::finish() const {
  std::ostringstream out;
  out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width_ << "' height='" << height_
      << "' viewBox='0 0 " << width_ << " " << height_ << "'>\n"
      << "<rect width='100%' height='100%' fill='white'/>\n"
      << body_ << "</svg>\n";
  return out.str();
}

std::vector<double> nice_ticks(double lo, double hi, int target_count) {
  if (!(hi > lo)) return {lo};
  const double raw = (hi - lo) / std::max(1, target_count - 1);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0}) {
    if (mag * m >= raw) {
      step = mag * m;
      break;
    }
  }
  std::vector<double> ticks;
  for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step)
    ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
  return ticks;
}

std::string trial_color(int trial_index_1based) {
  static const char* kPalette[10] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
                                     "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  return kPalette[(trial_index_1based - 1) % 10];
}

namespace {

std::string heat_color(double t) {
  // Blue -> cyan -> green -> yellow -> red, like a stress fringe plot.
  t = std::clamp(t, 0.0, 1.0);
  const double stops[5][3] = {
      {0.00, 0.15, 0.70}, {0.00, 0.75, 0.95}, {0.10, 0.75, 0.15},
      {0.98, 0.90, 0.10}, {0.85, 0.05, 0.05}};
  const double x = t * 4.0;
  const int i = std::min(3, static_cast<int>(x));
  const double f = x - i;
  char buf[8];
  std::string out = "#";
  for (int c = 0; c < 3; ++c) {
    const int v =
        static_cast<int>(std::lround(255.0 * ((1.0 - f) * stops[i][c] + f * stops[i + 1][c])));
    std::snprintf(buf, sizeof(buf), "%02x", std::clamp(v, 0, 255));
    out += buf;
  }
  return out;
}

}  // namespace

void write_deformed_mesh_svg(const Mesh& mesh, const VecX& displacement,
                             const std::vector<double>& vm_field_kpa,
                             const std::filesystem::path& path) {
  const auto deformed = [&](int n) {
    return Vec2(mesh.nodes[static_cast<std::size_t>(n)](0) + displacement(2 * n),
                mesh.nodes[static_cast<std::size_t>(n)](1) + displacement(2 * n + 1));
  };
  double min_y = 1e300, max_y = -1e300, min_z = 1e300, max_z = -1e300;
  for (int n = 0; n < mesh.node_count(); ++n) {
    const Vec2 p = deformed(n);
    min_y = std::min(min_y, p(0));
    max_y = std::max(max_y, p(0));
    min_z = std::min(min_z, p(1));
    max_z = std::max(max_z, p(1));
  }
  double vm_max = 0.0;
  for (std::size_t e = 0; e < vm_field_kpa.size(); ++e)
    if (mesh.region[e].kind != RegionKind::Limiting) vm_max = std::max(vm_max, vm_field_kpa[e]);
  if (vm_max <= 0.0) vm_max = 1.0;

  const double margin = 40.0;
  const double span_y = std::max(max_y - min_y, 1e-9);
  const double span_z = std::max(max_z - min_z, 1e-9);
  const double scale = std::min(760.0 / span_y, 560.0 / span_z);
  SvgCanvas svg(span_y * scale + 2 * margin, span_z * scale + 2 * margin + 30.0);
  const auto px = [&](const Vec2& p) {
    return std::pair<double, double>{margin + (p(0) - min_y) * scale,
                                     margin + (max_z - p(1)) * scale};
  };

  for (int e = 0; e < mesh.element_count(); ++e) {
    const Tri6& t = mesh.elements[static_cast<std::size_t>(e)];
    const std::vector<std::pair<double, double>> pts = {
        px(deformed(t.n[0])), px(deformed(t.n[1])), px(deformed(t.n[2]))};
    const bool limiting = mesh.region[static_cast<std::size_t>(e)].kind == RegionKind::Limiting;
    svg.polygon(pts, limiting ? "#b0b0b0"
                              : heat_color(vm_field_kpa[static_cast<std::size_t>(e)] / vm_max));
  }

  // Color bar (MPa; the limiting layer is excluded from the scale).
  const double bar_x = margin, bar_y = svg.height() - 24.0, bar_w = 240.0, bar_h = 10.0;
  for (int i = 0; i < 60; ++i)
    svg.rect(bar_x + bar_w * i / 60.0, bar_y, bar_w / 60.0 + 0.5, bar_h,
             heat_color((i + 0.5) / 60.0));
  svg.text(bar_x, bar_y - 4.0, "0", 11.0);
  char label[64];
  std::snprintf(label, sizeof(label), "%.3g MPa (von Mises)", vm_max * 1e-3);
  svg.text(bar_x + bar_w + 6.0, bar_y + bar_h - 1.0, label, 11.0);
  write_text_file(path, svg.finish());
}

}  // namespace pneusim
