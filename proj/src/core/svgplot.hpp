// Copyright (c) 2026 pneusim developers
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "core/fem.hpp"

namespace pneusim {

/// Minimal static-SVG plotting: enough for the campaign figures and the
/// deformed-mesh stress rendering, no interactivity.
class SvgCanvas {
 public:
  SvgCanvas(double width, double height);

  void line(double x1, double y1, double x2, double y2, const std::string& color,
            double stroke_width = 1.0);
  void polyline(const std::vector<std::pair<double, double>>& pts, const std::string& color,
                double stroke_width = 1.0);
  void rect(double x, double y, double w, double h, const std::string& fill,
            const std::string& stroke = "none");
  void circle(double cx, double cy, double r, const std::string& fill);
  void polygon(const std::vector<std::pair<double, double>>& pts, const std::string& fill);
  void text(double x, double y, const std::string& s, double size = 12.0,
            const std::string& anchor = "start", double rotate_deg = 0.0);

  std::string finish() const;
  double width() const { return width_; }
  double height() const { return height_; }

 private:
  double width_, height_;
  std::string body_;
};

/// 1-D data axis -> pixel mapping over [pix_lo, pix_hi].
struct AxisScale {
  double data_lo = 0.0, data_hi = 1.0;
  double pix_lo = 0.0, pix_hi = 1.0;
  double operator()(double v) const {
    return pix_lo + (v - data_lo) / (data_hi - data_lo) * (pix_hi - pix_lo);
  }
};

/// Round tick positions covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target_count = 6);

std::string trial_color(int trial_index_1based);

/// Deformed mesh filled by von Mises stress (MPa color scale); the limiting
/// layer is excluded from the color normalization and drawn gray.
void write_deformed_mesh_svg(const Mesh& mesh, const VecX& displacement,
                             const std::vector<double>& vm_field_kpa,
                             const std::filesystem::path& path);

}  // namespace pneusim
