// SPDX-License-Identifier: Apache-2.0
#include "rhsradar/panel.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace rhsradar {

namespace {
constexpr double kOrthoTol = 1e-12;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

void RhsPanel::validate() const {
  require(n_x >= 1 && n_y >= 1, "panel: element counts must be >= 1");
  require(n_feeds() >= 1, "panel: at least one feed required");
  require(element_spacing > 0.0, "panel: element spacing must be positive");
  require(center.allFinite() && axis_x.allFinite() && axis_y.allFinite(),
          "panel: non-finite geometry");
  require(std::abs(axis_x.norm() - 1.0) <= kOrthoTol &&
              std::abs(axis_y.norm() - 1.0) <= kOrthoTol,
          "panel: orientation axes must be unit length");
  require(std::abs(axis_x.dot(axis_y)) <= kOrthoTol,
          "panel: orientation axes must be orthogonal");

  // feeds must lie inside the bounding rectangle of the element grid
  const double half_w = 0.5 * (n_x - 1) * element_spacing;
  const double half_h = 0.5 * (n_y - 1) * element_spacing;
  const double slack = 1e-9 * std::max(1.0, element_spacing);
  for (const auto& f : feed_positions) {
    require(f.allFinite(), "panel: non-finite feed position");
    require(std::abs(f.x()) <= half_w + slack && std::abs(f.y()) <= half_h + slack,
            "panel: feed outside the element bounding rectangle");
  }
}

std::vector<Eigen::Vector2d> element_offsets(const RhsPanel& panel) {
  std::vector<Eigen::Vector2d> out;
  out.reserve(panel.n_elements());
  const double d = panel.element_spacing;
  const double x0 = -0.5 * (panel.n_x - 1) * d;
  const double y0 = -0.5 * (panel.n_y - 1) * d;
  for (int iy = 0; iy < panel.n_y; ++iy)
    for (int ix = 0; ix < panel.n_x; ++ix)
      out.emplace_back(x0 + ix * d, y0 + iy * d);
  return out;
}

std::vector<Eigen::Vector3d> element_positions(const RhsPanel& panel) {
  panel.validate();
  std::vector<Eigen::Vector3d> out;
  out.reserve(panel.n_elements());
  for (const auto& r : element_offsets(panel))
    out.push_back(panel.center + r.x() * panel.axis_x + r.y() * panel.axis_y);
  return out;
}

std::vector<Eigen::Vector2d> default_edge_feeds(int n_x, int n_y,
                                                double spacing, int n_feeds) {
  std::vector<Eigen::Vector2d> feeds;
  feeds.reserve(n_feeds);
  const double width = (n_x - 1) * spacing;
  const double y = -0.5 * (n_y - 1) * spacing;
  for (int k = 0; k < n_feeds; ++k) {
    double frac = (k + 0.5) / n_feeds - 0.5;
    feeds.emplace_back(frac * width, y);
  }
  return feeds;
}

RhsPanel make_panel(int n_x, int n_y, double spacing, int n_feeds,
                    const Eigen::Vector3d& center, const Eigen::Vector3d& axis_x,
                    const Eigen::Vector3d& axis_y) {
  RhsPanel p;
  p.n_x = n_x;
  p.n_y = n_y;
  p.element_spacing = spacing;
  p.feed_positions = default_edge_feeds(n_x, n_y, spacing, n_feeds);
  p.center = center;
  p.axis_x = axis_x;
  p.axis_y = axis_y;
  p.validate();
  return p;
}

WaveguideResponse waveguide_response(const RhsPanel& panel, double wavelength,
                                     double refractive_index,
                                     double attenuation_factor) {
  panel.validate();
  require(std::isfinite(wavelength) && wavelength > 0.0,
          "waveguide: wavelength must be positive");
  require(std::isfinite(refractive_index) && std::isfinite(attenuation_factor) &&
              attenuation_factor >= 0.0,
          "waveguide: non-finite parameters");

  const auto offsets = element_offsets(panel);
  const int n = panel.n_elements();
  const int k = panel.n_feeds();

  WaveguideResponse r;
  r.q_matrix.resize(n, k);
  r.gamma_matrix.resize(n, k);
  r.distances.resize(n, k);
  r.refractive_index = refractive_index;
  r.attenuation_factor = attenuation_factor;
  r.wavelength = wavelength;

  const double phase_rate = 2.0 * M_PI * refractive_index / wavelength;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < k; ++j) {
      double d = (offsets[i] - panel.feed_positions[j]).norm();
      r.distances(i, j) = d;
      r.gamma_matrix(i, j) = std::exp(-attenuation_factor * d);
      r.q_matrix(i, j) = std::polar(1.0, -phase_rate * d);
    }
  }
  return r;
}

}  // namespace rhsradar
