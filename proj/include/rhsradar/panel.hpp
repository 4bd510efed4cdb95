// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rhsradar {

// One holographic subarray: a regular n_x-by-n_y element grid on a plane
// plus the feed points that launch the reference wave into the waveguide.
// Element ordering is x-major (index n = iy * n_x + ix) and every module
// that consumes element positions relies on that ordering.
struct RhsPanel {
  int n_x = 1;
  int n_y = 1;
  double element_spacing = 0.0;               // meters
  std::vector<Eigen::Vector2d> feed_positions;  // panel-local coordinates
  Eigen::Vector3d center = Eigen::Vector3d::Zero();
  Eigen::Vector3d axis_x = Eigen::Vector3d::UnitX();
  Eigen::Vector3d axis_y = Eigen::Vector3d::UnitY();

  int n_elements() const { return n_x * n_y; }
  int n_feeds() const { return static_cast<int>(feed_positions.size()); }
  Eigen::Vector3d normal() const { return axis_x.cross(axis_y); }

  // throws std::invalid_argument on a violated invariant
  void validate() const;
};

// Waveguide response of one panel: per (element, feed) inherent phase shift
// q = exp(-j 2 pi nu D / lambda) and attenuation gamma = exp(-a D), where D
// is the in-plane feed-to-element distance. The distance matrix is kept so
// invariants can be re-checked.
struct WaveguideResponse {
  Eigen::MatrixXcd q_matrix;      // N x K, unit modulus
  Eigen::MatrixXd gamma_matrix;   // N x K, entries in (0, 1]
  Eigen::MatrixXd distances;      // N x K, meters
  double refractive_index = 1.0;
  double attenuation_factor = 0.0;  // 1/meter
  double wavelength = 0.0;          // meters

  // Q .* Gamma, the chain every signal expression uses
  Eigen::MatrixXcd chain() const {
    return q_matrix.cwiseProduct(gamma_matrix.cast<std::complex<double>>());
  }
};

// Panel-local 2-D element offsets, grid centered on the panel center.
std::vector<Eigen::Vector2d> element_offsets(const RhsPanel& panel);

// World coordinates of every element, x-major order.
std::vector<Eigen::Vector3d> element_positions(const RhsPanel& panel);

// K feeds spread uniformly along the lower grid edge (y = -height/2).
std::vector<Eigen::Vector2d> default_edge_feeds(int n_x, int n_y,
                                                double spacing, int n_feeds);

RhsPanel make_panel(int n_x, int n_y, double spacing, int n_feeds,
                    const Eigen::Vector3d& center,
                    const Eigen::Vector3d& axis_x = Eigen::Vector3d::UnitX(),
                    const Eigen::Vector3d& axis_y = Eigen::Vector3d::UnitY());

WaveguideResponse waveguide_response(const RhsPanel& panel, double wavelength,
                                     double refractive_index,
                                     double attenuation_factor);

}  // namespace rhsradar
