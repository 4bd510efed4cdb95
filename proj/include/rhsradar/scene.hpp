// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "rhsradar/panel.hpp"
#include "rhsradar/rng.hpp"

namespace rhsradar {

enum class ScattererKind { Target, Clutter };

struct Scatterer {
  Eigen::Vector3d position = Eigen::Vector3d::Zero();  // meters
  ScattererKind kind = ScattererKind::Target;
  double reflect_var = 1.0;  // variance of the reflection coefficient
  // optional P x Q override, row-major [p * Q + q]
  std::optional<std::vector<double>> per_pair_var;
};

// Immutable world model: panel placements with their waveguide responses,
// scatterers (targets first), and the signal constants. Random draws always
// go through explicit per-trial streams derived from rng_seed.
struct Scene {
  std::vector<RhsPanel> tx_panels;
  std::vector<RhsPanel> rx_panels;
  std::vector<WaveguideResponse> tx_wg;  // parallel to tx_panels
  std::vector<WaveguideResponse> rx_wg;  // parallel to rx_panels
  std::vector<Scatterer> scatterers;     // targets first, then clutters

  double wavelength = 0.01;      // meters
  double carrier = 30e9;         // Hz
  double noise_power = 4e-6;     // sigma_n^2, W
  double p_max = 4e-3;           // per-Tx radiated power bound, W
  int snapshots_tx = 16;         // I_t
  int snapshots_rx = 16;         // I_r
  std::uint64_t rng_seed = 0;

  int tx_count() const { return static_cast<int>(tx_panels.size()); }
  int rx_count() const { return static_cast<int>(rx_panels.size()); }
  int n_tx_elements() const { return tx_panels.empty() ? 0 : tx_panels[0].n_elements(); }
  int n_rx_elements() const { return rx_panels.empty() ? 0 : rx_panels[0].n_elements(); }
  int n_targets() const;
  int n_clutters() const;
  int n_scatterers() const { return static_cast<int>(scatterers.size()); }

  // sigma_{pq}^{l 2}: per-pair override when present, else the scalar variance
  double pair_variance(int p, int q, int l) const;

  void validate() const;
};

// Builds the waveguide responses for every panel and validates.
Scene finalize_scene(Scene scene, double refractive_index, double attenuation);

// Far-field steering vector of `panel` toward `position`: entry n is
// exp(+j 2 pi / lambda * u . r_n) with u the unit direction from the panel
// center and r_n the element offset. Unit modulus by construction.
Eigen::VectorXcd steering_vector(const RhsPanel& panel,
                                 const Eigen::Vector3d& position,
                                 double wavelength);

// P mutually orthonormal waveforms: rows of the unitary I_t-point Fourier
// basis, s_p s_p^H = 1 exactly. The same row is injected into all K feeds.
struct WaveformSet {
  Eigen::MatrixXcd rows;  // P x I_t
  int n_feeds = 1;
  double energy_norm = 1.0;  // 1/sqrt(I_t)

  // K x I_t stack of row p
  Eigen::MatrixXcd stacked(int p) const {
    return Eigen::VectorXcd::Ones(n_feeds) * rows.row(p);
  }
};

WaveformSet make_waveforms(int n_tx, int snapshots, int n_feeds = 1);

// Row n carries its single 1 at column n + delay.
struct ShiftMatrix {
  int rows = 0;   // I_t
  int cols = 0;   // I_r
  int delay = 0;  // d >= 0, d <= I_r - I_t

  Eigen::MatrixXd dense() const;
};

ShiftMatrix shift_matrix(int delay, int snapshots_tx, int snapshots_rx);

// beta_{pq}^l draws, circularly-symmetric complex Gaussian with the scene's
// per-pair variances; flat index ((p * Q) + q) * L + l.
std::vector<std::complex<double>> draw_reflections(const Scene& scene, Rng& rng);

}  // namespace rhsradar
