// SPDX-License-Identifier: Apache-2.0
#include "rhsradar/scene.hpp"

#include <cmath>
#include <stdexcept>

namespace rhsradar {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

int Scene::n_targets() const {
  int n = 0;
  for (const auto& s : scatterers)
    if (s.kind == ScattererKind::Target) ++n;
  return n;
}

int Scene::n_clutters() const { return n_scatterers() - n_targets(); }

double Scene::pair_variance(int p, int q, int l) const {
  const auto& s = scatterers.at(l);
  if (s.per_pair_var) return (*s.per_pair_var)[p * rx_count() + q];
  return s.reflect_var;
}

void Scene::validate() const {
  require(!tx_panels.empty() && !rx_panels.empty(),
          "scene: need at least one Tx and one Rx subarray");
  require(n_targets() >= 1, "scene: need at least one target");
  require(noise_power > 0.0, "scene: noise power must be positive");
  require(p_max > 0.0, "scene: radiated power bound must be positive");
  require(wavelength > 0.0, "scene: wavelength must be positive");
  require(snapshots_tx >= tx_count(),
          "scene: insufficient snapshots for orthogonality (I_t < P)");
  require(snapshots_rx >= snapshots_tx, "scene: I_r must be >= I_t");
  require(tx_wg.size() == tx_panels.size() && rx_wg.size() == rx_panels.size(),
          "scene: waveguide responses missing (call finalize_scene)");

  // targets must come first
  bool seen_clutter = false;
  for (const auto& s : scatterers) {
    if (s.kind == ScattererKind::Clutter) seen_clutter = true;
    else require(!seen_clutter, "scene: targets must precede clutters");
    require(s.reflect_var > 0.0, "scene: reflection variance must be positive");
    if (s.per_pair_var) {
      require(static_cast<int>(s.per_pair_var->size()) == tx_count() * rx_count(),
              "scene: per-pair variance table has wrong shape");
      for (double v : *s.per_pair_var)
        require(v > 0.0, "scene: per-pair variance must be positive");
    }
  }
  for (const auto& p : tx_panels) p.validate();
  for (const auto& p : rx_panels) p.validate();
}

Scene finalize_scene(Scene scene, double refractive_index, double attenuation) {
  scene.tx_wg.clear();
  scene.rx_wg.clear();
  for (const auto& p : scene.tx_panels)
    scene.tx_wg.push_back(
        waveguide_response(p, scene.wavelength, refractive_index, attenuation));
  for (const auto& p : scene.rx_panels)
    scene.rx_wg.push_back(
        waveguide_response(p, scene.wavelength, refractive_index, attenuation));
  scene.validate();
  return scene;
}

Eigen::VectorXcd steering_vector(const RhsPanel& panel,
                                 const Eigen::Vector3d& position,
                                 double wavelength) {
  require(wavelength > 0.0, "steering: wavelength must be positive");
  Eigen::Vector3d diff = position - panel.center;
  double range = diff.norm();
  if (!(range > 1e-12))
    throw std::invalid_argument("steering: degenerate geometry (zero range)");
  Eigen::Vector3d u = diff / range;

  const auto offsets = element_offsets(panel);
  const double k0 = 2.0 * M_PI / wavelength;
  Eigen::VectorXcd a(static_cast<int>(offsets.size()));
  for (size_t n = 0; n < offsets.size(); ++n) {
    Eigen::Vector3d r = offsets[n].x() * panel.axis_x + offsets[n].y() * panel.axis_y;
    a(static_cast<int>(n)) = std::polar(1.0, k0 * u.dot(r));
  }
  return a;
}

WaveformSet make_waveforms(int n_tx, int snapshots, int n_feeds) {
  if (snapshots < n_tx)
    throw std::invalid_argument(
        "waveforms: insufficient snapshots for orthogonality");
  WaveformSet w;
  w.n_feeds = n_feeds;
  w.energy_norm = 1.0 / std::sqrt(static_cast<double>(snapshots));
  w.rows.resize(n_tx, snapshots);
  for (int p = 0; p < n_tx; ++p)
    for (int i = 0; i < snapshots; ++i)
      w.rows(p, i) =
          std::polar(w.energy_norm, -2.0 * M_PI * p * i / snapshots);
  return w;
}

Eigen::MatrixXd ShiftMatrix::dense() const {
  Eigen::MatrixXd j = Eigen::MatrixXd::Zero(rows, cols);
  for (int n = 0; n < rows; ++n) j(n, n + delay) = 1.0;
  return j;
}

ShiftMatrix shift_matrix(int delay, int snapshots_tx, int snapshots_rx) {
  if (delay < 0 || delay > snapshots_rx - snapshots_tx)
    throw std::invalid_argument("shift: delay out of range");
  return ShiftMatrix{snapshots_tx, snapshots_rx, delay};
}

std::vector<std::complex<double>> draw_reflections(const Scene& scene, Rng& rng) {
  const int P = scene.tx_count(), Q = scene.rx_count(), L = scene.n_scatterers();
  std::vector<std::complex<double>> beta(static_cast<size_t>(P) * Q * L);
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < Q; ++q)
      for (int l = 0; l < L; ++l)
        beta[(static_cast<size_t>(p) * Q + q) * L + l] =
            rng.cnormal(scene.pair_variance(p, q, l));
  return beta;
}

}  // namespace rhsradar
