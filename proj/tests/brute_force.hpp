// SPDX-License-Identifier: Apache-2.0
//
// Test-only reference path: expands the received-signal model with explicit
// dense matrix products and no factorization shortcuts. Kept independent of
// the coupling-based implementation it cross-checks.
#pragma once

#include <cmath>

#include "rhsradar/signal_chain.hpp"

namespace rhsradar::testing {

inline SinrReport brute_force_sinr(const Scene& scene, const BeamformerSet& bf) {
  bf.validate(scene);
  const int P = scene.tx_count(), Q = scene.rx_count();
  const int L = scene.n_scatterers(), Lt = scene.n_targets();
  const int Nt = scene.n_tx_elements(), Nr = scene.n_rx_elements();
  const int It = scene.snapshots_tx, Ir = scene.snapshots_rx;

  WaveformSet wf = make_waveforms(P, It, scene.tx_panels[0].n_feeds());
  Eigen::MatrixXd jshift = shift_matrix(0, It, Ir).dense();

  SinrReport rep;
  rep.n_tx = P;
  rep.n_rx = Q;
  rep.n_targets = Lt;
  rep.per_pair.assign(static_cast<size_t>(P) * Q * Lt, 0.0);
  rep.per_target.assign(Lt, 0.0);

  for (int p = 0; p < P; ++p) {
    Eigen::MatrixXcd xp =
        bf.psi_t.segment(p * Nt, Nt).cast<std::complex<double>>().asDiagonal() *
        scene.tx_wg[p].chain() * wf.stacked(p);
    for (int q = 0; q < Q; ++q) {
      Eigen::MatrixXcd cq =
          (bf.psi_r.segment(q * Nr, Nr).cast<std::complex<double>>().asDiagonal() *
           scene.rx_wg[q].chain())
              .transpose();
      // per-scatterer deterministic response energies
      std::vector<double> energy(L);
      for (int l = 0; l < L; ++l) {
        Eigen::VectorXcd aq = steering_vector(
            scene.rx_panels[q], scene.scatterers[l].position, scene.wavelength);
        Eigen::VectorXcd ap = steering_vector(
            scene.tx_panels[p], scene.scatterers[l].position, scene.wavelength);
        Eigen::MatrixXcd apq = aq * ap.transpose();  // N_r x N_t
        Eigen::MatrixXcd y = cq * (apq * xp * jshift.cast<std::complex<double>>());
        energy[l] = y.squaredNorm();
      }
      double noise = scene.noise_power * Ir * cq.squaredNorm();
      for (int lt = 0; lt < Lt; ++lt) {
        double num = scene.pair_variance(p, q, lt) * energy[lt];
        double den = noise;
        for (int l = 0; l < L; ++l)
          if (l != lt) den += scene.pair_variance(p, q, l) * energy[l];
        rep.per_pair[(static_cast<size_t>(p) * Q + q) * Lt + lt] = num / den;
      }
    }
  }
  for (int lt = 0; lt < Lt; ++lt) {
    double acc = 0.0;
    for (int p = 0; p < P; ++p)
      for (int q = 0; q < Q; ++q)
        acc += rep.per_pair[(static_cast<size_t>(p) * Q + q) * Lt + lt];
    rep.per_target[lt] = acc / (P * Q);
  }
  rep.worst_case = *std::min_element(rep.per_target.begin(), rep.per_target.end());
  rep.per_target_db.resize(Lt);
  for (int lt = 0; lt < Lt; ++lt) rep.per_target_db[lt] = db10(rep.per_target[lt]);
  rep.worst_case_db = db10(rep.worst_case);
  return rep;
}

// P, Q <= 2, N <= 4 elements per panel, L <= 3 scatterers. Powers are O(1)
// and the radiated-power bound is slack so random amplitude draws stay
// feasible.
inline Scene random_tiny_scene(Rng& rng) {
  auto pick = [&](int lo, int hi) {
    return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
  };
  Scene s;
  const int P = pick(1, 2), Q = pick(1, 2);
  const int nx = pick(1, 2), ny = pick(1, 2);
  const int feeds = pick(1, 3);
  for (int p = 0; p < P; ++p)
    s.tx_panels.push_back(make_panel(
        nx, ny, 0.01 / 3, feeds,
        Eigen::Vector3d(rng.uniform(), rng.uniform(), 0.0)));
  for (int q = 0; q < Q; ++q)
    s.rx_panels.push_back(make_panel(
        nx, ny, 0.01 / 3, feeds,
        Eigen::Vector3d(1.0 + rng.uniform(), rng.uniform(), 0.0)));
  const int lt = pick(1, 2), lc = pick(0, 1);
  for (int i = 0; i < lt; ++i)
    s.scatterers.push_back({Eigen::Vector3d(2 * rng.uniform(), 1 + rng.uniform(),
                                            1 + rng.uniform()),
                            ScattererKind::Target, 0.5 + rng.uniform(), {}});
  for (int i = 0; i < lc; ++i)
    s.scatterers.push_back({Eigen::Vector3d(2 * rng.uniform(), 1 + rng.uniform(),
                                            1 + rng.uniform()),
                            ScattererKind::Clutter, 0.5 + rng.uniform(), {}});
  s.noise_power = 0.01 * (0.5 + rng.uniform());
  s.p_max = 1e3;
  s.snapshots_tx = std::max(P, pick(2, 6));
  s.snapshots_rx = s.snapshots_tx + pick(0, 2);
  s.rng_seed = rng.word();
  return finalize_scene(std::move(s), std::sqrt(3.0), 5.0);
}

inline BeamformerSet random_feasible_beamformers(const Scene& scene, Rng& rng) {
  BeamformerSet bf;
  bf.psi_t.resize(scene.tx_count() * scene.n_tx_elements());
  bf.psi_r.resize(scene.rx_count() * scene.n_rx_elements());
  for (int i = 0; i < bf.psi_t.size(); ++i) bf.psi_t(i) = 0.05 + 0.9 * rng.uniform();
  for (int i = 0; i < bf.psi_r.size(); ++i) bf.psi_r(i) = 0.05 + 0.9 * rng.uniform();
  for (int p = 0; p < scene.tx_count(); ++p) {
    Eigen::MatrixXd c = power_form(scene, p);
    double pw = bf.psi_t.dot(c * bf.psi_t);
    if (pw > scene.p_max)
      bf.psi_t *= std::sqrt(scene.p_max / pw) * (1 - 1e-12);
  }
  return bf;
}

}  // namespace rhsradar::testing
