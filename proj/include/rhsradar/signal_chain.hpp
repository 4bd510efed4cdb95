// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "rhsradar/scene.hpp"

namespace rhsradar {

// Stacked real amplitude beamformers, psi_t of length P*N_t and psi_r of
// length Q*N_r. Per-panel slices are index ranges into the stack; the
// selection matrices of the signal model are never materialized.
struct BeamformerSet {
  Eigen::VectorXd psi_t;
  Eigen::VectorXd psi_r;

  void validate(const Scene& scene) const;
};

struct SinrReport {
  int n_tx = 0, n_rx = 0, n_targets = 0;
  std::vector<double> per_pair;    // [(p*Q + q)*Lt + lt], linear
  std::vector<double> per_target;  // length Lt, linear
  std::vector<double> per_target_db;
  double worst_case = 0.0;
  double worst_case_db = 0.0;

  double pair(int p, int q, int lt) const {
    return per_pair[(static_cast<size_t>(p) * n_rx + q) * n_targets + lt];
  }
};

// Geometry-only factors of the response chain, built once per scene.
//
// The per-scatterer echo through pair (p, q) factors into a transmit part
// |c_{p,l}^T psi_p|^2 and a receive part ||chain_{q,l} psi_q||^2, where
// c_{p,l}[n] = a_p^l[n] * rowsum(Q_p o Gamma_p)[n] and
// chain_{q,l} = (Q_q o Gamma_q)^T diag(a_q^l). The receive noise passes
// through psi_q^T diag(rho_q) psi_q with rho_q the squared row norms of the
// receive waveguide chain, times sigma_n^2 I_r.
struct SceneCouplings {
  // tx_vec[p][l] : N_t complex
  std::vector<std::vector<Eigen::VectorXcd>> tx_vec;
  // rx_chain[q][l] : K_r x N_r complex
  std::vector<std::vector<Eigen::MatrixXcd>> rx_chain;
  // rx_form[q][l] = rx_chain^H rx_chain : N_r x N_r Hermitian PSD
  std::vector<std::vector<Eigen::MatrixXcd>> rx_form;
  // noise_weight[q] : N_r, strictly positive
  std::vector<Eigen::VectorXd> noise_weight;

  double tx_power(int p, int l, const Eigen::Ref<const Eigen::VectorXd>& psi_p) const;
  double rx_power(int q, int l, const Eigen::Ref<const Eigen::VectorXd>& psi_q) const;
  double rx_noise(int q, const Eigen::Ref<const Eigen::VectorXd>& psi_q) const;
};

SceneCouplings make_couplings(const Scene& scene);

// Signal radiated by one Tx panel: diag(psi) * (Q o Gamma) * S.
Eigen::MatrixXcd tx_radiated(const WaveguideResponse& wg,
                             const Eigen::Ref<const Eigen::VectorXd>& psi,
                             const Eigen::MatrixXcd& injected);

// Matched-filter bank outputs Y_pq (K_r x I_r), flat index p * Q + q.
// `beta` is a (p, q, l) table as produced by draw_reflections. With
// noise_rng == nullptr the noise term is omitted (expectation mode; its
// power is accounted analytically downstream). `delays` optionally gives
// per-(p,q,l) shift offsets, all zero when absent.
std::vector<Eigen::MatrixXcd> matched_filter_output(
    const Scene& scene, const BeamformerSet& bf,
    const std::vector<std::complex<double>>& beta,
    const std::vector<int>* delays = nullptr, Rng* noise_rng = nullptr);

// Expected-SINR evaluator, Eq.-(5)-style ratios with the noise term taken
// in expectation. Throws on an all-zero denominator.
SinrReport sinr_per_pair(const Scene& scene, const BeamformerSet& bf);
SinrReport sinr_per_pair(const Scene& scene, const SceneCouplings& cpl,
                         const BeamformerSet& bf);

// Shared ratio core: given transmit scalars t[p][l], receive scalars
// b[q][l], per-receiver noise quadratics and the per-pair variances.
SinrReport sinr_from_scalars(const Scene& scene,
                             const std::vector<std::vector<double>>& tvals,
                             const std::vector<std::vector<double>>& bvals,
                             const std::vector<double>& noise_quad);

// Radiated-power form C_p: real diagonal PSD, embedded at block p of the
// (P*N_t)^2 matrix; psi^T C_p psi is the power radiated by Tx panel p.
Eigen::MatrixXd power_form(const Scene& scene, int p);
std::vector<Eigen::MatrixXd> power_forms(const Scene& scene);

// Transmit-side quadratic forms (receive side fixed): psi_t^T r_sig psi_t
// is the expected per-scatterer signal power in Y_pq, r_noise the expected
// noise power through the fixed receive chain.
struct TxForms {
  int n_tx = 0, n_rx = 0, n_scatterers = 0, n_targets = 0, dim = 0;
  // [(p*Q + q)*L + l], (P*N_t)^2 Hermitian PSD, block-p support
  std::vector<Eigen::MatrixXcd> r_sig;
  std::vector<double> r_noise;  // [p*Q + q]

  const Eigen::MatrixXcd& sig(int p, int q, int l) const {
    return r_sig[(static_cast<size_t>(p) * n_rx + q) * n_scatterers + l];
  }
  double noise(int p, int q) const { return r_noise[p * n_rx + q]; }
};

// Receive-side quadratic forms (transmit side fixed).
struct RxForms {
  int n_tx = 0, n_rx = 0, n_scatterers = 0, n_targets = 0, dim = 0;
  // [(p*Q + q)*L + l], (Q*N_r)^2 Hermitian PSD, block-q support
  std::vector<Eigen::MatrixXcd> m_sig;
  // [(p*Q + q)*Lt + lt]: interference-plus-noise form for target lt
  std::vector<Eigen::MatrixXcd> m_noise_int;

  const Eigen::MatrixXcd& sig(int p, int q, int l) const {
    return m_sig[(static_cast<size_t>(p) * n_rx + q) * n_scatterers + l];
  }
  const Eigen::MatrixXcd& noise_int(int p, int q, int lt) const {
    return m_noise_int[(static_cast<size_t>(p) * n_rx + q) * n_targets + lt];
  }
};

TxForms transmit_forms(const Scene& scene, const Eigen::VectorXd& psi_r);
RxForms receive_forms(const Scene& scene, const Eigen::VectorXd& psi_t);

// Variants coupling against a lifted PSD matrix ((Q*N_r+1)^2 resp.
// (P*N_t+1)^2, homogenization slot last) instead of a rank-one vector;
// used by the alternation so the relaxed objective chains exactly.
TxForms transmit_forms_lifted(const Scene& scene, const SceneCouplings& cpl,
                              const Eigen::MatrixXd& lifted_rx);
RxForms receive_forms_lifted(const Scene& scene, const SceneCouplings& cpl,
                             const Eigen::MatrixXd& lifted_tx);

// Coupling scalars evaluated against a lifted matrix (border ignored).
std::vector<std::vector<double>> tx_scalars_lifted(const Scene& scene,
                                                   const SceneCouplings& cpl,
                                                   const Eigen::MatrixXd& lifted_tx);
std::vector<std::vector<double>> rx_scalars_lifted(const Scene& scene,
                                                   const SceneCouplings& cpl,
                                                   const Eigen::MatrixXd& lifted_rx);
std::vector<double> rx_noise_lifted(const Scene& scene, const SceneCouplings& cpl,
                                    const Eigen::MatrixXd& lifted_rx);

double db10(double linear);

}  // namespace rhsradar
