// SPDX-License-Identifier: Apache-2.0
#include "rhsradar/signal_chain.hpp"

#include <cmath>
#include <stdexcept>

namespace rhsradar {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// real part of tr(H * core) for Hermitian H and real symmetric core
double trace_against(const Eigen::MatrixXcd& h,
                     const Eigen::Ref<const Eigen::MatrixXd>& core) {
  return h.real().cwiseProduct(core).sum();
}

}  // namespace

double db10(double linear) { return 10.0 * std::log10(linear); }

void BeamformerSet::validate(const Scene& scene) const {
  require(psi_t.size() == scene.tx_count() * scene.n_tx_elements(),
          "beamformers: psi_t has wrong length");
  require(psi_r.size() == scene.rx_count() * scene.n_rx_elements(),
          "beamformers: psi_r has wrong length");
  for (int i = 0; i < psi_t.size(); ++i)
    require(psi_t(i) >= 0.0 && psi_t(i) <= 1.0, "beamformers: psi_t out of [0,1]");
  for (int i = 0; i < psi_r.size(); ++i)
    require(psi_r(i) >= 0.0 && psi_r(i) <= 1.0, "beamformers: psi_r out of [0,1]");
}

double SceneCouplings::tx_power(int p, int l,
                                const Eigen::Ref<const Eigen::VectorXd>& psi_p) const {
  std::complex<double> z = tx_vec[p][l].transpose() * psi_p.cast<std::complex<double>>();
  return std::norm(z);
}

double SceneCouplings::rx_power(int q, int l,
                                const Eigen::Ref<const Eigen::VectorXd>& psi_q) const {
  return (rx_chain[q][l] * psi_q.cast<std::complex<double>>()).squaredNorm();
}

double SceneCouplings::rx_noise(int q,
                                const Eigen::Ref<const Eigen::VectorXd>& psi_q) const {
  return psi_q.cwiseAbs2().dot(noise_weight[q]);
}

SceneCouplings make_couplings(const Scene& scene) {
  scene.validate();
  const int P = scene.tx_count(), Q = scene.rx_count(), L = scene.n_scatterers();
  SceneCouplings c;
  c.tx_vec.resize(P);
  c.rx_chain.resize(Q);
  c.rx_form.resize(Q);
  c.noise_weight.resize(Q);

  for (int p = 0; p < P; ++p) {
    Eigen::VectorXcd rowsum = scene.tx_wg[p].chain().rowwise().sum();
    c.tx_vec[p].resize(L);
    for (int l = 0; l < L; ++l) {
      Eigen::VectorXcd a = steering_vector(scene.tx_panels[p],
                                           scene.scatterers[l].position,
                                           scene.wavelength);
      c.tx_vec[p][l] = a.cwiseProduct(rowsum);
    }
  }
  for (int q = 0; q < Q; ++q) {
    Eigen::MatrixXcd g = scene.rx_wg[q].chain();
    c.noise_weight[q] = g.cwiseAbs2().rowwise().sum();
    c.rx_chain[q].resize(L);
    c.rx_form[q].resize(L);
    for (int l = 0; l < L; ++l) {
      Eigen::VectorXcd a = steering_vector(scene.rx_panels[q],
                                           scene.scatterers[l].position,
                                           scene.wavelength);
      Eigen::MatrixXcd chain = g.transpose() * a.asDiagonal();
      c.rx_chain[q][l] = chain;
      c.rx_form[q][l] = chain.adjoint() * chain;
    }
  }
  return c;
}

Eigen::MatrixXcd tx_radiated(const WaveguideResponse& wg,
                             const Eigen::Ref<const Eigen::VectorXd>& psi,
                             const Eigen::MatrixXcd& injected) {
  require(psi.size() == wg.q_matrix.rows(), "tx_radiated: psi length mismatch");
  require(injected.rows() == wg.q_matrix.cols(),
          "tx_radiated: injected signal has wrong feed count");
  for (int i = 0; i < psi.size(); ++i)
    require(psi(i) >= 0.0 && psi(i) <= 1.0, "tx_radiated: psi out of [0,1]");
  return psi.cast<std::complex<double>>().asDiagonal() * (wg.chain() * injected);
}

std::vector<Eigen::MatrixXcd> matched_filter_output(
    const Scene& scene, const BeamformerSet& bf,
    const std::vector<std::complex<double>>& beta,
    const std::vector<int>* delays, Rng* noise_rng) {
  bf.validate(scene);
  const int P = scene.tx_count(), Q = scene.rx_count(), L = scene.n_scatterers();
  const int Nt = scene.n_tx_elements(), Nr = scene.n_rx_elements();
  const int It = scene.snapshots_tx, Ir = scene.snapshots_rx;
  require(static_cast<int>(beta.size()) == P * Q * L,
          "matched_filter_output: beta table has wrong shape");

  WaveformSet wf = make_waveforms(P, It, scene.tx_panels[0].n_feeds());

  std::vector<Eigen::MatrixXcd> out;
  out.reserve(static_cast<size_t>(P) * Q);
  for (int p = 0; p < P; ++p) {
    Eigen::MatrixXcd xp = tx_radiated(scene.tx_wg[p],
                                      bf.psi_t.segment(p * Nt, Nt), wf.stacked(p));
    for (int q = 0; q < Q; ++q) {
      Eigen::MatrixXcd rx_chain =
          (bf.psi_r.segment(q * Nr, Nr).cast<std::complex<double>>().asDiagonal() *
           scene.rx_wg[q].chain())
              .transpose();  // K_r x N_r
      Eigen::MatrixXcd v = Eigen::MatrixXcd::Zero(Nr, Ir);
      for (int l = 0; l < L; ++l) {
        int d = delays ? (*delays)[(static_cast<size_t>(p) * Q + q) * L + l] : 0;
        ShiftMatrix j = shift_matrix(d, It, Ir);
        Eigen::VectorXcd aq = steering_vector(scene.rx_panels[q],
                                              scene.scatterers[l].position,
                                              scene.wavelength);
        Eigen::VectorXcd ap = steering_vector(scene.tx_panels[p],
                                              scene.scatterers[l].position,
                                              scene.wavelength);
        // A_pq^l X_p J without forming the N_r x N_t outer product
        Eigen::RowVectorXcd row = ap.transpose() * xp;  // 1 x I_t
        Eigen::RowVectorXcd shifted = Eigen::RowVectorXcd::Zero(Ir);
        shifted.segment(j.delay, It) = row;
        std::complex<double> b = beta[(static_cast<size_t>(p) * Q + q) * L + l];
        v.noalias() += b * (aq * shifted);
      }
      if (noise_rng) {
        for (int n = 0; n < Nr; ++n)
          for (int i = 0; i < Ir; ++i)
            v(n, i) += noise_rng->cnormal(scene.noise_power);
      }
      out.push_back(rx_chain * v);
    }
  }
  return out;
}

SinrReport sinr_from_scalars(const Scene& scene,
                             const std::vector<std::vector<double>>& tvals,
                             const std::vector<std::vector<double>>& bvals,
                             const std::vector<double>& noise_quad) {
  const int P = scene.tx_count(), Q = scene.rx_count();
  const int L = scene.n_scatterers(), Lt = scene.n_targets();
  const double noise_scale = scene.noise_power * scene.snapshots_rx;

  SinrReport rep;
  rep.n_tx = P;
  rep.n_rx = Q;
  rep.n_targets = Lt;
  rep.per_pair.assign(static_cast<size_t>(P) * Q * Lt, 0.0);
  rep.per_target.assign(Lt, 0.0);

  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < Q; ++q) {
      for (int lt = 0; lt < Lt; ++lt) {
        double num = scene.pair_variance(p, q, lt) * tvals[p][lt] * bvals[q][lt];
        double den = noise_scale * noise_quad[q];
        for (int l = 0; l < L; ++l) {
          if (l == lt) continue;
          den += scene.pair_variance(p, q, l) * tvals[p][l] * bvals[q][l];
        }
        if (!(den > 0.0))
          throw std::domain_error("sinr: degenerate receive chain");
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

SinrReport sinr_per_pair(const Scene& scene, const SceneCouplings& cpl,
                         const BeamformerSet& bf) {
  bf.validate(scene);
  const int P = scene.tx_count(), Q = scene.rx_count(), L = scene.n_scatterers();
  const int Nt = scene.n_tx_elements(), Nr = scene.n_rx_elements();

  std::vector<std::vector<double>> tvals(P, std::vector<double>(L));
  std::vector<std::vector<double>> bvals(Q, std::vector<double>(L));
  std::vector<double> noise(Q);
  for (int p = 0; p < P; ++p)
    for (int l = 0; l < L; ++l)
      tvals[p][l] = cpl.tx_power(p, l, bf.psi_t.segment(p * Nt, Nt));
  for (int q = 0; q < Q; ++q) {
    noise[q] = cpl.rx_noise(q, bf.psi_r.segment(q * Nr, Nr));
    for (int l = 0; l < L; ++l)
      bvals[q][l] = cpl.rx_power(q, l, bf.psi_r.segment(q * Nr, Nr));
  }
  return sinr_from_scalars(scene, tvals, bvals, noise);
}

SinrReport sinr_per_pair(const Scene& scene, const BeamformerSet& bf) {
  return sinr_per_pair(scene, make_couplings(scene), bf);
}

Eigen::MatrixXd power_form(const Scene& scene, int p) {
  const int P = scene.tx_count(), Nt = scene.n_tx_elements();
  require(p >= 0 && p < P, "power_form: panel index out of range");
  Eigen::VectorXcd rowsum = scene.tx_wg[p].chain().rowwise().sum();
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(P * Nt, P * Nt);
  for (int n = 0; n < Nt; ++n)
    c(p * Nt + n, p * Nt + n) = std::norm(rowsum(n));
  return c;
}

std::vector<Eigen::MatrixXd> power_forms(const Scene& scene) {
  std::vector<Eigen::MatrixXd> out;
  for (int p = 0; p < scene.tx_count(); ++p) out.push_back(power_form(scene, p));
  return out;
}

namespace {

TxForms build_tx_forms(const Scene& scene, const SceneCouplings& cpl,
                       const std::vector<std::vector<double>>& bvals,
                       const std::vector<double>& noise_quad) {
  const int P = scene.tx_count(), Q = scene.rx_count(), L = scene.n_scatterers();
  const int Nt = scene.n_tx_elements();
  TxForms f;
  f.n_tx = P;
  f.n_rx = Q;
  f.n_scatterers = L;
  f.n_targets = scene.n_targets();
  f.dim = P * Nt;
  f.r_sig.resize(static_cast<size_t>(P) * Q * L);
  f.r_noise.resize(static_cast<size_t>(P) * Q);
  const double noise_scale = scene.noise_power * scene.snapshots_rx;

  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < Q; ++q) {
      f.r_noise[p * Q + q] = noise_scale * noise_quad[q];
      for (int l = 0; l < L; ++l) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(f.dim, f.dim);
        double w = scene.pair_variance(p, q, l) * bvals[q][l];
        m.block(p * Nt, p * Nt, Nt, Nt) =
            w * (cpl.tx_vec[p][l] * cpl.tx_vec[p][l].adjoint());
        f.r_sig[(static_cast<size_t>(p) * Q + q) * L + l] = std::move(m);
      }
    }
  }
  return f;
}

RxForms build_rx_forms(const Scene& scene, const SceneCouplings& cpl,
                       const std::vector<std::vector<double>>& tvals) {
  const int P = scene.tx_count(), Q = scene.rx_count(), L = scene.n_scatterers();
  const int Lt = scene.n_targets(), Nr = scene.n_rx_elements();
  RxForms f;
  f.n_tx = P;
  f.n_rx = Q;
  f.n_scatterers = L;
  f.n_targets = Lt;
  f.dim = Q * Nr;
  f.m_sig.resize(static_cast<size_t>(P) * Q * L);
  f.m_noise_int.resize(static_cast<size_t>(P) * Q * Lt);
  const double noise_scale = scene.noise_power * scene.snapshots_rx;

  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < Q; ++q) {
      for (int l = 0; l < L; ++l) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(f.dim, f.dim);
        double w = scene.pair_variance(p, q, l) * tvals[p][l];
        m.block(q * Nr, q * Nr, Nr, Nr) = w * cpl.rx_form[q][l];
        f.m_sig[(static_cast<size_t>(p) * Q + q) * L + l] = std::move(m);
      }
      for (int lt = 0; lt < Lt; ++lt) {
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(f.dim, f.dim);
        for (int l = 0; l < L; ++l) {
          if (l == lt) continue;
          m += f.m_sig[(static_cast<size_t>(p) * Q + q) * L + l];
        }
        m.block(q * Nr, q * Nr, Nr, Nr) +=
            (noise_scale * cpl.noise_weight[q]).asDiagonal().toDenseMatrix()
                .cast<std::complex<double>>();
        f.m_noise_int[(static_cast<size_t>(p) * Q + q) * Lt + lt] = std::move(m);
      }
    }
  }
  return f;
}

}  // namespace

TxForms transmit_forms(const Scene& scene, const Eigen::VectorXd& psi_r) {
  const int Q = scene.rx_count(), Nr = scene.n_rx_elements(), L = scene.n_scatterers();
  require(psi_r.size() == Q * Nr, "transmit_forms: psi_r length mismatch");
  SceneCouplings cpl = make_couplings(scene);
  std::vector<std::vector<double>> bvals(Q, std::vector<double>(L));
  std::vector<double> noise(Q);
  for (int q = 0; q < Q; ++q) {
    noise[q] = cpl.rx_noise(q, psi_r.segment(q * Nr, Nr));
    for (int l = 0; l < L; ++l)
      bvals[q][l] = cpl.rx_power(q, l, psi_r.segment(q * Nr, Nr));
  }
  return build_tx_forms(scene, cpl, bvals, noise);
}

RxForms receive_forms(const Scene& scene, const Eigen::VectorXd& psi_t) {
  const int P = scene.tx_count(), Nt = scene.n_tx_elements(), L = scene.n_scatterers();
  require(psi_t.size() == P * Nt, "receive_forms: psi_t length mismatch");
  SceneCouplings cpl = make_couplings(scene);
  std::vector<std::vector<double>> tvals(P, std::vector<double>(L));
  for (int p = 0; p < P; ++p)
    for (int l = 0; l < L; ++l)
      tvals[p][l] = cpl.tx_power(p, l, psi_t.segment(p * Nt, Nt));
  return build_rx_forms(scene, cpl, tvals);
}

std::vector<std::vector<double>> tx_scalars_lifted(const Scene& scene,
                                                   const SceneCouplings& cpl,
                                                   const Eigen::MatrixXd& lifted_tx) {
  const int P = scene.tx_count(), Nt = scene.n_tx_elements(), L = scene.n_scatterers();
  require(lifted_tx.rows() == P * Nt + 1, "tx_scalars_lifted: wrong lifted dim");
  std::vector<std::vector<double>> t(P, std::vector<double>(L));
  for (int p = 0; p < P; ++p)
    for (int l = 0; l < L; ++l) {
      Eigen::MatrixXcd outer = cpl.tx_vec[p][l] * cpl.tx_vec[p][l].adjoint();
      t[p][l] = trace_against(outer, lifted_tx.block(p * Nt, p * Nt, Nt, Nt));
    }
  return t;
}

std::vector<std::vector<double>> rx_scalars_lifted(const Scene& scene,
                                                   const SceneCouplings& cpl,
                                                   const Eigen::MatrixXd& lifted_rx) {
  const int Q = scene.rx_count(), Nr = scene.n_rx_elements(), L = scene.n_scatterers();
  require(lifted_rx.rows() == Q * Nr + 1, "rx_scalars_lifted: wrong lifted dim");
  std::vector<std::vector<double>> b(Q, std::vector<double>(L));
  for (int q = 0; q < Q; ++q)
    for (int l = 0; l < L; ++l)
      b[q][l] = trace_against(cpl.rx_form[q][l],
                              lifted_rx.block(q * Nr, q * Nr, Nr, Nr));
  return b;
}

std::vector<double> rx_noise_lifted(const Scene& scene, const SceneCouplings& cpl,
                                    const Eigen::MatrixXd& lifted_rx) {
  const int Q = scene.rx_count(), Nr = scene.n_rx_elements();
  std::vector<double> n(Q);
  for (int q = 0; q < Q; ++q)
    n[q] = cpl.noise_weight[q]
               .dot(lifted_rx.block(q * Nr, q * Nr, Nr, Nr).diagonal());
  return n;
}

TxForms transmit_forms_lifted(const Scene& scene, const SceneCouplings& cpl,
                              const Eigen::MatrixXd& lifted_rx) {
  return build_tx_forms(scene, cpl, rx_scalars_lifted(scene, cpl, lifted_rx),
                        rx_noise_lifted(scene, cpl, lifted_rx));
}

RxForms receive_forms_lifted(const Scene& scene, const SceneCouplings& cpl,
                             const Eigen::MatrixXd& lifted_tx) {
  return build_rx_forms(scene, cpl, tx_scalars_lifted(scene, cpl, lifted_tx));
}

}  // namespace rhsradar
