// SPDX-License-Identifier: Apache-2.0
#include "rhsradar/baseline.hpp"

#include <cmath>
#include <stdexcept>

namespace rhsradar {

namespace {
void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}
}  // namespace

void CostModel::validate() const {
  require(eta_rhs > 0.0 && eta_rhs <= 1.0 && eta_phased > 0.0 && eta_phased <= 1.0,
          "cost model: efficiency ratios must be in (0, 1]");
  require(delta > 0.0, "cost model: delta must be positive");
  require(phased_unit_cost > 0.0, "cost model: unit cost must be positive");
}

EquivalentConfig equivalent_config(double cost_budget, double power_budget,
                                   const CostModel& model, int n_tx, int n_rx) {
  model.validate();
  require(cost_budget > 0.0 && power_budget > 0.0,
          "equivalent_config: budgets must be positive");
  require(n_tx >= 1 && n_rx >= 1, "equivalent_config: need panels");

  EquivalentConfig out;
  out.n_phased_total = static_cast<int>(cost_budget / model.phased_unit_cost);
  out.n_rhs_total =
      static_cast<int>(cost_budget * model.delta / model.phased_unit_cost);
  const int panels = n_tx + n_rx;
  out.n_phased_per_panel = out.n_phased_total / panels;
  out.n_rhs_per_panel = out.n_rhs_total / panels;
  require(out.n_phased_per_panel >= 1 && out.n_rhs_per_panel >= 1,
          "equivalent_config: budget too small for one element per panel");

  out.rhs_radiated_total = model.eta_rhs * power_budget;
  out.phased_radiated_total = model.eta_phased * power_budget;
  out.rhs_radiated_per_tx = out.rhs_radiated_total / n_tx;
  out.phased_radiated_per_tx = out.phased_radiated_total / n_tx;
  return out;
}

PhasedResult phased_mimo_beamform(const Scene& scene, const PhasedConfig& config) {
  scene.validate();
  require(config.n_x >= 1 && config.n_y >= 1, "phased: element counts");
  require(config.radiated_per_tx > 0.0, "phased: transmit power budget");

  const int P = scene.tx_count(), Q = scene.rx_count();
  const int L = scene.n_scatterers(), Lt = scene.n_targets();
  const double spacing =
      config.spacing > 0.0 ? config.spacing : scene.wavelength / 2.0;
  const int n_elem = config.n_x * config.n_y;

  PhasedResult res;
  res.tx.reserve(P);
  res.rx.reserve(Q);

  // steering vectors of the phased grids toward every scatterer
  std::vector<std::vector<Eigen::VectorXcd>> a_tx(P), a_rx(Q);
  for (int p = 0; p < P; ++p) {
    RhsPanel grid = make_panel(config.n_x, config.n_y, spacing, 1,
                               scene.tx_panels[p].center,
                               scene.tx_panels[p].axis_x,
                               scene.tx_panels[p].axis_y);
    a_tx[p].resize(L);
    for (int l = 0; l < L; ++l)
      a_tx[p][l] = steering_vector(grid, scene.scatterers[l].position,
                                   scene.wavelength);
    res.tx.push_back({grid, Eigen::VectorXcd()});
  }
  for (int q = 0; q < Q; ++q) {
    RhsPanel grid = make_panel(config.n_x, config.n_y, spacing, 1,
                               scene.rx_panels[q].center,
                               scene.rx_panels[q].axis_x,
                               scene.rx_panels[q].axis_y);
    a_rx[q].resize(L);
    for (int l = 0; l < L; ++l)
      a_rx[q][l] = steering_vector(grid, scene.scatterers[l].position,
                                   scene.wavelength);
    res.rx.push_back({grid, Eigen::VectorXcd()});
  }

  // transmit: conjugate steering at the round-robin target, amplitude set
  // by the power budget (||x_p||^2 = radiated_per_tx with unit waveforms)
  const double amp = std::sqrt(config.radiated_per_tx / n_elem);
  std::vector<std::vector<double>> tvals(P, std::vector<double>(L));
  for (int p = 0; p < P; ++p) {
    res.tx[p].weights = a_tx[p][p % Lt].conjugate();
    for (int l = 0; l < L; ++l) {
      std::complex<double> g = a_tx[p][l].transpose() * res.tx[p].weights;
      tvals[p][l] = amp * amp * std::norm(g);
    }
  }

  // receive: per panel, pick the candidate maximizing the worst-target
  // average over transmitters
  auto pair_sinr = [&](int p, int q, int lt, const std::vector<double>& bq) {
    double num = scene.pair_variance(p, q, lt) * tvals[p][lt] * bq[lt];
    double den = scene.noise_power * scene.snapshots_rx * n_elem;
    for (int l = 0; l < L; ++l)
      if (l != lt) den += scene.pair_variance(p, q, l) * tvals[p][l] * bq[l];
    return num / den;
  };

  std::vector<std::vector<double>> bvals(Q, std::vector<double>(L));
  std::vector<double> noise_quad(Q);
  for (int q = 0; q < Q; ++q) {
    // candidate weights: steering at each target; optionally adaptive
    std::vector<Eigen::VectorXcd> cand;
    for (int lt = 0; lt < Lt; ++lt) cand.push_back(a_rx[q][lt].conjugate());
    if (config.adaptive_receive) {
      Eigen::MatrixXcd cov = scene.noise_power * scene.snapshots_rx *
                             Eigen::MatrixXcd::Identity(n_elem, n_elem);
      for (int l = 0; l < L; ++l) {
        double s = 0.0;
        for (int p = 0; p < P; ++p) s += scene.pair_variance(p, q, l) * tvals[p][l];
        cov += s * (a_rx[q][l] * a_rx[q][l].adjoint());
      }
      Eigen::LDLT<Eigen::MatrixXcd> fac(cov);
      for (int lt = 0; lt < Lt; ++lt) {
        Eigen::VectorXcd v = fac.solve(a_rx[q][lt]);
        Eigen::VectorXcd w(n_elem);
        for (int n = 0; n < n_elem; ++n) {
          double mag = std::abs(v(n));
          w(n) = mag > 0.0 ? std::conj(v(n)) / mag : std::complex<double>(1.0, 0.0);
        }
        cand.push_back(w);
      }
    }

    double best_score = -1.0;
    for (const auto& w : cand) {
      std::vector<double> bq(L);
      for (int l = 0; l < L; ++l) {
        std::complex<double> g = a_rx[q][l].transpose() * w;
        bq[l] = std::norm(g);
      }
      double score = std::numeric_limits<double>::infinity();
      for (int lt = 0; lt < Lt; ++lt) {
        double acc = 0.0;
        for (int p = 0; p < P; ++p) acc += pair_sinr(p, q, lt, bq);
        score = std::min(score, acc / P);
      }
      if (score > best_score) {
        best_score = score;
        res.rx[q].weights = w;
        bvals[q] = bq;
      }
    }
    noise_quad[q] = static_cast<double>(n_elem);  // ||w||^2, unit modulus
  }

  // same ratio core as the holographic evaluator
  res.report = sinr_from_scalars(scene, tvals, bvals, noise_quad);
  return res;
}

}  // namespace rhsradar
