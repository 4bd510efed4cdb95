// SPDX-License-Identifier: Apache-2.0
#include "rhsradar/draoa.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace rhsradar {

namespace {

// eigen factor B with B B^T = psi (negative eigenvalues floored at zero)
Eigen::MatrixXd covariance_factor(const Eigen::MatrixXd& psi) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (psi + psi.transpose()));
  Eigen::VectorXd vals = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * vals.cwiseSqrt().asDiagonal();
}

std::vector<double> tx_panel_power(const Scene& scene,
                                   const std::vector<Eigen::MatrixXd>& power,
                                   const Eigen::VectorXd& psi_t) {
  std::vector<double> out(scene.tx_count());
  for (int p = 0; p < scene.tx_count(); ++p)
    out[p] = psi_t.dot(power[p] * psi_t);
  return out;
}

}  // namespace

Eigen::VectorXd clip_unit_interval(const Eigen::VectorXd& v) {
  return v.cwiseMax(0.0).cwiseMin(1.0);
}

Eigen::VectorXd sample_to_amplitudes(const Eigen::VectorXd& sample,
                                     double border_tol) {
  const int n = static_cast<int>(sample.size()) - 1;
  double border = sample(n);
  if (std::abs(border) >= border_tol)
    return ((sample.head(n) / border).cwiseAbs()).cwiseMin(1.0);
  return clip_unit_interval(sample.head(n));
}

Eigen::MatrixXd lift_vector(const Eigen::VectorXd& v) {
  Eigen::VectorXd ext(v.size() + 1);
  ext << v, 1.0;
  return ext * ext.transpose();
}

SinrReport evaluate_final(const Scene& scene, const BeamformerSet& bf) {
  return sinr_per_pair(scene, bf);
}

BeamformerSet gaussian_rounding(const Eigen::MatrixXd& lifted_tx,
                                const Eigen::MatrixXd& lifted_rx,
                                const Scene& scene, int tx_samples,
                                int rx_samples, std::uint64_t seed,
                                RoundingStats* stats,
                                const RoundingOptions& options) {
  scene.validate();
  const int P = scene.tx_count(), Q = scene.rx_count();
  const int Nt = scene.n_tx_elements(), Nr = scene.n_rx_elements();
  const int nt_dim = P * Nt, nr_dim = Q * Nr;
  if (lifted_tx.rows() != nt_dim + 1 || lifted_rx.rows() != nr_dim + 1)
    throw std::invalid_argument("rounding: lifted dimension mismatch");

  SceneCouplings cpl = make_couplings(scene);
  std::vector<Eigen::MatrixXd> power = power_forms(scene);
  RoundingStats local;

  // draw candidates; sample g of a stream always consumes the same words,
  // so enlarging G or H only appends candidates
  Eigen::MatrixXd fac_t = covariance_factor(lifted_tx);
  Eigen::MatrixXd fac_r = covariance_factor(lifted_rx);
  Rng rng_t(seed, "rounding_tx");
  Rng rng_r(seed, "rounding_rx");

  std::vector<Eigen::VectorXd> tx_cand(tx_samples), rx_cand(rx_samples);
  for (int g = 0; g < tx_samples; ++g) {
    Eigen::VectorXd gauss(nt_dim + 1);
    for (int i = 0; i <= nt_dim; ++i) gauss(i) = rng_t.normal();
    tx_cand[g] = sample_to_amplitudes(fac_t * gauss, options.border_tol);
  }
  for (int h = 0; h < rx_samples; ++h) {
    Eigen::VectorXd gauss(nr_dim + 1);
    for (int i = 0; i <= nr_dim; ++i) gauss(i) = rng_r.normal();
    rx_cand[h] = sample_to_amplitudes(fac_r * gauss, options.border_tol);
  }

  // transmit feasibility: drop samples violating the power bound
  std::vector<int> tx_keep;
  for (int g = 0; g < tx_samples; ++g) {
    auto pw = tx_panel_power(scene, power, tx_cand[g]);
    if (*std::max_element(pw.begin(), pw.end()) <= scene.p_max)
      tx_keep.push_back(g);
    else
      ++local.tx_discarded;
  }

  // one-sided scores: SVR-style lifted SINR with the other side held at
  // its relaxed matrix
  auto b_relaxed = rx_scalars_lifted(scene, cpl, lifted_rx);
  auto n_relaxed = rx_noise_lifted(scene, cpl, lifted_rx);
  auto t_relaxed = tx_scalars_lifted(scene, cpl, lifted_tx);

  auto tx_score = [&](const Eigen::VectorXd& cand) {
    std::vector<std::vector<double>> t(P, std::vector<double>(scene.n_scatterers()));
    for (int p = 0; p < P; ++p)
      for (int l = 0; l < scene.n_scatterers(); ++l)
        t[p][l] = cpl.tx_power(p, l, cand.segment(p * Nt, Nt));
    return sinr_from_scalars(scene, t, b_relaxed, n_relaxed).worst_case;
  };
  auto rx_score = [&](const Eigen::VectorXd& cand) {
    std::vector<std::vector<double>> b(Q, std::vector<double>(scene.n_scatterers()));
    std::vector<double> nq(Q);
    for (int q = 0; q < Q; ++q) {
      nq[q] = cpl.rx_noise(q, cand.segment(q * Nr, Nr));
      if (!(nq[q] > 0.0)) return -1.0;  // degenerate candidate
      for (int l = 0; l < scene.n_scatterers(); ++l)
        b[q][l] = cpl.rx_power(q, l, cand.segment(q * Nr, Nr));
    }
    return sinr_from_scalars(scene, t_relaxed, b, nq).worst_case;
  };

  if (tx_keep.empty()) {
    // scale the best clipped sample until the power bound holds
    local.fallback_scaling = true;
    int best = 0;
    double best_score = -1.0;
    for (int g = 0; g < tx_samples; ++g) {
      double sc = tx_score(tx_cand[g]);
      if (sc > best_score) {
        best_score = sc;
        best = g;
      }
    }
    auto pw = tx_panel_power(scene, power, tx_cand[best]);
    double alpha =
        std::sqrt(scene.p_max / *std::max_element(pw.begin(), pw.end())) *
        (1.0 - 1e-12);
    tx_cand[best] *= alpha;
    tx_keep.push_back(best);
  }

  // rank by one-sided score, cross-evaluate the shortlist pairs
  std::vector<std::pair<double, int>> tx_ranked, rx_ranked;
  for (int g : tx_keep) tx_ranked.emplace_back(tx_score(tx_cand[g]), g);
  for (int h = 0; h < rx_samples; ++h)
    rx_ranked.emplace_back(rx_score(rx_cand[h]), h);
  auto by_score = [](const auto& a, const auto& b) {
    return a.first > b.first || (a.first == b.first && a.second < b.second);
  };
  std::stable_sort(tx_ranked.begin(), tx_ranked.end(), by_score);
  std::stable_sort(rx_ranked.begin(), rx_ranked.end(), by_score);

  size_t n_tx_eval = options.exhaustive
                         ? tx_ranked.size()
                         : std::min<size_t>(options.shortlist, tx_ranked.size());
  size_t n_rx_eval = options.exhaustive
                         ? rx_ranked.size()
                         : std::min<size_t>(options.shortlist, rx_ranked.size());

  const int n_pairs = static_cast<int>(n_tx_eval * n_rx_eval);
  std::vector<double> value(n_pairs, -1.0);
  const bool par = options.exec == Exec::Parallel && !omp_in_parallel();
#pragma omp parallel for schedule(dynamic) if (par)
  for (int idx = 0; idx < n_pairs; ++idx) {
    int gi = idx / static_cast<int>(n_rx_eval);
    int hi = idx % static_cast<int>(n_rx_eval);
    BeamformerSet bf{tx_cand[tx_ranked[gi].second], rx_cand[rx_ranked[hi].second]};
    try {
      value[idx] = sinr_per_pair(scene, cpl, bf).worst_case;
    } catch (const std::domain_error&) {
      value[idx] = -1.0;
    }
  }
  local.pairs_evaluated = n_pairs;

  int best_idx = 0;
  for (int idx = 1; idx < n_pairs; ++idx)
    if (value[idx] > value[best_idx]) best_idx = idx;
  if (value[best_idx] < 0.0)
    throw std::runtime_error("rounding: no evaluable candidate pair");

  BeamformerSet out;
  out.psi_t = tx_cand[tx_ranked[best_idx / n_rx_eval].second];
  out.psi_r = rx_cand[rx_ranked[best_idx % n_rx_eval].second];
  if (stats) *stats = local;
  return out;
}

DraoaResult run_draoa(const Scene& scene, const DraoaConfig& config) {
  scene.validate();
  config.validate();
  const int P = scene.tx_count(), Q = scene.rx_count(), Lt = scene.n_targets();
  const int nt_dim = P * scene.n_tx_elements();
  const int nr_dim = Q * scene.n_rx_elements();

  SceneCouplings cpl = make_couplings(scene);
  std::vector<Eigen::MatrixXd> power = power_forms(scene);
  SdpOptions sdp_opt;
  sdp_opt.eps = config.eps_ipm;
  sdp_opt.exec = config.exec;

  // receive side starts from the rank-one lift of a random amplitude draw
  Rng init_rng(config.rng_seed, "rx_init");
  Eigen::VectorXd psi_r0(nr_dim);
  for (int i = 0; i < nr_dim; ++i) psi_r0(i) = init_rng.uniform();
  Eigen::MatrixXd lifted_rx = lift_vector(psi_r0);
  Eigen::MatrixXd lifted_tx = Eigen::MatrixXd::Zero(nt_dim + 1, nt_dim + 1);

  std::vector<OuterTraceEntry> trace;
  double u_t = 0.0, u_r = 0.0;
  bool converged = false;

  // one SVR fixed-point loop; `assemble` binds either problem flavor
  auto inner_loop = [&](auto&& assemble, auto&& update, Eigen::MatrixXd& lifted,
                        LambdaTable lam, SvrState& state, int& solver_iters,
                        SolveStatus& status) {
    state.lambda = lam;
    state.u = svr_update_u(lam, P, Q, Lt);
    state.history = {state.u};
    for (state.iteration = 1; state.iteration <= config.svr_max_iterations;
         ++state.iteration) {
      LiftedSdp sdp = assemble(state.lambda);
      SdpSolution sol = solve_sdp(sdp, sdp_opt);
      status = sol.status;
      solver_iters += sol.iterations;
      if (sol.status == SolveStatus::NumericalFailure)
        throw DraoaError("draoa: SDP solve failed (" +
                             std::string(to_string(sol.status)) + ")",
                         trace);
      lifted = sol.psi;
      state.lambda = update(lifted);
      double u_new = svr_update_u(state.lambda, P, Q, Lt);
      state.history.push_back(u_new);
      double prev = state.u;
      state.u = u_new;
      if (std::abs(u_new - prev) <= config.svr_tolerance * std::max(1.0, std::abs(u_new)))
        break;
    }
  };

  int m = 0;
  for (m = 1; m <= config.max_outer; ++m) {
    OuterTraceEntry entry;
    entry.outer = m;

    // transmit step, receive side fixed at its lifted matrix
    TxForms txf = transmit_forms_lifted(scene, cpl, lifted_rx);
    LambdaTable lam = svr_update_lambda(txf, lifted_tx);
    SvrState st_t;
    inner_loop(
        [&](const LambdaTable& l) { return assemble_tx_sdp(power, txf, l, scene.p_max); },
        [&](const Eigen::MatrixXd& psi) { return svr_update_lambda(txf, psi); },
        lifted_tx, lam, st_t, entry.solver_iterations, entry.status_t);
    u_t = st_t.u;
    entry.u_t = u_t;
    entry.inner_t = st_t.iteration;
    entry.history_t = st_t.history;

    // receive step, transmit side fixed
    RxForms rxf = receive_forms_lifted(scene, cpl, lifted_tx);
    LambdaTable xi = svr_update_lambda(rxf, lifted_rx);
    SvrState st_r;
    inner_loop([&](const LambdaTable& l) { return assemble_rx_sdp(rxf, l); },
               [&](const Eigen::MatrixXd& psi) { return svr_update_lambda(rxf, psi); },
               lifted_rx, xi, st_r, entry.solver_iterations, entry.status_r);
    u_r = st_r.u;
    entry.u_r = u_r;
    entry.inner_r = st_r.iteration;
    entry.history_r = st_r.history;

    trace.push_back(std::move(entry));
    if (std::abs(u_r - u_t) <= config.eps_outer) {
      converged = true;
      break;
    }
  }

  DraoaResult res;
  res.trace = std::move(trace);
  res.outer_iterations = std::min(m, config.max_outer);
  res.converged = converged;
  res.relaxed_bound = u_r;

  RoundingOptions ropt;
  ropt.shortlist = config.shortlist;
  ropt.exhaustive = config.exhaustive_pairing;
  ropt.exec = config.exec;
  res.beamformers =
      gaussian_rounding(lifted_tx, lifted_rx, scene, config.tx_samples,
                        config.rx_samples, config.rng_seed, &res.rounding, ropt);
  res.report = sinr_per_pair(scene, cpl, res.beamformers);
  res.worst_case_sinr = res.report.worst_case;
  res.worst_case_sinr_db = res.report.worst_case_db;
  return res;
}

}  // namespace rhsradar
