// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>

#include "rhsradar/sdp.hpp"

namespace rhsradar {

struct DraoaConfig {
  double eps_outer = 1e-3;  // stop when |U^r - U^t| <= eps, linear units
  int max_outer = 20;
  int tx_samples = 100;     // G
  int rx_samples = 100;     // H
  int svr_max_iterations = 30;
  double svr_tolerance = 1e-5;  // relative change of U
  double eps_ipm = 1e-8;
  int shortlist = 8;            // top candidates per side cross-evaluated
  bool exhaustive_pairing = false;
  std::uint64_t rng_seed = 0;
  Exec exec = Exec::Serial;

  void validate() const {
    if (!(eps_outer > 0.0)) throw std::invalid_argument("draoa: eps must be > 0");
    if (tx_samples < 1 || rx_samples < 1)
      throw std::invalid_argument("draoa: sample counts must be >= 1");
    if (max_outer < 1 || svr_max_iterations < 1)
      throw std::invalid_argument("draoa: iteration caps must be >= 1");
  }
};

struct OuterTraceEntry {
  int outer = 0;
  double u_t = 0.0, u_r = 0.0;
  int inner_t = 0, inner_r = 0;
  int solver_iterations = 0;
  SolveStatus status_t = SolveStatus::Optimal;
  SolveStatus status_r = SolveStatus::Optimal;
  std::vector<double> history_t, history_r;  // inner U sequences
};

struct RoundingStats {
  int tx_discarded = 0;
  bool fallback_scaling = false;
  int pairs_evaluated = 0;
};

struct DraoaResult {
  BeamformerSet beamformers;
  SinrReport report;
  double worst_case_sinr = 0.0;
  double worst_case_sinr_db = 0.0;
  double relaxed_bound = 0.0;  // final relaxed U^r
  std::vector<OuterTraceEntry> trace;
  RoundingStats rounding;
  int outer_iterations = 0;
  bool converged = false;
};

// solver failure mid-run, with the iterations completed so far attached
struct DraoaError : std::runtime_error {
  DraoaError(const std::string& msg, std::vector<OuterTraceEntry> t)
      : std::runtime_error(msg), trace(std::move(t)) {}
  std::vector<OuterTraceEntry> trace;
};

DraoaResult run_draoa(const Scene& scene, const DraoaConfig& config);

struct RoundingOptions {
  int shortlist = 8;
  bool exhaustive = false;
  double border_tol = 1e-6;  // below this the de-homogenization falls back
  Exec exec = Exec::Serial;
};

// Algorithm steps 7-9: sample candidates from the lifted covariances,
// project to feasibility, keep the pair with the best true objective.
BeamformerSet gaussian_rounding(const Eigen::MatrixXd& lifted_tx,
                                const Eigen::MatrixXd& lifted_rx,
                                const Scene& scene, int tx_samples,
                                int rx_samples, std::uint64_t seed,
                                RoundingStats* stats = nullptr,
                                const RoundingOptions& options = {});

// step-8 clamp into [0, 1]
Eigen::VectorXd clip_unit_interval(const Eigen::VectorXd& v);

// de-homogenize one lifted sample: divide by the border coordinate and take
// magnitudes, or truncate directly when the border is tiny; then clamp.
Eigen::VectorXd sample_to_amplitudes(const Eigen::VectorXd& sample,
                                     double border_tol = 1e-6);

SinrReport evaluate_final(const Scene& scene, const BeamformerSet& bf);

// rank-one lift [v; 1][v; 1]^T
Eigen::MatrixXd lift_vector(const Eigen::VectorXd& v);

}  // namespace rhsradar
