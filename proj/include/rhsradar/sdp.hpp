// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "rhsradar/kernels.hpp"
#include "rhsradar/signal_chain.hpp"

namespace rhsradar {

enum class Sense { LessEq, GreaterEq, Equal };

struct TraceConstraint {
  Eigen::MatrixXd matrix;  // real symmetric, dim x dim
  Sense sense = Sense::LessEq;
  double bound = 0.0;
  bool margin = false;  // right-hand side tightened by the maximized margin
};

// One homogenized PSD-variable problem: the variable is a dim x dim real
// symmetric PSD matrix whose last slot is the homogenization coordinate
// (tr(D Psi) = 1 present exactly once), and the objective maximizes a
// common additive margin over the margin-tagged rows.
struct LiftedSdp {
  int dim = 0;
  std::vector<TraceConstraint> constraints;
  // optional per-coordinate equilibration hint (empty = ones); purely a
  // numerical preconditioner, the solution is reported in original units
  Eigen::VectorXd var_scale;

  int trace_constraint_count() const { return static_cast<int>(constraints.size()); }
  // + 1 counts the PSD cone itself
  int constraint_count() const { return trace_constraint_count() + 1; }

  void validate() const;  // symmetry of every matrix, single homogenization row
};

enum class SolveStatus { Optimal, MaxIterations, Safeguarded, NumericalFailure };

const char* to_string(SolveStatus s);

struct SdpOptions {
  double eps = 1e-8;        // relative duality gap and infeasibility target
  int max_iterations = 120;
  // internal cap on the scaled diagonal. Rank-one feasible points of the
  // homogenized problems always satisfy it, so it never cuts a roundable
  // solution; it keeps margin subproblems bounded whose relaxed diagonal
  // would otherwise escape. An active cap is reported as Safeguarded.
  double diag_box = 100.0;
  Exec exec = Exec::Serial;
};

struct SdpSolution {
  Eigen::MatrixXd psi;  // dim x dim, PSD within tolerance, original units
  double margin = 0.0;
  SolveStatus status = SolveStatus::NumericalFailure;
  int iterations = 0;
  double rel_gap = 0.0;
  double primal_infeas = 0.0;
  double dual_infeas = 0.0;
  double max_violation = 0.0;   // constraint violation in original units
  double min_eigenvalue = 0.0;  // of the returned psi
};

SdpSolution solve_sdp(const LiftedSdp& problem, const SdpOptions& options = {});

// Slack-variable-replacement state for one inner fixed-point loop.
struct SvrState {
  std::vector<double> lambda;  // [(p*Q + q)*Lt + lt]
  double u = 0.0;
  int iteration = 0;
  std::vector<double> history;  // u per iteration, non-decreasing
};

using LambdaTable = std::vector<double>;

// Transmit step: margin rows tr[(R^l - lambda R^I) Psi] >= lambda * noise
// + margin, plus per-Tx power rows, border magnitude rows and the
// homogenization row. All form matrices are zero-padded by one row/column;
// the magnitude rows live in the border.
LiftedSdp assemble_tx_sdp(const std::vector<Eigen::MatrixXd>& power,
                          const TxForms& forms, const LambdaTable& lambda,
                          double p_max);

// Receive step: mirror of the transmit step without power rows; margin
// rows tr[(M^lt - xi M^IN) Psi] >= margin.
LiftedSdp assemble_rx_sdp(const RxForms& forms, const LambdaTable& xi);

// Fixed-point ratio updates evaluated against a lifted PSD matrix.
LambdaTable svr_update_lambda(const TxForms& forms, const Eigen::MatrixXd& lifted);
LambdaTable svr_update_lambda(const RxForms& forms, const Eigen::MatrixXd& lifted);

// min over targets of the (1/PQ) pair average.
double svr_update_u(const LambdaTable& lambda, int n_tx, int n_rx, int n_targets);

// Coordinate-triplet text dump for external cross-checks.
void dump_sdp(const LiftedSdp& problem, const std::string& path);

}  // namespace rhsradar
