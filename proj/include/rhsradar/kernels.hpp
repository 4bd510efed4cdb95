// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

namespace rhsradar {

// Execution policy for the data-parallel kernels. Serial and Parallel
// variants perform identical arithmetic in identical order per output
// element (all writes are disjoint), so their results are bit-identical;
// the serial path doubles as the reference the tests compare against.
enum class Exec { Serial, Parallel };

// A trace-constraint matrix analyzed into the structure the interior-point
// Schur assembly exploits: either a handful of symmetric entries or one
// dense symmetric block on a contiguous index range.
struct ConstraintOp {
  enum class Kind { Sparse, BlockDense };
  Kind kind = Kind::Sparse;

  // Sparse: directed terms (row, col, w) with A = sum w * e_row e_col^T.
  // Off-diagonal matrix entries contribute two mirrored terms.
  struct Term {
    int row, col;
    double w;
  };
  std::vector<Term> terms;

  int block_start = 0;
  int block_size = 0;
  Eigen::MatrixXd block;  // block_size x block_size symmetric

  double fro = 0.0;  // Frobenius norm of the full matrix
};

ConstraintOp analyze_constraint(const Eigen::MatrixXd& a);

// S_ij = tr(A_i X A_j Z^-1) for the PSD block of the Schur complement.
// X, Zi are symmetric positive definite m x m; output is k x k symmetric.
Eigen::MatrixXd schur_psd(const std::vector<ConstraintOp>& ops,
                          const Eigen::MatrixXd& x, const Eigen::MatrixXd& zi,
                          Exec exec);

// Naive O(k^2 m^3) evaluation of the same matrix from the raw constraint
// matrices; kept as the independent reference for tests and benchmarks.
Eigen::MatrixXd schur_psd_reference(const std::vector<Eigen::MatrixXd>& mats,
                                    const Eigen::MatrixXd& x,
                                    const Eigen::MatrixXd& zi);

// <A_i, G> for every constraint (G need not be symmetric; the symmetric
// part is what the inner product sees).
Eigen::VectorXd trace_products(const std::vector<ConstraintOp>& ops,
                               const Eigen::MatrixXd& g, Exec exec);

// sum_i y_i A_i accumulated into a dense symmetric matrix.
Eigen::MatrixXd weighted_sum(const std::vector<ConstraintOp>& ops,
                             const Eigen::VectorXd& y, int dim);

}  // namespace rhsradar
