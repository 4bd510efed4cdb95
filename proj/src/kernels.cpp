// SPDX-License-Identifier: Apache-2.0
#include "rhsradar/kernels.hpp"

#include <omp.h>

#include <stdexcept>

namespace rhsradar {

namespace {

// Nested parallel regions would oversubscribe; callers that are already
// inside an OpenMP region get the serial path. Results are identical.
bool go_parallel(Exec exec) {
  return exec == Exec::Parallel && !omp_in_parallel();
}

// tr(A_i * M) for one analyzed constraint against a dense (not necessarily
// symmetric) matrix; sparse terms read single entries of M.
double contract(const ConstraintOp& op, const Eigen::MatrixXd& m) {
  if (op.kind == ConstraintOp::Kind::Sparse) {
    double acc = 0.0;
    for (const auto& t : op.terms) acc += t.w * m(t.col, t.row);
    return acc;
  }
  return op.block
      .cwiseProduct(m.block(op.block_start, op.block_start, op.block_size,
                            op.block_size))
      .sum();
}

}  // namespace

ConstraintOp analyze_constraint(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("constraint not square");
  const int m = static_cast<int>(a.rows());
  ConstraintOp op;
  op.fro = a.norm();

  int lo = m, hi = -1, nnz = 0;
  for (int j = 0; j < m; ++j)
    for (int i = j; i < m; ++i)
      if (a(i, j) != 0.0) {
        ++nnz;
        lo = std::min(lo, j);
        hi = std::max(hi, i);
      }

  if (nnz <= 4) {
    op.kind = ConstraintOp::Kind::Sparse;
    for (int j = 0; j < m; ++j)
      for (int i = j; i < m; ++i)
        if (a(i, j) != 0.0) {
          op.terms.push_back({i, j, a(i, j)});
          if (i != j) op.terms.push_back({j, i, a(i, j)});
        }
    return op;
  }
  op.kind = ConstraintOp::Kind::BlockDense;
  op.block_start = lo;
  op.block_size = hi - lo + 1;
  op.block = a.block(lo, lo, op.block_size, op.block_size);
  return op;
}

Eigen::MatrixXd schur_psd(const std::vector<ConstraintOp>& ops,
                          const Eigen::MatrixXd& x, const Eigen::MatrixXd& zi,
                          Exec exec) {
  const int k = static_cast<int>(ops.size());
  const int m = static_cast<int>(x.rows());
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(k, k);

  // dense constraints need M_j = X A_j Zi; sparse ones read entries of X/Zi
  std::vector<int> dense_ids;
  for (int j = 0; j < k; ++j)
    if (ops[j].kind == ConstraintOp::Kind::BlockDense) dense_ids.push_back(j);

  std::vector<Eigen::MatrixXd> mj(dense_ids.size());
  const bool par = go_parallel(exec);

#pragma omp parallel for schedule(dynamic) if (par)
  for (size_t d = 0; d < dense_ids.size(); ++d) {
    const ConstraintOp& op = ops[dense_ids[d]];
    mj[d].noalias() =
        (x.middleCols(op.block_start, op.block_size) * op.block) *
        zi.middleRows(op.block_start, op.block_size);
    (void)m;
  }

  // column fill: for each j, entries i <= j
#pragma omp parallel for schedule(dynamic) if (par)
  for (int j = 0; j < k; ++j) {
    const ConstraintOp& cj = ops[j];
    if (cj.kind == ConstraintOp::Kind::Sparse) {
      for (int i = 0; i <= j; ++i) {
        const ConstraintOp& ci = ops[i];
        if (ci.kind != ConstraintOp::Kind::Sparse) continue;  // handled below
        double acc = 0.0;
        for (const auto& ti : ci.terms)
          for (const auto& tj : cj.terms)
            acc += ti.w * tj.w * x(ti.col, tj.row) * zi(tj.col, ti.row);
        s(i, j) = acc;
      }
    }
  }

  // rows involving a dense constraint: S_ij = <A_i, M_j>
#pragma omp parallel for schedule(dynamic) if (par)
  for (size_t d = 0; d < dense_ids.size(); ++d) {
    int j = dense_ids[d];
    for (int i = 0; i < k; ++i) {
      if (ops[i].kind == ConstraintOp::Kind::BlockDense && i > j) continue;
      double v = contract(ops[i], mj[d]);
      int r = std::min(i, j), c = std::max(i, j);
      s(r, c) = v;
    }
  }

  return s.selfadjointView<Eigen::Upper>();
}

Eigen::MatrixXd schur_psd_reference(const std::vector<Eigen::MatrixXd>& mats,
                                    const Eigen::MatrixXd& x,
                                    const Eigen::MatrixXd& zi) {
  const int k = static_cast<int>(mats.size());
  Eigen::MatrixXd s(k, k);
  for (int j = 0; j < k; ++j) {
    Eigen::MatrixXd mj = x * mats[j] * zi;
    for (int i = 0; i < k; ++i) s(i, j) = mats[i].cwiseProduct(mj.transpose()).sum();
  }
  // the exact HKM Schur matrix is symmetric in exact arithmetic
  return 0.5 * (s + s.transpose());
}

Eigen::VectorXd trace_products(const std::vector<ConstraintOp>& ops,
                               const Eigen::MatrixXd& g, Exec exec) {
  const int k = static_cast<int>(ops.size());
  Eigen::VectorXd out(k);
  const bool par = go_parallel(exec);
#pragma omp parallel for schedule(static) if (par)
  for (int i = 0; i < k; ++i) out(i) = contract(ops[i], g);
  return out;
}

Eigen::MatrixXd weighted_sum(const std::vector<ConstraintOp>& ops,
                             const Eigen::VectorXd& y, int dim) {
  Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(dim, dim);
  for (size_t i = 0; i < ops.size(); ++i) {
    double w = y(static_cast<int>(i));
    if (w == 0.0) continue;
    const ConstraintOp& op = ops[i];
    if (op.kind == ConstraintOp::Kind::Sparse) {
      for (const auto& t : op.terms) acc(t.row, t.col) += w * t.w;
    } else {
      acc.block(op.block_start, op.block_start, op.block_size, op.block_size) +=
          w * op.block;
    }
  }
  return acc;
}

}  // namespace rhsradar
