// SPDX-License-Identifier: Apache-2.0
//
// Dense primal-dual path-following solver for the homogenized trace-form
// problems this project assembles: one real symmetric PSD block, slack
// variables for the inequality rows and a single free margin variable.
// Search direction is the HKM linearization of X Z = mu I with a Mehrotra
// predictor-corrector; the Schur complement is assembled through the
// structure-analyzed kernels.
#include <algorithm>
#include <cmath>
#include <limits>

#include "rhsradar/sdp.hpp"

namespace rhsradar {

namespace {

struct Row {
  ConstraintOp op;
  double b = 0.0;
  double sigma = 0.0;  // +1 slack for <=, -1 for >=, 0 equality
  double f = 0.0;      // margin coefficient on the right-hand side
  int slack = -1;      // index into the slack vectors
  bool synthetic = false;  // internal safeguard row
};

double max_abs(const Eigen::MatrixXd& a) { return a.cwiseAbs().maxCoeff(); }

// largest alpha with v + alpha dv >= 0 (componentwise), capped at 1/gamma
double lp_step(const Eigen::VectorXd& v, const Eigen::VectorXd& dv) {
  double a = std::numeric_limits<double>::infinity();
  for (int i = 0; i < v.size(); ++i)
    if (dv(i) < 0.0) a = std::min(a, -v(i) / dv(i));
  return a;
}

// largest alpha with X + alpha dX psd, via lambda_min of Lx^-1 dX Lx^-T
double psd_step(const Eigen::LLT<Eigen::MatrixXd>& chol, const Eigen::MatrixXd& dx) {
  Eigen::MatrixXd w = chol.matrixL().solve(dx);
  w = chol.matrixL().solve(w.transpose()).eval();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(
      0.5 * (w + w.transpose()), Eigen::EigenvaluesOnly);
  double lmin = eig.eigenvalues().minCoeff();
  if (lmin >= -1e-14) return std::numeric_limits<double>::infinity();
  return -1.0 / lmin;
}

}  // namespace

SdpSolution solve_sdp(const LiftedSdp& problem, const SdpOptions& options) {
  problem.validate();
  const int m = problem.dim;

  Eigen::VectorXd scale = problem.var_scale.size() == m
                              ? problem.var_scale
                              : Eigen::VectorXd::Ones(m);
  for (int i = 0; i < m; ++i)
    if (!(scale(i) > 0.0) || !std::isfinite(scale(i)))
      throw std::invalid_argument("solve_sdp: invalid variable scale");

  // ---- canonicalize rows:  <A_i, X> + sigma_i s_i + f_i tau = b_i ----
  std::vector<Row> rows;
  rows.reserve(problem.constraints.size() + m);
  bool has_margin = false;
  for (const auto& c : problem.constraints) {
    Eigen::MatrixXd a = scale.asDiagonal() * c.matrix * scale.asDiagonal();
    double norm = std::max(a.norm(), 1e-12);
    Row r;
    r.b = c.bound / norm;
    switch (c.sense) {
      case Sense::LessEq: r.sigma = 1.0; break;
      case Sense::GreaterEq: r.sigma = -1.0; break;
      case Sense::Equal: r.sigma = 0.0; break;
    }
    if (c.margin) {
      has_margin = true;
      r.f = (c.sense == Sense::GreaterEq ? -1.0 : 1.0) / norm;
    }
    r.op = analyze_constraint((a / norm).eval());
    rows.push_back(std::move(r));
  }
  // safeguard rows: scaled diagonal capped, homogenization slot excluded
  for (int n = 0; n + 1 < m; ++n) {
    Row r;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    a(n, n) = 1.0;
    r.op = analyze_constraint(a);
    r.b = options.diag_box;
    r.sigma = 1.0;
    r.synthetic = true;
    rows.push_back(std::move(r));
  }

  const int k = static_cast<int>(rows.size());
  int n_slack = 0;
  for (auto& r : rows)
    if (r.sigma != 0.0) r.slack = n_slack++;

  std::vector<ConstraintOp> ops;
  ops.reserve(k);
  Eigen::VectorXd bvec(k), fvec(k), sigma(k);
  for (int i = 0; i < k; ++i) {
    ops.push_back(rows[i].op);
    bvec(i) = rows[i].b;
    fvec(i) = rows[i].f;
    sigma(i) = rows[i].sigma;
  }

  // ---- state ----
  double rho_p = std::max(10.0, 2.0 * bvec.cwiseAbs().maxCoeff());
  double rho_d = 10.0;
  Eigen::MatrixXd x = rho_p * Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd z = rho_d * Eigen::MatrixXd::Identity(m, m);
  Eigen::VectorXd s = Eigen::VectorXd::Constant(n_slack, rho_p);
  Eigen::VectorXd w = Eigen::VectorXd::Constant(n_slack, rho_d);
  Eigen::VectorXd y = Eigen::VectorXd::Zero(k);
  double tau = 0.0;

  const double denom_mu = m + n_slack;
  const double bnorm = 1.0 + bvec.cwiseAbs().maxCoeff();

  double best_score = std::numeric_limits<double>::infinity();
  double best_margin = 0.0;
  int best_iter = 0;
  int iter = 0;
  bool converged = false;

  Eigen::MatrixXd x_ret = x;
  double gap_ret = 0, pinf_ret = 0, dinf_ret = 0;

  for (iter = 1; iter <= options.max_iterations; ++iter) {
    Eigen::LLT<Eigen::MatrixXd> chol_x(x);
    Eigen::LLT<Eigen::MatrixXd> chol_z(z);
    if (chol_x.info() != Eigen::Success || chol_z.info() != Eigen::Success) break;
    Eigen::MatrixXd zi = chol_z.solve(Eigen::MatrixXd::Identity(m, m));

    double mu = (x.cwiseProduct(z).sum() + s.dot(w)) / denom_mu;

    // residuals
    Eigen::VectorXd ax = trace_products(ops, x, options.exec);
    Eigen::VectorXd rp = bvec - ax - fvec * tau;
    for (int i = 0; i < k; ++i)
      if (rows[i].slack >= 0) rp(i) -= sigma(i) * s(rows[i].slack);
    Eigen::MatrixXd rd = -weighted_sum(ops, y, m) - z;
    Eigen::VectorXd rw(n_slack);
    for (int i = 0; i < k; ++i)
      if (rows[i].slack >= 0)
        rw(rows[i].slack) = -sigma(i) * y(i) - w(rows[i].slack);
    double rf = has_margin ? -1.0 - fvec.dot(y) : 0.0;

    double pobj = -tau;            // internal minimization value
    double dobj = bvec.dot(y);
    double gap = x.cwiseProduct(z).sum() + s.dot(w);
    double rel_gap = gap / (1.0 + std::abs(pobj) + std::abs(dobj));
    double pinf = rp.cwiseAbs().maxCoeff() / bnorm;
    double dinf = std::max({max_abs(rd),
                            n_slack ? rw.cwiseAbs().maxCoeff() : 0.0,
                            std::abs(rf)}) /
                  2.0;

    double score = std::max({rel_gap, pinf, dinf});
    if (score < best_score) {
      best_score = score;
      x_ret = x;
      best_margin = tau;
      best_iter = iter;
      gap_ret = rel_gap;
      pinf_ret = pinf;
      dinf_ret = dinf;
    }
    if (rel_gap <= options.eps && pinf <= options.eps && dinf <= options.eps) {
      converged = true;
      break;
    }

    // Schur complement M = S + diag(s/w), shared by both direction solves
    Eigen::MatrixXd schur = schur_psd(ops, x, zi, options.exec);
    for (int i = 0; i < k; ++i)
      if (rows[i].slack >= 0) schur(i, i) += s(rows[i].slack) / w(rows[i].slack);
    schur.diagonal().array() += 1e-12 * (1.0 + schur.diagonal().maxCoeff());
    Eigen::LDLT<Eigen::MatrixXd> fac(schur);
    if (fac.info() != Eigen::Success) break;

    Eigen::VectorXd fsol;
    double ftf = 0.0;
    if (has_margin) {
      fsol = fac.solve(fvec);
      ftf = fvec.dot(fsol);
      if (!(ftf > 0.0)) break;
    }

    // one Newton solve for given complementarity targets
    Eigen::MatrixXd dx, dz;
    Eigen::VectorXd dy, ds, dw;
    double dtau = 0.0;
    auto newton = [&](const Eigen::MatrixXd& kmat, const Eigen::VectorXd& kappa) {
      Eigen::MatrixXd g = (kmat - x * rd) * zi;
      Eigen::VectorXd h = trace_products(ops, g, options.exec);
      Eigen::VectorXd rhs = rp - h;
      for (int i = 0; i < k; ++i) {
        int si = rows[i].slack;
        if (si < 0) continue;
        rhs(i) -= sigma(i) * kappa(si) / w(si) - sigma(i) * (s(si) / w(si)) * rw(si);
      }
      Eigen::VectorXd u = fac.solve(rhs);
      if (has_margin) {
        dtau = (fvec.dot(u) - rf) / ftf;
        dy = u - dtau * fsol;
      } else {
        dtau = 0.0;
        dy = u;
      }
      dz = rd - weighted_sum(ops, dy, m);
      Eigen::MatrixXd dx_ns = (kmat - x * dz) * zi;
      dx = 0.5 * (dx_ns + dx_ns.transpose());
      dw.resize(n_slack);
      ds.resize(n_slack);
      for (int i = 0; i < k; ++i) {
        int si = rows[i].slack;
        if (si < 0) continue;
        dw(si) = rw(si) - sigma(i) * dy(i);
        ds(si) = (kappa(si) - s(si) * dw(si)) / w(si);
      }
    };

    // predictor
    newton((-x * z).eval(), (-s.cwiseProduct(w)).eval());
    double ap = std::min({1.0, 0.98 * psd_step(chol_x, dx),
                          n_slack ? 0.98 * lp_step(s, ds) : 1.0});
    double ad = std::min({1.0, 0.98 * psd_step(chol_z, dz),
                          n_slack ? 0.98 * lp_step(w, dw) : 1.0});
    double mu_aff = ((x + ap * dx).cwiseProduct(z + ad * dz).sum() +
                     (s + ap * ds).dot(w + ad * dw)) /
                    denom_mu;
    double sig_c = std::clamp(std::pow(mu_aff / mu, 3.0), 1e-6, 0.999);

    // corrector / combined
    Eigen::MatrixXd kmat = sig_c * mu * Eigen::MatrixXd::Identity(m, m) -
                           x * z - dx * dz;
    Eigen::VectorXd kappa = Eigen::VectorXd::Constant(n_slack, sig_c * mu) -
                            s.cwiseProduct(w) - ds.cwiseProduct(dw);
    newton(kmat, kappa);
    ap = std::min({1.0, 0.98 * psd_step(chol_x, dx),
                   n_slack ? 0.98 * lp_step(s, ds) : 1.0});
    ad = std::min({1.0, 0.98 * psd_step(chol_z, dz),
                   n_slack ? 0.98 * lp_step(w, dw) : 1.0});

    x += ap * dx;
    s += ap * ds;
    tau += ap * dtau;
    y += ad * dy;
    z += ad * dz;
    w += ad * dw;
  }

  // ---- report in original units ----
  SdpSolution sol;
  sol.iterations = best_iter;
  sol.margin = has_margin ? best_margin : 0.0;
  sol.psi = scale.asDiagonal() * x_ret * scale.asDiagonal();
  sol.rel_gap = gap_ret;
  sol.primal_infeas = pinf_ret;
  sol.dual_infeas = dinf_ret;

  // safeguard active iff a capped scaled-diagonal entry is near the box
  bool capped = false;
  for (int n = 0; n + 1 < m; ++n)
    if (x_ret(n, n) > 0.95 * options.diag_box) capped = true;

  if (converged)
    sol.status = capped ? SolveStatus::Safeguarded : SolveStatus::Optimal;
  else if (iter > options.max_iterations)
    sol.status = SolveStatus::MaxIterations;
  else
    sol.status = SolveStatus::NumericalFailure;

  double viol = 0.0;
  for (const auto& c : problem.constraints) {
    double v = c.matrix.cwiseProduct(sol.psi).sum();
    double rhs = c.bound + (c.margin ? (c.sense == Sense::GreaterEq ? sol.margin
                                                                    : -sol.margin)
                                     : 0.0);
    double err = 0.0;
    if (c.sense == Sense::LessEq) err = std::max(0.0, v - rhs);
    else if (c.sense == Sense::GreaterEq) err = std::max(0.0, rhs - v);
    else err = std::abs(v - rhs);
    viol = std::max(viol, err);
  }
  sol.max_violation = viol;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(sol.psi, Eigen::EigenvaluesOnly);
  sol.min_eigenvalue = eig.eigenvalues().minCoeff();
  return sol;
}

}  // namespace rhsradar
