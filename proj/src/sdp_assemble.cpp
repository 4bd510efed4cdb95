// SPDX-License-Identifier: Apache-2.0
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "rhsradar/sdp.hpp"

namespace rhsradar {

namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// real part of a Hermitian form, zero-padded by one border row/column
Eigen::MatrixXd pad_real(const Eigen::MatrixXcd& h) {
  const int n = static_cast<int>(h.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, n + 1);
  out.topLeftCorner(n, n) = 0.5 * (h.real() + h.real().transpose());
  return out;
}

Eigen::MatrixXd pad_real(const Eigen::MatrixXd& a) {
  const int n = static_cast<int>(a.rows());
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n + 1, n + 1);
  out.topLeftCorner(n, n) = 0.5 * (a + a.transpose());
  return out;
}

void check_hermitian(const Eigen::MatrixXcd& h, const char* what) {
  if ((h - h.adjoint()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, h.cwiseAbs().maxCoeff()))
    throw std::invalid_argument(std::string("assemble: non-Hermitian ") + what);
}

// border magnitude rows 0 <= tr(X_{p,n} Psi) <= 1 and the homogenization row
void append_common_rows(LiftedSdp& sdp, int core_dim) {
  const int m = core_dim + 1;
  for (int n = 0; n < core_dim; ++n) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(m, m);
    x(n, m - 1) = 0.5;
    x(m - 1, n) = 0.5;
    sdp.constraints.push_back({x, Sense::GreaterEq, 0.0, false});
    sdp.constraints.push_back({x, Sense::LessEq, 1.0, false});
  }
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
  d(m - 1, m - 1) = 1.0;
  sdp.constraints.push_back({d, Sense::Equal, 1.0, false});
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Safeguarded: return "safeguarded";
    case SolveStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

void LiftedSdp::validate() const {
  require(dim >= 2, "lifted sdp: dimension too small");
  int homog = 0;
  for (const auto& c : constraints) {
    require(c.matrix.rows() == dim && c.matrix.cols() == dim,
            "lifted sdp: constraint dimension mismatch");
    if ((c.matrix - c.matrix.transpose()).cwiseAbs().maxCoeff() >
        1e-10 * std::max(1.0, c.matrix.cwiseAbs().maxCoeff()))
      throw std::invalid_argument("lifted sdp: non-symmetric constraint");
    if (c.sense == Sense::Equal && !c.margin && c.bound == 1.0 &&
        c.matrix.cwiseAbs().sum() == 1.0 && c.matrix(dim - 1, dim - 1) == 1.0)
      ++homog;
    require(!(c.margin && c.sense == Sense::Equal),
            "lifted sdp: margin on an equality row");
  }
  require(homog == 1, "lifted sdp: homogenization row must appear exactly once");
}

LiftedSdp assemble_tx_sdp(const std::vector<Eigen::MatrixXd>& power,
                          const TxForms& forms, const LambdaTable& lambda,
                          double p_max) {
  const int P = forms.n_tx, Q = forms.n_rx, L = forms.n_scatterers;
  const int Lt = forms.n_targets;
  require(static_cast<int>(lambda.size()) == P * Q * Lt && Lt >= 1,
          "assemble_tx: lambda table shape mismatch");
  require(static_cast<int>(power.size()) == P, "assemble_tx: power forms missing");
  for (double lv : lambda) require(lv >= 0.0, "assemble_tx: negative lambda");
  require(p_max > 0.0, "assemble_tx: power bound must be positive");

  LiftedSdp sdp;
  sdp.dim = forms.dim + 1;

  for (int p = 0; p < P; ++p) {
    require(power[p].rows() == forms.dim, "assemble_tx: power form dim mismatch");
    sdp.constraints.push_back({pad_real(power[p]), Sense::LessEq, p_max, false});
  }
  append_common_rows(sdp, forms.dim);

  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < Q; ++q) {
      for (int lt = 0; lt < Lt; ++lt) {
        double lv = lambda[(static_cast<size_t>(p) * Q + q) * Lt + lt];
        Eigen::MatrixXcd f = forms.sig(p, q, lt);
        check_hermitian(f, "signal form");
        for (int l = 0; l < L; ++l) {
          if (l == lt) continue;
          f -= lv * forms.sig(p, q, l);
        }
        sdp.constraints.push_back(
            {pad_real(f), Sense::GreaterEq, lv * forms.noise(p, q), true});
      }
    }
  }

  // equilibrate the amplitude coordinates so the power rows bound the
  // scaled diagonal near 1 (physical amplitudes can sit orders of
  // magnitude below the border coordinate)
  sdp.var_scale = Eigen::VectorXd::Ones(sdp.dim);
  for (int p = 0; p < P; ++p)
    for (int n = 0; n < forms.dim; ++n) {
      double c = power[p](n, n);
      if (c > 0.0) sdp.var_scale(n) = std::sqrt(p_max / c);
    }
  return sdp;
}

LiftedSdp assemble_rx_sdp(const RxForms& forms, const LambdaTable& xi) {
  const int P = forms.n_tx, Q = forms.n_rx, Lt = forms.n_targets;
  require(static_cast<int>(xi.size()) == P * Q * Lt,
          "assemble_rx: xi table shape mismatch");
  for (double v : xi) require(v >= 0.0, "assemble_rx: negative xi");

  LiftedSdp sdp;
  sdp.dim = forms.dim + 1;
  append_common_rows(sdp, forms.dim);

  for (int p = 0; p < P; ++p) {
    for (int q = 0; q < Q; ++q) {
      for (int lt = 0; lt < Lt; ++lt) {
        double v = xi[(static_cast<size_t>(p) * Q + q) * Lt + lt];
        Eigen::MatrixXcd f = forms.sig(p, q, lt);
        check_hermitian(f, "signal form");
        f -= v * forms.noise_int(p, q, lt);
        sdp.constraints.push_back({pad_real(f), Sense::GreaterEq, 0.0, true});
      }
    }
  }
  return sdp;
}

LambdaTable svr_update_lambda(const TxForms& forms, const Eigen::MatrixXd& lifted) {
  const int P = forms.n_tx, Q = forms.n_rx, L = forms.n_scatterers;
  const int Lt = forms.n_targets;
  require(lifted.rows() == forms.dim + 1, "svr: lifted dimension mismatch");
  LambdaTable lam;
  lam.reserve(static_cast<size_t>(P) * Q * Lt);
  const auto core = lifted.topLeftCorner(forms.dim, forms.dim);
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < Q; ++q)
      for (int lt = 0; lt < Lt; ++lt) {
        double num = forms.sig(p, q, lt).real().cwiseProduct(core).sum();
        double den = forms.noise(p, q);
        for (int l = 0; l < L; ++l) {
          if (l == lt) continue;
          den += forms.sig(p, q, l).real().cwiseProduct(core).sum();
        }
        if (!(den > 0.0)) throw std::domain_error("svr: degenerate pair");
        lam.push_back(num / den);
      }
  return lam;
}

LambdaTable svr_update_lambda(const RxForms& forms, const Eigen::MatrixXd& lifted) {
  const int P = forms.n_tx, Q = forms.n_rx, Lt = forms.n_targets;
  require(lifted.rows() == forms.dim + 1, "svr: lifted dimension mismatch");
  LambdaTable xi;
  xi.reserve(static_cast<size_t>(P) * Q * Lt);
  const auto core = lifted.topLeftCorner(forms.dim, forms.dim);
  for (int p = 0; p < P; ++p)
    for (int q = 0; q < Q; ++q)
      for (int lt = 0; lt < Lt; ++lt) {
        double num = forms.sig(p, q, lt).real().cwiseProduct(core).sum();
        double den =
            forms.noise_int(p, q, lt).real().cwiseProduct(core).sum();
        if (!(den > 0.0)) throw std::domain_error("svr: degenerate pair");
        xi.push_back(num / den);
      }
  return xi;
}

double svr_update_u(const LambdaTable& lambda, int n_tx, int n_rx, int n_targets) {
  require(static_cast<int>(lambda.size()) == n_tx * n_rx * n_targets,
          "svr_update_u: table shape mismatch");
  double u = std::numeric_limits<double>::infinity();
  for (int lt = 0; lt < n_targets; ++lt) {
    double acc = 0.0;
    for (int p = 0; p < n_tx; ++p)
      for (int q = 0; q < n_rx; ++q)
        acc += lambda[(static_cast<size_t>(p) * n_rx + q) * n_targets + lt];
    u = std::min(u, acc / (n_tx * n_rx));
  }
  return u;
}

void dump_sdp(const LiftedSdp& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("dump_sdp: cannot open " + path);
  out.precision(17);
  out << "lifted_sdp dim " << problem.dim << " constraints "
      << problem.trace_constraint_count() << "\n";
  for (int i = 0; i < problem.trace_constraint_count(); ++i) {
    const auto& c = problem.constraints[i];
    int nnz = 0;
    for (int col = 0; col < problem.dim; ++col)
      for (int row = col; row < problem.dim; ++row)
        if (c.matrix(row, col) != 0.0) ++nnz;
    const char* sense = c.sense == Sense::LessEq    ? "le"
                        : c.sense == Sense::GreaterEq ? "ge"
                                                      : "eq";
    out << "constraint " << i << " " << sense << " " << c.bound << " "
        << (c.margin ? 1 : 0) << " " << nnz << "\n";
    for (int col = 0; col < problem.dim; ++col)
      for (int row = col; row < problem.dim; ++row)
        if (c.matrix(row, col) != 0.0)
          out << row << " " << col << " " << c.matrix(row, col) << "\n";
  }
}

}  // namespace rhsradar
