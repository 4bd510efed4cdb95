// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <fstream>

#include "brute_force.hpp"
#include "doctest.h"
#include "rhsradar/draoa.hpp"
#include "rhsradar/sdp.hpp"

using namespace rhsradar;

namespace {

// margin-form toy: maximize psi^2 subject to psi^2 <= 1 in the lifted
// variable; hand optimum 1 at the all-ones rank-one matrix
LiftedSdp toy_problem() {
  LiftedSdp sdp;
  sdp.dim = 2;
  Eigen::MatrixXd obj = Eigen::MatrixXd::Zero(2, 2);
  obj(0, 0) = 1.0;
  sdp.constraints.push_back({obj, Sense::GreaterEq, 0.0, true});
  sdp.constraints.push_back({obj, Sense::LessEq, 1.0, false});
  Eigen::MatrixXd border = Eigen::MatrixXd::Zero(2, 2);
  border(0, 1) = border(1, 0) = 0.5;
  sdp.constraints.push_back({border, Sense::GreaterEq, 0.0, false});
  sdp.constraints.push_back({border, Sense::LessEq, 1.0, false});
  Eigen::MatrixXd homog = Eigen::MatrixXd::Zero(2, 2);
  homog(1, 1) = 1.0;
  sdp.constraints.push_back({homog, Sense::Equal, 1.0, false});
  return sdp;
}

LiftedSdp tiny_tx_problem(const Scene& scene, const BeamformerSet& bf,
                          const LambdaTable& lam) {
  TxForms txf = transmit_forms(scene, bf.psi_r);
  return assemble_tx_sdp(power_forms(scene), txf, lam, scene.p_max);
}

}  // namespace

TEST_CASE("kernels: structured Schur assembly matches the naive reference") {
  Rng rng(2, "schur");
  const int m = 9;
  std::vector<Eigen::MatrixXd> mats;
  // sparse border rows, a diagonal row, two dense blocks
  for (int n = 0; n < 4; ++n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    a(n, m - 1) = a(m - 1, n) = 0.5;
    mats.push_back(a);
  }
  {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < 4; ++i) a(i, i) = 1.0 + rng.uniform();
    mats.push_back(a);
  }
  for (int b = 0; b < 2; ++b) {
    Eigen::MatrixXd g(4, 4);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) g(i, j) = rng.normal();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    a.block(4 * b, 4 * b, 4, 4) = 0.5 * (g + g.transpose());
    mats.push_back(a);
  }
  Eigen::MatrixXd r(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = rng.normal();
  Eigen::MatrixXd x = r * r.transpose() + Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = rng.normal();
  Eigen::MatrixXd z = r * r.transpose() + Eigen::MatrixXd::Identity(m, m);
  Eigen::MatrixXd zi = z.llt().solve(Eigen::MatrixXd::Identity(m, m));

  std::vector<ConstraintOp> ops;
  for (const auto& a : mats) ops.push_back(analyze_constraint(a));

  Eigen::MatrixXd ref = schur_psd_reference(mats, x, zi);
  Eigen::MatrixXd fast = schur_psd(ops, x, zi, Exec::Serial);
  Eigen::MatrixXd par = schur_psd(ops, x, zi, Exec::Parallel);
  CHECK((fast - ref).cwiseAbs().maxCoeff() <= 1e-10 * ref.cwiseAbs().maxCoeff());
  CHECK((par - fast).cwiseAbs().maxCoeff() == 0.0);  // bit-identical
}

TEST_CASE("solver: hand-checked toy optimum") {
  SdpSolution sol = solve_sdp(toy_problem());
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.margin == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.psi(1, 1) == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(sol.min_eigenvalue >= -1e-8);
  CHECK(sol.max_violation <= 1e-6);
}

TEST_CASE("solver: no margin rows means feasibility with zero margin") {
  LiftedSdp sdp = toy_problem();
  sdp.constraints.erase(sdp.constraints.begin());  // drop the margin row
  SdpSolution sol = solve_sdp(sdp);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.margin == 0.0);
  CHECK(sol.max_violation <= 1e-6);
}

TEST_CASE("solver: duplicating a constraint leaves the optimum unchanged") {
  LiftedSdp sdp = toy_problem();
  sdp.constraints.push_back(sdp.constraints[1]);  // duplicate the power row
  SdpSolution sol = solve_sdp(sdp);
  CHECK(sol.status == SolveStatus::Optimal);
  CHECK(sol.margin == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("assembly: transmit step") {
  Rng rng(7, "asm");
  Scene scene = testing::random_tiny_scene(rng);
  BeamformerSet bf = testing::random_feasible_beamformers(scene, rng);
  const int P = scene.tx_count(), Q = scene.rx_count(), Lt = scene.n_targets();
  const int N = scene.n_tx_elements();
  LambdaTable lam(static_cast<size_t>(P) * Q * Lt, 0.5);
  LiftedSdp sdp = tiny_tx_problem(scene, bf, lam);

  SUBCASE("constraint count matches the problem listing") {
    CHECK(sdp.trace_constraint_count() == P + 2 * P * N + 1 + P * Q * Lt);
    CHECK(sdp.constraint_count() == P + 2 * P * N + 1 + 1 + P * Q * Lt);
    CHECK_NOTHROW(sdp.validate());
  }

  SUBCASE("border rows read the amplitude of a rank-one lift") {
    Eigen::MatrixXd lifted = lift_vector(bf.psi_t);
    // the first magnitude row after P power rows is the lower bound of
    // coordinate 0; its trace equals psi_0
    const auto& row = sdp.constraints[P];
    CHECK(row.matrix.cwiseProduct(lifted).sum() ==
          doctest::Approx(bf.psi_t(0)).epsilon(1e-12));
  }

  SUBCASE("lambda = 0 margins reduce to pure signal-power rows") {
    LambdaTable zero(lam.size(), 0.0);
    LiftedSdp sdp0 = tiny_tx_problem(scene, bf, zero);
    TxForms txf = transmit_forms(scene, bf.psi_r);
    const auto& row = sdp0.constraints[P + 2 * P * N + 1];
    CHECK(row.margin);
    CHECK(row.bound == 0.0);
    Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(sdp0.dim, sdp0.dim);
    expected.topLeftCorner(txf.dim, txf.dim) = txf.sig(0, 0, 0).real();
    CHECK((row.matrix - expected).cwiseAbs().maxCoeff() <= 1e-14);
  }

  SUBCASE("non-Hermitian forms are rejected") {
    TxForms txf = transmit_forms(scene, bf.psi_r);
    txf.r_sig[0](0, std::min<int>(1, txf.dim - 1)) += std::complex<double>(0, 1);
    if (txf.dim > 1)
      CHECK_THROWS_AS(assemble_tx_sdp(power_forms(scene), txf, lam, scene.p_max),
                      std::invalid_argument);
  }

  SUBCASE("zero-padding correctness") {
    TxForms txf = transmit_forms(scene, bf.psi_r);
    Eigen::MatrixXd lifted = lift_vector(bf.psi_t);
    // border entries of the padded matrix are zero, so the trace only sees
    // the core block no matter what the border holds
    lifted.row(txf.dim).setConstant(0.37);
    lifted.col(txf.dim).setConstant(0.37);
    const auto& row = sdp.constraints[P + 2 * P * N + 1];
    double with_border = row.matrix.cwiseProduct(lifted).sum();
    lifted.row(txf.dim).setZero();
    lifted.col(txf.dim).setZero();
    double without = row.matrix.cwiseProduct(lifted).sum();
    CHECK(with_border == doctest::Approx(without).epsilon(1e-14));
  }
}

TEST_CASE("assembly: receive step mirrors the transmit step") {
  Rng rng(11, "asm_rx");
  Scene scene = testing::random_tiny_scene(rng);
  BeamformerSet bf = testing::random_feasible_beamformers(scene, rng);
  const int P = scene.tx_count(), Q = scene.rx_count(), Lt = scene.n_targets();
  const int N = scene.n_rx_elements();
  RxForms rxf = receive_forms(scene, bf.psi_t);
  LambdaTable xi(static_cast<size_t>(P) * Q * Lt, 0.0);
  LiftedSdp sdp = assemble_rx_sdp(rxf, xi);
  CHECK(sdp.trace_constraint_count() == 2 * Q * N + 1 + P * Q * Lt);
  CHECK(sdp.constraint_count() == 2 * Q * N + 1 + 1 + P * Q * Lt);
  CHECK_NOTHROW(sdp.validate());
  // xi = 0: margin row is the pure target-power form
  const auto& row = sdp.constraints[2 * Q * N + 1];
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(sdp.dim, sdp.dim);
  expected.topLeftCorner(rxf.dim, rxf.dim) = rxf.sig(0, 0, 0).real();
  CHECK((row.matrix - expected).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("svr updates") {
  SUBCASE("u: single entry") { CHECK(svr_update_u({3.5}, 1, 1, 1) == 3.5); }
  SUBCASE("u: constant table") {
    CHECK(svr_update_u({2.0, 2.0, 2.0, 2.0}, 2, 2, 1) == 2.0);
  }
  SUBCASE("u: min of per-target pair averages") {
    // two targets, P*Q = 2 pairs; layout [(p*Q+q)*Lt + lt]
    // target 0 values {1, 3}, target 1 values {2, 2}
    LambdaTable lam{1.0, 2.0, 3.0, 2.0};
    CHECK(svr_update_u(lam, 2, 1, 2) == 2.0);
  }

  Rng rng(13, "svr");
  Scene scene = testing::random_tiny_scene(rng);
  BeamformerSet bf = testing::random_feasible_beamformers(scene, rng);
  TxForms txf = transmit_forms(scene, bf.psi_r);

  SUBCASE("lambda at the homogenization-only matrix is zero") {
    Eigen::MatrixXd psi = Eigen::MatrixXd::Zero(txf.dim + 1, txf.dim + 1);
    psi(txf.dim, txf.dim) = 1.0;
    for (double v : svr_update_lambda(txf, psi)) CHECK(v == 0.0);
  }

  SUBCASE("lambda at a rank-one lift equals the evaluator") {
    SinrReport rep = sinr_per_pair(scene, bf);
    LambdaTable lam = svr_update_lambda(txf, lift_vector(bf.psi_t));
    const int Q = scene.rx_count(), Lt = scene.n_targets();
    for (int p = 0; p < scene.tx_count(); ++p)
      for (int q = 0; q < Q; ++q)
        for (int lt = 0; lt < Lt; ++lt)
          CHECK(lam[(static_cast<size_t>(p) * Q + q) * Lt + lt] ==
                doctest::Approx(rep.pair(p, q, lt)).epsilon(1e-10));
    // receive-side ratios agree at the same pair of lifts
    RxForms rxf = receive_forms(scene, bf.psi_t);
    LambdaTable xi = svr_update_lambda(rxf, lift_vector(bf.psi_r));
    for (size_t i = 0; i < lam.size(); ++i)
      CHECK(xi[i] == doctest::Approx(lam[i]).epsilon(1e-10));
  }

  SUBCASE("ratio homogeneity: doubling forms and noise leaves lambda fixed") {
    TxForms scaled = txf;
    for (auto& mform : scaled.r_sig) mform *= 2.0;
    for (auto& n : scaled.r_noise) n *= 2.0;
    LambdaTable a = svr_update_lambda(txf, lift_vector(bf.psi_t));
    LambdaTable b = svr_update_lambda(scaled, lift_vector(bf.psi_t));
    for (size_t i = 0; i < a.size(); ++i)
      CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12));
  }
}

TEST_CASE("transmit inner solve improves the warm-started ratios") {
  Rng rng(19, "inner");
  Scene scene = testing::random_tiny_scene(rng);
  BeamformerSet bf = testing::random_feasible_beamformers(scene, rng);
  const int P = scene.tx_count(), Q = scene.rx_count(), Lt = scene.n_targets();

  TxForms txf = transmit_forms(scene, bf.psi_r);
  LambdaTable lam = svr_update_lambda(txf, lift_vector(bf.psi_t));
  double u0 = svr_update_u(lam, P, Q, Lt);
  LiftedSdp sdp = assemble_tx_sdp(power_forms(scene), txf, lam, scene.p_max);
  SdpSolution sol = solve_sdp(sdp);
  REQUIRE(sol.status == SolveStatus::Optimal);
  CHECK(sol.margin >= -1e-7);  // the warm point is feasible at zero margin
  LambdaTable lam2 = svr_update_lambda(txf, sol.psi);
  double u1 = svr_update_u(lam2, P, Q, Lt);
  CHECK(u1 >= u0 - 1e-7);
}

TEST_CASE("dump writes a parseable coordinate file") {
  LiftedSdp sdp = toy_problem();
  std::string path = "toy_dump.txt";
  dump_sdp(sdp, path);
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string word;
  in >> word;
  CHECK(word == "lifted_sdp");
  int dim, k;
  in >> word >> dim >> word >> k;
  CHECK(dim == 2);
  CHECK(k == 5);
}
