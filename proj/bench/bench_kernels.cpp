// SPDX-License-Identifier: Apache-2.0
//
// Times the hot kernels serial vs OpenMP, plus the naive reference at the
// sizes where it is affordable.
#include <omp.h>

#include <cstdio>
#include <vector>

#include "rhsradar/draoa.hpp"
#include "rhsradar/experiment.hpp"
#include "rhsradar/kernels.hpp"
#include "rhsradar/rng.hpp"

using namespace rhsradar;

namespace {

// synthetic constraint set shaped like one transmit-step problem
struct Workload {
  std::vector<Eigen::MatrixXd> mats;
  std::vector<ConstraintOp> ops;
  Eigen::MatrixXd x, zi;
};

Workload make_workload(int blocks, int block_size, int margins) {
  const int m = blocks * block_size + 1;
  Rng rng(42, "bench");
  Workload w;
  auto push = [&](const Eigen::MatrixXd& a) {
    w.mats.push_back(a);
    w.ops.push_back(analyze_constraint(a));
  };
  for (int b = 0; b < blocks; ++b) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < block_size; ++i)
      a(b * block_size + i, b * block_size + i) = 1.0 + rng.uniform();
    push(a);
  }
  for (int n = 0; n + 1 < m; ++n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    a(n, m - 1) = a(m - 1, n) = 0.5;
    push(a);
  }
  for (int i = 0; i < margins; ++i) {
    int b = i % blocks;
    Eigen::MatrixXd g(block_size, block_size);
    for (int r = 0; r < block_size; ++r)
      for (int c = 0; c < block_size; ++c) g(r, c) = rng.normal();
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    a.block(b * block_size, b * block_size, block_size, block_size) =
        0.5 * (g + g.transpose());
    push(a);
  }

  Eigen::MatrixXd r(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = rng.normal();
  w.x = r * r.transpose() + 0.1 * Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) r(i, j) = rng.normal();
  Eigen::MatrixXd z = r * r.transpose() + 0.1 * Eigen::MatrixXd::Identity(m, m);
  w.zi = z.llt().solve(Eigen::MatrixXd::Identity(m, m));
  return w;
}

template <typename F>
double time_loop(int iters, F&& fn) {
  fn();  // warm up
  double t0 = omp_get_wtime();
  for (int i = 0; i < iters; ++i) fn();
  return (omp_get_wtime() - t0) / iters;
}

}  // namespace

int main() {
  std::printf("OpenMP max threads: %d\n\n", omp_get_max_threads());

  for (int n : {10, 20, 40}) {
    Workload w = make_workload(2, n, 8);
    const int m = static_cast<int>(w.x.rows());
    const int k = static_cast<int>(w.ops.size());
    int iters = n >= 40 ? 20 : 50;

    double serial = time_loop(iters, [&] {
      volatile double sink = schur_psd(w.ops, w.x, w.zi, Exec::Serial)(0, 0);
      (void)sink;
    });
    double parallel = time_loop(iters, [&] {
      volatile double sink = schur_psd(w.ops, w.x, w.zi, Exec::Parallel)(0, 0);
      (void)sink;
    });
    std::printf("schur  m=%-3d k=%-3d   serial %8.3f ms   omp %8.3f ms   speedup %.2fx\n",
                m, k, serial * 1e3, parallel * 1e3, serial / parallel);
    if (n <= 20) {
      double ref = time_loop(5, [&] {
        volatile double sink = schur_psd_reference(w.mats, w.x, w.zi)(0, 0);
        (void)sink;
      });
      std::printf("       reference (naive dense)  %8.3f ms\n", ref * 1e3);
    }
  }

  // rounding-style candidate evaluation on a small scene
  {
    ExperimentSpec spec = preset_fig2a();
    Scene scene = build_scene(spec.scenario, spec.axis, 20, 0);
    SceneCouplings cpl = make_couplings(scene);
    const int nt = scene.tx_count() * scene.n_tx_elements();
    const int nr = scene.rx_count() * scene.n_rx_elements();
    Rng rng(1, "cand");
    Eigen::VectorXd pt(nt), pr(nr);
    for (int i = 0; i < nt; ++i) pt(i) = 0.002 * rng.uniform();
    for (int i = 0; i < nr; ++i) pr(i) = rng.uniform();
    Eigen::MatrixXd lt = lift_vector(pt), lr = lift_vector(pr);

    for (Exec exec : {Exec::Serial, Exec::Parallel}) {
      RoundingOptions opt;
      opt.exhaustive = true;
      opt.exec = exec;
      double t = time_loop(3, [&] {
        gaussian_rounding(lt, lr, scene, 64, 64, 9, nullptr, opt);
      });
      std::printf("rounding 64x64 candidates (%s)  %8.3f ms\n",
                  exec == Exec::Serial ? "serial" : "omp   ", t * 1e3);
    }
  }
  return 0;
}
