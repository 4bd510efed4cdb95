// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <complex>

#include "doctest.h"
#include "rhsradar/scene.hpp"

using namespace rhsradar;

namespace {

Scene tiny_scene(int p = 1, int q = 1) {
  Scene s;
  for (int i = 0; i < p; ++i)
    s.tx_panels.push_back(
        make_panel(2, 1, 0.01 / 3, 1, Eigen::Vector3d(0.1 * i, 0, 0)));
  for (int i = 0; i < q; ++i)
    s.rx_panels.push_back(
        make_panel(2, 1, 0.01 / 3, 1, Eigen::Vector3d(0.3 + 0.1 * i, 0, 0)));
  s.scatterers.push_back({{0.5, 2, 1}, ScattererKind::Target, 1.0, {}});
  s.scatterers.push_back({{1, 2, 2}, ScattererKind::Clutter, 0.5, {}});
  s.snapshots_tx = 4;
  s.snapshots_rx = 4;
  s.rng_seed = 11;
  return finalize_scene(std::move(s), std::sqrt(3.0), 5.0);
}

}  // namespace

TEST_CASE("steering: broadside scatterer gives all-ones") {
  RhsPanel p = make_panel(4, 2, 0.01 / 3, 1, Eigen::Vector3d::Zero());
  Eigen::VectorXcd a = steering_vector(p, {0, 0, 3.0}, 0.01);
  for (int n = 0; n < a.size(); ++n) {
    CHECK(a(n).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(a(n).imag()) < 1e-12);
  }
}

TEST_CASE("steering: half-wavelength pair at endfire gives ±j") {
  const double lambda = 0.01;
  RhsPanel p = make_panel(2, 1, lambda / 2, 1, Eigen::Vector3d::Zero());
  Eigen::VectorXcd a = steering_vector(p, {100.0, 0, 0}, lambda);
  // elements at x = -lambda/4 and +lambda/4, direction +x
  CHECK(a(0).imag() == doctest::Approx(-1.0).epsilon(1e-6));
  CHECK(std::abs(a(0).real()) < 1e-6);
  CHECK(a(1).imag() == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("steering: point reflection through the center conjugates") {
  RhsPanel p = make_panel(3, 3, 0.004, 1, Eigen::Vector3d(1, 2, 0));
  Eigen::Vector3d pos(2.5, 3.0, 1.5);
  Eigen::Vector3d mirrored = 2 * p.center - pos;
  Eigen::VectorXcd a = steering_vector(p, pos, 0.01);
  Eigen::VectorXcd b = steering_vector(p, mirrored, 0.01);
  CHECK((b - a.conjugate()).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("steering: invariant under global translation") {
  RhsPanel p = make_panel(3, 2, 0.004, 1, Eigen::Vector3d(0.2, 0.4, 0));
  Eigen::Vector3d pos(1.0, 1.5, 2.0), shift(5, -3, 2);
  Eigen::VectorXcd a = steering_vector(p, pos, 0.01);
  RhsPanel p2 = p;
  p2.center += shift;
  Eigen::VectorXcd b = steering_vector(p2, pos + shift, 0.01);
  CHECK((b - a).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("steering: zero range is rejected") {
  RhsPanel p = make_panel(2, 2, 0.004, 1, Eigen::Vector3d(1, 1, 1));
  CHECK_THROWS_AS(steering_vector(p, {1, 1, 1}, 0.01), std::invalid_argument);
}

TEST_CASE("waveforms: orthonormal rows") {
  SUBCASE("P = 1, I = 1") {
    WaveformSet w = make_waveforms(1, 1);
    CHECK(w.rows(0, 0) == std::complex<double>(1.0, 0.0));
  }
  SUBCASE("P = 2, I = 2: Gram is the identity") {
    WaveformSet w = make_waveforms(2, 2);
    Eigen::MatrixXcd g = w.rows * w.rows.adjoint();
    CHECK((g - Eigen::MatrixXcd::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);
  }
  SUBCASE("P = 4, I = 16: cross-correlations vanish") {
    WaveformSet w = make_waveforms(4, 16);
    Eigen::MatrixXcd g = w.rows * w.rows.adjoint();
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        if (i != j) CHECK(std::abs(g(i, j)) < 1e-12);
  }
  SUBCASE("insufficient snapshots rejected") {
    CHECK_THROWS_AS(make_waveforms(4, 3), std::invalid_argument);
  }
  SUBCASE("stacked copies the row into every feed") {
    WaveformSet w = make_waveforms(2, 4, 3);
    Eigen::MatrixXcd s = w.stacked(1);
    REQUIRE(s.rows() == 3);
    for (int k = 0; k < 3; ++k) CHECK((s.row(k) - w.rows.row(1)).norm() == 0.0);
  }
}

TEST_CASE("shift matrices") {
  SUBCASE("zero delay with square shape is the identity") {
    CHECK(shift_matrix(0, 3, 3).dense() == Eigen::MatrixXd::Identity(3, 3));
  }
  SUBCASE("delay 2 selects columns 3 and 4") {
    Eigen::MatrixXd j = shift_matrix(2, 2, 4).dense();
    CHECK(j(0, 2) == 1.0);
    CHECK(j(1, 3) == 1.0);
    CHECK(j.sum() == 2.0);
  }
  SUBCASE("row-orthonormal for every valid delay") {
    for (int d = 0; d <= 3; ++d) {
      Eigen::MatrixXd j = shift_matrix(d, 4, 7).dense();
      CHECK((j * j.transpose() - Eigen::MatrixXd::Identity(4, 4)).norm() == 0.0);
    }
  }
  SUBCASE("out-of-range delay rejected") {
    CHECK_THROWS_AS(shift_matrix(3, 4, 6), std::invalid_argument);
    CHECK_THROWS_AS(shift_matrix(-1, 4, 6), std::invalid_argument);
  }
}

TEST_CASE("reflection draws: moments and determinism") {
  Scene s = tiny_scene(2, 2);
  s.scatterers[0].reflect_var = 1.0;

  SUBCASE("sample second moment matches the variance") {
    Rng rng(s.rng_seed, "beta_moment");
    double acc = 0.0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) acc += std::norm(rng.cnormal(1.0));
    CHECK(acc / draws == doctest::Approx(1.0).epsilon(0.02));
  }

  SUBCASE("same seed and trial index reproduce bit-identically") {
    Rng r1(s.rng_seed, "beta", 5);
    Rng r2(s.rng_seed, "beta", 5);
    auto a = draw_reflections(s, r1);
    auto b = draw_reflections(s, r2);
    CHECK(a == b);
    Rng r3(s.rng_seed, "beta", 6);
    auto c = draw_reflections(s, r3);
    CHECK(a != c);
  }

  SUBCASE("per-pair variance override is honored") {
    Scene s2 = tiny_scene(2, 2);
    s2.scatterers[0].per_pair_var = std::vector<double>{1, 2, 3, 4};
    CHECK(s2.pair_variance(1, 1, 0) == 4.0);
    CHECK(s2.pair_variance(0, 1, 0) == 2.0);
    CHECK(s2.pair_variance(0, 1, 1) == s2.scatterers[1].reflect_var);
  }
}

TEST_CASE("scene validation catches invariant violations") {
  Scene s = tiny_scene();
  s.scatterers[0].reflect_var = 0.0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = tiny_scene();
  s.snapshots_tx = 0;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = tiny_scene();
  s.snapshots_rx = s.snapshots_tx - 1;
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);

  s = tiny_scene();
  std::swap(s.scatterers[0], s.scatterers[1]);  // clutter before target
  CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}
