// SPDX-License-Identifier: Apache-2.0
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "rhsradar/panel.hpp"

using namespace rhsradar;

TEST_CASE("degenerate 1x1 grid is a single point at the center") {
  RhsPanel p = make_panel(1, 1, 1.0 / 300, 1, Eigen::Vector3d::Zero());
  auto pts = element_positions(p);
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].norm() == 0.0);
}

TEST_CASE("2x1 grid at lambda/3 spacing is symmetric about the center") {
  RhsPanel p = make_panel(2, 1, 1.0 / 300, 1, Eigen::Vector3d::Zero());
  auto pts = element_positions(p);
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].isApprox(Eigen::Vector3d(-1.0 / 600, 0, 0), 1e-15));
  CHECK(pts[1].isApprox(Eigen::Vector3d(1.0 / 600, 0, 0), 1e-15));
}

TEST_CASE("10x8 grid: pairwise minimum distance equals the spacing") {
  const double d = 0.01 / 3;
  RhsPanel p = make_panel(10, 8, d, 5, Eigen::Vector3d(1, 2, 0));
  auto pts = element_positions(p);
  REQUIRE(pts.size() == 80);
  double min_dist = 1e30;
  for (size_t i = 0; i < pts.size(); ++i)
    for (size_t j = i + 1; j < pts.size(); ++j)
      min_dist = std::min(min_dist, (pts[i] - pts[j]).norm());
  CHECK(min_dist == doctest::Approx(d).epsilon(1e-12));
}

TEST_CASE("grid ordering is x-major and bit-stable across calls") {
  RhsPanel p = make_panel(3, 2, 0.004, 2, Eigen::Vector3d(0.3, -0.1, 2.0));
  auto a = element_positions(p);
  auto b = element_positions(p);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].x() == b[i].x());
    CHECK(a[i].y() == b[i].y());
    CHECK(a[i].z() == b[i].z());
  }
  // x varies fastest
  CHECK(a[1].x() > a[0].x());
  CHECK(a[1].y() == a[0].y());
  CHECK(a[3].y() > a[0].y());
}

TEST_CASE("panel validation rejects broken geometry") {
  CHECK_THROWS_AS(make_panel(0, 1, 0.01, 1, Eigen::Vector3d::Zero()),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_panel(2, 2, -0.01, 1, Eigen::Vector3d::Zero()),
                  std::invalid_argument);
  RhsPanel p = make_panel(2, 2, 0.01, 1, Eigen::Vector3d::Zero());
  p.axis_y = Eigen::Vector3d::UnitX();  // not orthogonal
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  p = make_panel(2, 2, 0.01, 1, Eigen::Vector3d::Zero());
  p.feed_positions[0] = {1.0, 0.0};  // outside the bounding rectangle
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
}

TEST_CASE("waveguide response matches the closed forms") {
  RhsPanel p = make_panel(1, 1, 0.01 / 3, 1, Eigen::Vector3d::Zero());

  SUBCASE("zero distance gives q = 1 and gamma = 1") {
    WaveguideResponse r = waveguide_response(p, 0.01, std::sqrt(3.0), 5.0);
    REQUIRE(r.distances(0, 0) == 0.0);
    CHECK(r.q_matrix(0, 0).real() == doctest::Approx(1.0));
    CHECK(r.q_matrix(0, 0).imag() == doctest::Approx(0.0));
    CHECK(r.gamma_matrix(0, 0) == 1.0);
  }

  SUBCASE("a full phase cycle wraps to 1") {
    // place a feed so D = lambda / nu exactly
    const double lambda = 0.01, nu = 2.0;
    RhsPanel wide = make_panel(2, 1, 2 * lambda / nu, 1, Eigen::Vector3d::Zero());
    wide.feed_positions = {{-lambda / nu, 0.0}};  // element 0 offset = D
    wide.validate();
    WaveguideResponse r = waveguide_response(wide, lambda, nu, 0.0);
    CHECK(r.distances(1, 0) == doctest::Approx(2 * lambda / nu));
    CHECK(r.q_matrix(1, 0).real() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(r.q_matrix(1, 0).imag()) < 1e-12);
  }

  SUBCASE("attenuation: a = 5, D = 0.1 m") {
    RhsPanel wide = make_panel(2, 1, 0.2, 1, Eigen::Vector3d::Zero());
    wide.feed_positions = {{0.0, 0.0}};
    WaveguideResponse r = waveguide_response(wide, 0.01, 1.0, 5.0);
    CHECK(r.distances(0, 0) == doctest::Approx(0.1));
    CHECK(r.gamma_matrix(0, 0) == doctest::Approx(0.6065306597126334).epsilon(1e-12));
  }
}

TEST_CASE("waveguide invariants: unit modulus and monotone attenuation") {
  RhsPanel p = make_panel(6, 4, 0.01 / 3, 5, Eigen::Vector3d(0.5, 0.5, 0));
  WaveguideResponse r = waveguide_response(p, 0.01, std::sqrt(3.0), 5.0);
  CHECK((r.q_matrix.cwiseAbs().array() - 1.0).abs().maxCoeff() <= 1e-12);
  CHECK(r.gamma_matrix.minCoeff() > 0.0);
  CHECK(r.gamma_matrix.maxCoeff() <= 1.0);
  for (int n = 0; n < p.n_elements(); ++n)
    for (int k = 0; k < p.n_feeds(); ++k)
      for (int k2 = 0; k2 < p.n_feeds(); ++k2)
        if (r.distances(n, k) < r.distances(n, k2))
          CHECK(r.gamma_matrix(n, k) > r.gamma_matrix(n, k2));
}

TEST_CASE("reciprocity: identical geometry gives identical responses") {
  RhsPanel a = make_panel(4, 3, 0.004, 3, Eigen::Vector3d(0, 0, 0));
  RhsPanel b = make_panel(4, 3, 0.004, 3, Eigen::Vector3d(1, 1, 0));
  WaveguideResponse ra = waveguide_response(a, 0.01, 1.7, 5.0);
  WaveguideResponse rb = waveguide_response(b, 0.01, 1.7, 5.0);
  CHECK(ra.q_matrix == rb.q_matrix);
  CHECK(ra.gamma_matrix == rb.gamma_matrix);
}

TEST_CASE("non-finite geometry is rejected") {
  RhsPanel p = make_panel(2, 2, 0.01, 1, Eigen::Vector3d::Zero());
  p.center.x() = std::nan("");
  CHECK_THROWS(waveguide_response(p, 0.01, 1.0, 5.0));
  p = make_panel(2, 2, 0.01, 1, Eigen::Vector3d::Zero());
  CHECK_THROWS(waveguide_response(p, -0.01, 1.0, 5.0));
}
