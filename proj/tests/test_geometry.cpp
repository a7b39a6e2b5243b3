#include <random>

#include "doctest.h"
#include "ribbonlab/geometry.hpp"

using namespace ribbonlab;

TEST_CASE("euclidean metric is the identity") {
  const RibbonGeometry g = make_preset("euclidean");
  CHECK((metric_at(g, Eigen::Vector3d(0.3, 0.02, 0.01)) - Eigen::Matrix3d::Identity())
            .cwiseAbs()
            .maxCoeff() == 0.0);
}

TEST_CASE("flat metric with kappa = 1 at z = (0, 0.1, 0)") {
  RibbonGeometry g = make_preset("euclidean");
  g.kappa = SmoothField1D::constant(1.0);
  const Eigen::Matrix3d m = metric_at(g, Eigen::Vector3d(0.0, 0.1, 0.0));
  CHECK(m(0, 0) == doctest::Approx(0.81).epsilon(1e-15));
  CHECK(m(1, 1) == 1.0);
  CHECK(m(2, 2) == 1.0);
  CHECK(std::abs(m(0, 1)) + std::abs(m(0, 2)) + std::abs(m(1, 2)) == 0.0);
}

TEST_CASE("second-form block enters the metric at -2 z3") {
  const double n = 0.7;
  RibbonGeometry g = make_preset("fig1d", {{"kappa", 0.0}, {"n", n}});
  const Eigen::Matrix3d m = metric_at(g, Eigen::Vector3d(0.0, 0.1, 0.05));
  Eigen::Matrix3d expect = Eigen::Matrix3d::Identity();
  expect(1, 1) -= 0.1 * n;  // -2 * 0.05 * n
  CHECK((m - expect).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("midsurface metric equals the upper metric block at z3 = 0") {
  const RibbonGeometry g = make_preset("fig1e", {{"kappa", 0.4}, {"l", 1.2}});
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u1(0.0, 1.0), u2(-0.05, 0.05);
  for (int i = 0; i < 100; ++i) {
    const double z1 = u1(rng), z2 = u2(rng);
    const Eigen::Matrix2d a = midsurface_metric(g, z1, z2);
    const Eigen::Matrix3d m = metric_at(g, Eigen::Vector3d(z1, z2, 0.0));
    CHECK((a - m.topLeftCorner<2, 2>()).cwiseAbs().maxCoeff() == 0.0);
  }
  // kappa = 1 closed form
  RibbonGeometry flat = make_preset("euclidean");
  flat.kappa = SmoothField1D::constant(1.0);
  const Eigen::Matrix2d a = midsurface_metric(flat, 0.0, 0.1);
  CHECK(a(0, 0) == doctest::Approx(0.81).epsilon(1e-15));
  CHECK(a(1, 1) == 1.0);
}

TEST_CASE("flat metric determinant at z3 = 0 equals (1 - kappa z2)^2 exactly") {
  RibbonGeometry g = make_preset("fig1d", {{"kappa", 0.6}, {"n", 0.0}});
  for (double z2 : {-0.04, 0.0, 0.07}) {
    const double det = midsurface_metric(g, 0.2, z2).determinant();
    const double c = 1.0 - 0.6 * z2;
    CHECK(det == doctest::Approx(c * c).epsilon(1e-15));
  }
}

TEST_CASE("gauss deficit closed forms") {
  CHECK(gauss_deficit(make_preset("fig1d", {{"n", 2.0}}), 0.3) == 0.0);
  CHECK(gauss_deficit(make_preset("fig1a"), 0.5) == doctest::Approx(1.0));

  // II0 = [[1,2],[2,1]] with K^S = -1: deficit = -3 + 1 = -2.
  RibbonGeometry g;
  g.length = 1.0;
  g.kappa = SmoothField1D::constant(0.0);
  g.flat = false;
  g.gaussian_curvature = [](double, double) { return -1.0; };
  Eigen::Matrix2d ii;
  ii << 1, 2, 2, 1;
  g.second_form = SymField2x2::constant(ii);
  CHECK(gauss_deficit(g, 0.1) == doctest::Approx(-2.0));
}

TEST_CASE("codazzi deficit closed forms") {
  // geometry (d): kappa, n constants -> (kappa n, 0)
  const RibbonGeometry d = make_preset("fig1d", {{"kappa", 0.9}, {"n", 1.3}});
  const Eigen::Vector2d dc_d = codazzi_deficit(d, 0.4);
  CHECK(dc_d[0] == doctest::Approx(0.9 * 1.3).epsilon(1e-14));
  CHECK(dc_d[1] == doctest::Approx(0.0));

  // geometry (b): a = I, II = diag(0, x1) -> (0, -1)
  const RibbonGeometry b = make_preset("fig1b");
  const Eigen::Vector2d dc_b = codazzi_deficit(b, 0.7);
  CHECK(dc_b[0] == doctest::Approx(0.0));
  CHECK(dc_b[1] == doctest::Approx(-1.0).epsilon(1e-14));

  // constant II with kappa = 0: all terms vanish
  RibbonGeometry c = make_preset("euclidean");
  Eigen::Matrix2d ii;
  ii << 0.3, 0.1, 0.1, -0.2;
  c.second_form = SymField2x2::constant(ii);
  CHECK(codazzi_deficit(c, 0.5).norm() == 0.0);
}

TEST_CASE("first-order gauss deficit") {
  // II0 = diag(0, n), II1 = [[l1, m1],[m1, n1]] -> l1 * n.
  RibbonGeometry g = make_preset("euclidean");
  const double n = 1.7, l1 = 0.4, m1 = 0.9, n1 = -0.3;
  g.second_form = SymField2x2::analytic(
      [=](double, double z2) {
        Eigen::Matrix2d m;
        m << l1 * z2, m1 * z2, m1 * z2, n + n1 * z2;
        return m;
      },
      [](double, double) { return Eigen::Matrix2d::Zero().eval(); },
      [=](double, double) {
        Eigen::Matrix2d m;
        m << l1, m1, m1, n1;
        return m;
      });
  CHECK(gauss_deficit_1(g, 0.2) == doctest::Approx(l1 * n).epsilon(1e-14));

  CHECK(gauss_deficit_1(make_preset("fig1d"), 0.5) == doctest::Approx(0.0));
  CHECK(gauss_deficit_1(make_preset("fig1b"), 0.5) == doctest::Approx(0.0));

  // Precondition: undefined off the Gauss-compatible stratum.
  CHECK_THROWS_AS((void)gauss_deficit_1(make_preset("fig1a"), 0.5), std::domain_error);
}

TEST_CASE("gauss deficit equals det II0 whenever the geometry is flat") {
  const RibbonGeometry g = make_preset("fig1c");
  for (double z1 : {0.1, 0.5, 0.9})
    CHECK(gauss_deficit(g, z1) == doctest::Approx(g.ii0(z1).determinant()));
}

TEST_CASE("admissibility margins reject oversized strips") {
  const RibbonGeometry g = make_preset("fig1d", {{"kappa", 5.0}, {"n", 1.0}});
  CHECK(is_admissible(g, 0.001, 0.05));
  std::string why;
  CHECK_FALSE(is_admissible(g, 0.001, 0.4, &why));  // 1 - kappa z2 hits the margin
  CHECK(!why.empty());
  CHECK_THROWS_AS(require_admissible(g, 0.001, 0.4), std::domain_error);
}

TEST_CASE("non-positive-definite metric names the offending point") {
  const RibbonGeometry g = make_preset("fig1d", {{"kappa", 0.0}, {"n", 1.0}});
  CHECK_THROWS_AS((void)metric_at(g, Eigen::Vector3d(0.1, 0.0, 0.8)), std::domain_error);
}
