#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ribbonlab/euclidean_ribbon.hpp"

using namespace ribbonlab;

namespace {

RibbonGeometry fourier_kappa_geometry(unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(-1.5, 1.5);
  const double a = amp(rng), b = amp(rng), c = amp(rng);
  RibbonGeometry g = make_preset("euclidean");
  g.kappa = SmoothField1D::analytic(
      [=](double s) { return a + b * std::sin(2 * M_PI * s) + c * std::cos(4 * M_PI * s); },
      [=](double s) {
        return 2 * M_PI * b * std::cos(2 * M_PI * s) - 4 * M_PI * c * std::sin(4 * M_PI * s);
      },
      [=](double s) {
        return -4 * M_PI * M_PI * b * std::sin(2 * M_PI * s) -
               16 * M_PI * M_PI * c * std::cos(4 * M_PI * s);
      });
  return g;
}

// Independent pullback-metric oracle: finite differences of chi values.
Eigen::Matrix2d fd_pullback(const PlanarImmersion& chi, double z1, double z2, double h = 1e-5) {
  const Eigen::Vector2d d1 = (chi.value(z1 + h, z2) - chi.value(z1 - h, z2)) / (2 * h);
  const Eigen::Vector2d d2 = (chi.value(z1, z2 + h) - chi.value(z1, z2 - h)) / (2 * h);
  Eigen::Matrix2d a;
  a << d1.dot(d1), d1.dot(d2), d1.dot(d2), d2.dot(d2);
  return a;
}

}  // namespace

TEST_CASE("planar immersion: zero curvature is the identity strip") {
  const PlanarImmersion chi = planar_immersion(make_preset("euclidean"), 0.1);
  CHECK((chi.value(0.37, 0.04) - Eigen::Vector2d(0.37, 0.04)).norm() <= 1e-12);
  CHECK_FALSE(chi.self_intersection_warning());
}

TEST_CASE("planar immersion: unit curvature midline lies on the unit circle") {
  RibbonGeometry g = make_preset("euclidean");
  g.kappa = SmoothField1D::constant(1.0);
  const PlanarImmersion chi = planar_immersion(g, 0.05);
  for (double z1 : {0.2, 0.5, 0.9}) {
    const Eigen::Vector2d expect(std::sin(z1), 1.0 - std::cos(z1));
    CHECK((chi.value(z1, 0.0) - expect).norm() <= 1e-8);
  }
}

TEST_CASE("planar immersion: pullback metric equals a for random kappa profiles") {
  for (unsigned seed : {1u, 2u, 3u}) {
    const RibbonGeometry g = fourier_kappa_geometry(seed);
    const PlanarImmersion chi = planar_immersion(g, 0.04);
    double worst = 0;
    for (double z1 : {0.1, 0.45, 0.8})
      for (double z2 : {-0.015, 0.0, 0.015}) {
        const Eigen::Matrix2d a = midsurface_metric(g, z1, z2);
        worst = std::max(worst, (fd_pullback(chi, z1, z2) - a).cwiseAbs().maxCoeff());
      }
    CHECK(worst <= 1e-8);
  }
}

TEST_CASE("euclidean ribbon: identity embedding for trivial data") {
  const EuclideanRibbon rib(make_preset("euclidean"), 0.01, 0.05);
  const Eigen::Vector3d z(0.4, 0.02, -0.003);
  CHECK((rib.psi(z) - z).norm() <= 1e-12);
  CHECK((rib.dpsi(z) - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("euclidean ribbon: constant normal curvature gives a cylinder") {
  const double l = 1.4;
  RibbonGeometry g = make_preset("fig1e", {{"kappa", 0.0}, {"l", l}});
  const EuclideanRibbon rib(g, 0.01, 0.05);
  for (double z1 : {0.3, 0.7, 1.0}) {
    const Eigen::Vector3d expect(std::sin(l * z1) / l, 0.0, (1.0 - std::cos(l * z1)) / l);
    CHECK((rib.phi(z1, 0.0) - expect).norm() <= 1e-8);
  }
  // Cross sections are straight lines in e2 = y.
  const Eigen::Vector3d p0 = rib.phi(0.5, 0.0);
  const Eigen::Vector3d p1 = rib.phi(0.5, 0.02);
  CHECK((p1 - p0 - Eigen::Vector3d(0, 0.02, 0)).norm() <= 1e-9);
}

TEST_CASE("euclidean ribbon: DPsi^T DPsi at the midline is the identity") {
  RibbonGeometry g = make_preset("euclidean");
  g.kappa = SmoothField1D::analytic_fd([](double s) { return 0.8 * std::sin(2 * s); });
  g.second_form = SymField2x2::analytic_fd([](double z1, double z2) {
    Eigen::Matrix2d m;
    m << 0.9 + 0.2 * std::sin(z1), 0.3 * z1 + 0.1 * z2, 0.3 * z1 + 0.1 * z2,
        0.5 * std::cos(z1) + 0.2 * z2;
    return m;
  });
  const EuclideanRibbon rib(g, 0.01, 0.04);
  for (double z1 : {0.15, 0.5, 0.85}) {
    const Eigen::Matrix3d d = rib.dpsi(Eigen::Vector3d(z1, 0.0, 0.0));
    CHECK((d.transpose() * d - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-8);
    // Q0 properties
    const Eigen::Matrix3d q0 = rib.q0(z1);
    CHECK((q0 - d).cwiseAbs().maxCoeff() <= 1e-9);
    CHECK(q0.determinant() == doctest::Approx(1.0).epsilon(1e-8));
    CHECK((q0.transpose() * q0 - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() <= 1e-9);
    // Q0 e1 = Phi'(z1, 0)
    const double h = 1e-5;
    const Eigen::Vector3d fd = (rib.phi(z1 + h, 0.0) - rib.phi(z1 - h, 0.0)) / (2 * h);
    CHECK((q0.col(0) - fd).norm() <= 1e-8);
  }
}

TEST_CASE("euclidean ribbon: analytic dpsi matches finite differences") {
  RibbonGeometry g = make_preset("fig1e", {{"kappa", 0.6}, {"l", 1.2}});
  const EuclideanRibbon rib(g, 0.02, 0.06);
  const Eigen::Vector3d z(0.42, 0.013, -0.006);
  const Eigen::Matrix3d d = rib.dpsi(z);
  const double h = 1e-6;
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector3d zp = z, zm = z;
    zp[c] += h;
    zm[c] -= h;
    const Eigen::Vector3d fd = (rib.psi(zp) - rib.psi(zm)) / (2 * h);
    CHECK((d.col(c) - fd).norm() <= 1e-6);
  }
}

TEST_CASE("expansion residual: euclidean data is exact") {
  const EuclideanRibbon rib(make_preset("euclidean"), 0.01, 0.05);
  const ExpansionResidual res = expansion_residual(rib);
  CHECK(res.exact);
}

TEST_CASE("expansion residual: generic data decays at the displayed orders") {
  const EuclideanRibbon rib(make_preset("fig1d", {{"kappa", 1.0}, {"n", 1.0}}), 0.02, 0.1);
  const ExpansionResidual res = expansion_residual(rib);
  CHECK_FALSE(res.exact);
  CHECK(res.slope_z2 >= 2.8);
  CHECK(res.slope_z3 >= 1.8);
}

TEST_CASE("expansion residual: X22 and the Gauss coefficient") {
  // Gauss-compatible fig1e: 11-entry z2^2 coefficient of DPsi^T DPsi - g
  // vanishes within fit error.
  {
    const EuclideanRibbon rib(make_preset("fig1e", {{"kappa", 0.5}, {"l", 1.0}}), 0.02, 0.08);
    const ExpansionResidual res = expansion_residual(rib);
    CHECK(std::abs(res.gauss_coeff_11(0.5)) <= 1e-5);
  }
  // Gauss-incompatible fig1a: the coefficient is -deltaG = -1.
  {
    const EuclideanRibbon rib(make_preset("fig1a"), 0.02, 0.08);
    const ExpansionResidual res = expansion_residual(rib);
    CHECK(res.gauss_coeff_11(0.5) == doctest::Approx(-1.0).epsilon(1e-4));
  }
}

TEST_CASE("realized pairs satisfy the Codazzi equations") {
  // Read (kappa, II) off a constructed Psi mid-surface and check the
  // Codazzi deficit of that pair vanishes.
  const RibbonGeometry base = make_preset("fig1e", {{"kappa", 0.5}, {"l", 1.1}});
  const EuclideanRibbon rib(base, 0.01, 0.06);
  RibbonGeometry realized = base;
  auto ribc = std::make_shared<EuclideanRibbon>(rib);
  realized.second_form = SymField2x2::analytic_fd(
      [ribc](double z1, double z2) {
        const Eigen::Matrix<double, 3, 2> j = ribc->dphi(z1, z2);
        const Eigen::Matrix<double, 3, 2> dn = ribc->dnormal(z1, z2);
        return Eigen::Matrix2d(-j.transpose() * dn);
      },
      1e-4);
  for (double z1 : {0.2, 0.5, 0.8})
    CHECK(codazzi_deficit(realized, z1).norm() <= 1e-5);
}
