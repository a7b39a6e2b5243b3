#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "ribbonlab/limit_energies.hpp"

using namespace ribbonlab;

namespace {
const IsotropicModuli kMu10{1.0, 0.0};
}

TEST_CASE("e0_gauss: zero state and zero deficit give zero") {
  CHECK(e0_gauss(make_preset("euclidean"), kMu10, MidlineState::zero()) == 0.0);
}

TEST_CASE("e0_gauss: unit deficit contributes Q1/720") {
  // fig1a has deltaG = 1 and Q1 = 2 at mu=1, lambda=0: value 1/360.
  const double v = e0_gauss(make_preset("fig1a"), kMu10, MidlineState::zero());
  CHECK(v == doctest::Approx(1.0 / 360.0).epsilon(1e-10));
}

TEST_CASE("e0_gauss: minimized by the zero state") {
  const RibbonGeometry g = make_preset("fig1a");
  const double at_zero = e0_gauss(g, kMu10, MidlineState::zero());
  MidlineState s = MidlineState::zero();
  s.alpha = SmoothField1D::constant(0.2);
  s.beta = SmoothField1D::analytic_fd([](double x) { return 0.1 * std::sin(x); });
  CHECK(e0_gauss(g, kMu10, s) > at_zero);
}

TEST_CASE("e0_gauss: state term is quadratic") {
  const RibbonGeometry g = make_preset("euclidean");  // deltaG = 0 isolates the state term
  MidlineState s = MidlineState::zero();
  s.alpha = SmoothField1D::constant(0.3);
  s.gammabar = SmoothField1D::constant(-0.2);
  const double e1 = e0_gauss(g, kMu10, s);
  MidlineState s2 = MidlineState::zero();
  s2.alpha = SmoothField1D::constant(0.6);
  s2.gammabar = SmoothField1D::constant(-0.4);
  CHECK(e0_gauss(g, kMu10, s2) == doctest::Approx(4.0 * e1).epsilon(1e-12));
}

TEST_CASE("e0_codazzi: closed-form second terms") {
  // geometry (d) with kappa = n = 1: (1/144) Q2circ(1, 0) = 2/144.
  const double vd =
      e0_codazzi(make_preset("fig1d", {{"kappa", 1.0}, {"n", 1.0}}), kMu10, MidlineState::zero());
  CHECK(vd == doctest::Approx(2.0 / 144.0).epsilon(1e-10));

  // deltaC == 0 with zero state: zero energy.
  RibbonGeometry flat = make_preset("fig1e", {{"kappa", 0.0}, {"l", 1.0}});
  CHECK(e0_codazzi(flat, kMu10, MidlineState::zero()) == doctest::Approx(0.0));

  // The deficit term does not depend on the state.
  const RibbonGeometry ge = make_preset("fig1e", {{"kappa", 0.5}, {"l", 1.0}});
  const double base = e0_codazzi(ge, kMu10, MidlineState::zero());
  MidlineState s = MidlineState::zero();
  s.beta = SmoothField1D::constant(0.4);
  const double shifted = e0_codazzi(ge, kMu10, s);
  // difference equals the pure state term (1/12) avg Q2(state)
  const double state_term = e0_gauss(make_preset("euclidean"), kMu10, s);
  CHECK(shifted - base == doctest::Approx(state_term).epsilon(1e-10));
}

TEST_CASE("e0_codazzi rejects Gauss-incompatible geometries") {
  CHECK_THROWS_AS((void)e0_codazzi(make_preset("fig1a"), kMu10, MidlineState::zero()),
                  std::domain_error);
}

TEST_CASE("plate_energy: reference field gives zero, constant offsets quadratically") {
  const RibbonGeometry g = make_preset("fig1d", {{"kappa", 0.0}, {"n", 0.8}});
  const double w = 0.05;
  const EuclideanRibbon rib(g, 0.0, w);

  StripField2x2 ref = StripField2x2::with_fd(
      [&g, w](double x1, double x2) { return g.second_form.value(x1, w * x2); });
  CHECK(plate_energy(rib, kMu10, ref) <= 1e-14);

  const double c = 0.3;
  StripField2x2 shifted = StripField2x2::with_fd([&g, w, c](double x1, double x2) {
    Eigen::Matrix2d m = g.second_form.value(x1, w * x2);
    m(0, 0) += c;
    return m;
  });
  // kappa = 0 and isotropic moduli: Q_w = tilde-Q2, value (1/12) * 2 c^2.
  CHECK(plate_energy(rib, kMu10, shifted) ==
        doctest::Approx(2.0 * c * c / 12.0).epsilon(1e-8));
}

TEST_CASE("wide_j: zero at the compatible reference, closed forms off it") {
  // m = II0 with det II0 = 0.
  const RibbonGeometry ge = make_preset("fig1e", {{"kappa", 0.3}, {"l", 1.0}});
  CHECK(wide_j(ge, kMu10, MidlineSecondForm{[&](double x1) { return ge.ii0(x1); }}) ==
        doctest::Approx(0.0));

  // m = 0 against II0 = I2: (1/12) Q2(-I) = 4/12.
  const RibbonGeometry ga = make_preset("fig1a");
  CHECK(wide_j(ga, kMu10, MidlineSecondForm::constant(Eigen::Matrix2d::Zero())) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-10));

  // m = II0 = I2: (1/12) alpha+ * det = 4/12.
  CHECK(wide_j(ga, kMu10, MidlineSecondForm::constant(Eigen::Matrix2d::Identity())) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-6));
}

TEST_CASE("min_j: Gauss-compatible presets reach zero with M* = II0") {
  for (const char* name : {"fig1b", "fig1c"}) {
    const MinJResult res = min_j(make_preset(name), kMu10);
    CHECK(res.value <= 1e-10);
    for (const auto& s : res.samples) {
      const Eigen::Matrix2d ii0 = make_preset(name).ii0(s.x1);
      CHECK((s.minimizer - ii0).norm() <= 1e-4);
    }
  }
  const MinJResult rese = min_j(make_preset("fig1e", {{"kappa", 0.4}, {"l", 1.3}}), kMu10);
  CHECK(rese.value <= 1e-10);
}

TEST_CASE("min_j: Gauss-incompatible dichotomy against the brute-force oracle") {
  const RibbonGeometry ga = make_preset("fig1a");
  const MinJResult res = min_j(ga, kMu10);
  CHECK(res.value > 0.0);

  const Relaxed2x2 rel = relax_to_2x2(q3_at_identity(kMu10));
  const auto [ap, am] = alpha_pm(rel.q2);
  double worst = 0;
  for (std::size_t i = 0; i < res.samples.size(); i += 7) {
    const auto& s = res.samples[i];
    const double oracle =
        oracles::minj_pointwise_bruteforce(rel.q2, ap, am, ga.ii0(s.x1));
    worst = std::max(worst, std::abs(s.f_min - oracle));
    CHECK(s.f_min <= oracle + 1e-8);
  }
  CHECK(worst <= 1e-6);

  // Minimizer gap |M* - II0| >= c |kappa1| with a positive constant.
  double cmin = 1e300;
  for (const auto& s : res.samples) {
    const Eigen::Matrix2d ii0 = ga.ii0(s.x1);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(ii0, Eigen::EigenvaluesOnly);
    const double k1 = std::min(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[1]));
    cmin = std::min(cmin, (s.minimizer - ii0).norm() / k1);
  }
  CHECK(cmin > 0.1);
  CHECK(res.c_lower > 0.0);
  CHECK(res.c_upper >= res.c_lower);
}

TEST_CASE("min_j value is rotation invariant for isotropic moduli") {
  Eigen::Matrix2d d;
  d << 2.0, 0.0, 0.0, 0.5;
  const double theta = 0.6;
  Eigen::Matrix2d r;
  r << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
  RibbonGeometry g1 = make_preset("euclidean");
  g1.second_form = SymField2x2::constant(d);
  RibbonGeometry g2 = make_preset("euclidean");
  g2.second_form = SymField2x2::constant(Eigen::Matrix2d(r.transpose() * d * r));
  const double v1 = min_j(g1, kMu10).value;
  const double v2 = min_j(g2, kMu10).value;
  CHECK(std::abs(v1 - v2) <= 1e-8);
}

TEST_CASE("B-structure fields") {
  // alpha = beta = 0 gives B0 = 0.
  const RibbonGeometry ge = make_preset("fig1e", {{"kappa", 0.5}, {"l", 1.0}});
  CHECK(make_b0(ge, 0.0, 0.0, 0.3).cwiseAbs().maxCoeff() == 0.0);

  // fig1e: B1 = -[[kappa l, 0], [0, 0]].
  const Eigen::Matrix2d b1 = make_b1(ge, 0.4);
  Eigen::Matrix2d expect;
  expect << -0.5, 0, 0, 0;
  CHECK((b1 - expect).cwiseAbs().maxCoeff() <= 1e-12);

  // II0 = diag(l, 0) with generic II1: B1 = -[[d1, d2],[d2, g/l]].
  const double l = 1.5, l1 = 0.3, m1 = -0.4, n1 = 0.7;
  RibbonGeometry g = make_preset("euclidean");
  g.second_form = SymField2x2::analytic(
      [=](double, double z2) {
        Eigen::Matrix2d m;
        m << l + l1 * z2, m1 * z2, m1 * z2, n1 * z2;
        return m;
      },
      [](double, double) { return Eigen::Matrix2d::Zero().eval(); },
      [=](double, double) {
        Eigen::Matrix2d m;
        m << l1, m1, m1, n1;
        return m;
      });
  const Eigen::Vector2d dc = codazzi_deficit(g, 0.2);  // (l1, m1) here
  CHECK(dc[0] == doctest::Approx(l1));
  CHECK(dc[1] == doctest::Approx(m1));
  const double dg1 = gauss_deficit_1(g, 0.2);  // n1 * l
  const Eigen::Matrix2d b = make_b1(g, 0.2);
  CHECK(b(0, 0) == doctest::Approx(-dc[0]));
  CHECK(b(0, 1) == doctest::Approx(-dc[1]));
  CHECK(b(1, 1) == doctest::Approx(-dg1 / l));

  // l0 = 0 is rejected, naming the assumption.
  CHECK_THROWS_AS((void)make_b1(make_preset("fig1d"), 0.3), std::domain_error);
}

TEST_CASE("codazzi_i: value, minimum and state monotonicity") {
  // No deficits: zero.
  const RibbonGeometry flat = make_preset("fig1e", {{"kappa", 0.0}, {"l", 1.0}});
  const CodazziIResult zero = codazzi_i(flat, kMu10, SmoothField1D::constant(0),
                                        SmoothField1D::constant(0));
  CHECK(zero.value == doctest::Approx(0.0));

  const RibbonGeometry ge = make_preset("fig1e", {{"kappa", 0.5}, {"l", 1.0}});
  const CodazziIResult base =
      codazzi_i(ge, kMu10, SmoothField1D::constant(0), SmoothField1D::constant(0));
  CHECK(base.value > 0.0);
  CHECK(base.value == doctest::Approx(base.minimum).epsilon(1e-12));
  // (1/144) avg Q2(B1) with B1 = -[[0.5,0],[0,0]]: Q2 = 2*0.25 = 0.5.
  CHECK(base.minimum == doctest::Approx(0.5 / 144.0).epsilon(1e-10));

  const CodazziIResult bumped = codazzi_i(ge, kMu10, SmoothField1D::constant(0.3),
                                          SmoothField1D::constant(-0.1));
  CHECK(bumped.value > base.value);
  // difference is (1/12) avg Q2(B0)
  const Eigen::Matrix2d b0 = make_b0(ge, 0.3, -0.1, 0.5);
  const Relaxed2x2 rel = relax_to_2x2(q3_at_identity(kMu10));
  CHECK(bumped.value - base.value == doctest::Approx(rel.q2(b0) / 12.0).epsilon(1e-10));

  CHECK(base.scaling_surrogate > 0.0);
}
