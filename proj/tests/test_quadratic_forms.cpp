#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "ribbonlab/quadratic_forms.hpp"

using namespace ribbonlab;

namespace {

Eigen::Matrix3d random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> d;
  Eigen::Matrix3d m;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) m(i, j) = d(rng);
  return m;
}

// Isotropic closed form of tilde-Q2.
double q2_closed(const IsotropicModuli& m, const Eigen::Matrix2d& a) {
  const Eigen::Matrix2d s = 0.5 * (a + a.transpose());
  const double c = 2.0 * m.mu * m.lambda / (2.0 * m.mu + m.lambda);
  return 2.0 * m.mu * s.squaredNorm() + c * s.trace() * s.trace();
}

}  // namespace

TEST_CASE("density vanishes on rotations and is frame indifferent") {
  const IsotropicModuli m{1.0, 0.7};
  CHECK(density_w(m, Eigen::Matrix3d::Identity()) == 0.0);
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const Eigen::Matrix3d r = oracles::random_rotation(rng);
    CHECK(density_w(m, r) <= 1e-12);
    if (i < 50) {
      const Eigen::Matrix3d f = Eigen::Matrix3d::Identity() + 0.3 * random_matrix(rng);
      CHECK(std::abs(density_w(m, r * f) - density_w(m, f)) <= 1e-12 *
                std::max(1.0, density_w(m, f)));
    }
  }
}

TEST_CASE("density Taylor expansion matches q3 near the identity") {
  const IsotropicModuli m{1.0, 0.5};
  const QuadForm q3 = q3_at_identity(m);
  std::mt19937_64 rng(5);
  for (int i = 0; i < 20; ++i) {
    const Eigen::Matrix3d b = random_matrix(rng);
    const double w = density_w(m, Eigen::Matrix3d::Identity() + 1e-4 * b);
    const double expect = 1e-8 * q3(b);
    if (expect > 1e-16) CHECK(std::abs(w - expect) / expect <= 1e-3);
  }
}

TEST_CASE("q3 matches the finite-difference Hessian of the density") {
  std::mt19937_64 rng(17);
  for (const IsotropicModuli m : {IsotropicModuli{1.0, 0.0}, IsotropicModuli{1.3, 0.8}}) {
    const QuadForm q3 = q3_at_identity(m);
    auto w = [&](const Eigen::Matrix3d& f) { return density_w(m, f); };
    for (int i = 0; i < 10; ++i) {
      const Eigen::Matrix3d b = random_matrix(rng);
      const double fd = oracles::fd_hessian_form(w, b);
      CHECK(std::abs(q3(b) - fd) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
  // mu=1, lambda=0, B = e1 (x) e2 -> |sym B|^2 = 1/2, Q3 = 1.
  const QuadForm q = q3_at_identity({1.0, 0.0});
  Eigen::Matrix3d b = Eigen::Matrix3d::Zero();
  b(0, 1) = 1.0;
  CHECK(q(b) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(oracles::fd_hessian_form([&](const Eigen::Matrix3d& f) { return density_w({1.0, 0.0}, f); },
                                 b) == doctest::Approx(1.0).epsilon(1e-7));
  // skew arguments vanish
  Eigen::Matrix3d sk;
  sk << 0, 1, -2, -1, 0, 0.5, 2, -0.5, 0;
  CHECK(q3_at_identity({1.2, 0.4})(sk) == doctest::Approx(0.0));
  // mu = lambda = 1, B = I -> 2*3 + 9 = 15
  const Eigen::Matrix3d id3 = Eigen::Matrix3d::Identity();
  CHECK(q3_at_identity({1.0, 1.0})(id3) == doctest::Approx(15.0).epsilon(1e-14));
}

TEST_CASE("relax_to_2x2 equals the brute-force oracle and the closed form") {
  std::mt19937_64 rng(23);
  std::normal_distribution<double> d;
  for (const IsotropicModuli m : {IsotropicModuli{1.0, 0.0}, IsotropicModuli{1.0, 1.0},
                                  IsotropicModuli{0.7, 2.1}}) {
    const Relaxed2x2 rel = relax_to_2x2(q3_at_identity(m));
    for (int i = 0; i < 6; ++i) {
      Eigen::Matrix2d a;
      a << d(rng), d(rng), d(rng), d(rng);
      const double value = rel.q2(a);
      CHECK(std::abs(value - oracles::q2_bruteforce(q3_at_identity(m), a)) <= 1e-6);
      CHECK(std::abs(value - q2_closed(m, a)) <= 1e-10 * std::max(1.0, value));
      // minimization certificate at the returned completion
      const Eigen::Matrix3d b = rel.complete(a);
      CHECK(q3_at_identity(m)(b) == doctest::Approx(value).epsilon(1e-12));
      CHECK((b.topLeftCorner<2, 2>() - 0.5 * (a + a.transpose())).cwiseAbs().maxCoeff() <= 1e-12);
      // certificate: any competitor with the same block is no better
      Eigen::Matrix3d comp = b;
      comp(2, 2) += 0.3;
      comp(0, 2) += 0.1;
      CHECK(q3_at_identity(m)(comp) >= value - 1e-12);
      // depends on sym A only
      CHECK(rel.q2(Eigen::Matrix2d(a.transpose())) == doctest::Approx(value).epsilon(1e-14));
    }
  }
  // A = 0 -> 0 with zero completion; closed-form spot values.
  const Relaxed2x2 r10 = relax_to_2x2(q3_at_identity({1.0, 0.0}));
  const Eigen::Matrix2d zero2 = Eigen::Matrix2d::Zero();
  CHECK(r10.q2(zero2) == 0.0);
  CHECK(r10.complete(zero2).cwiseAbs().maxCoeff() == 0.0);
  const Eigen::Matrix2d id2 = Eigen::Matrix2d::Identity();
  CHECK(r10.q2(id2) == doctest::Approx(4.0).epsilon(1e-12));
  const Relaxed2x2 r11 = relax_to_2x2(q3_at_identity({1.0, 1.0}));
  CHECK(r11.q2(id2) == doctest::Approx(20.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("q2_circ matches its grid oracle and closed-form argmin") {
  const Relaxed2x2 r10 = relax_to_2x2(q3_at_identity({1.0, 0.0}));
  CHECK(q2_circ(r10.q2, 0.0, 0.0).value == 0.0);
  const Q2CircResult c10 = q2_circ(r10.q2, 1.0, 0.0);
  CHECK(c10.value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(c10.argmin_a22 == doctest::Approx(0.0));
  CHECK(std::abs(c10.value - oracles::q2circ_bruteforce(r10.q2, 1.0, 0.0)) <= 1e-8);

  const IsotropicModuli m{1.0, 1.0};
  const Relaxed2x2 r11 = relax_to_2x2(q3_at_identity(m));
  const Q2CircResult c11 = q2_circ(r11.q2, 1.0, 0.0);
  CHECK(std::abs(c11.value - oracles::q2circ_bruteforce(r11.q2, 1.0, 0.0)) <= 1e-8);
  const double c = 2.0 * m.mu * m.lambda / (2.0 * m.mu + m.lambda);
  CHECK(c11.argmin_a22 == doctest::Approx(-c / (2.0 * m.mu + c)).epsilon(1e-10));
}

TEST_CASE("q1 matches its oracle, limits and homogeneity") {
  const Relaxed2x2 r10 = relax_to_2x2(q3_at_identity({1.0, 0.0}));
  CHECK(q1(r10.q2).value == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(std::abs(q1(r10.q2).value - oracles::q1_bruteforce(r10.q2)) <= 1e-7);

  // lambda -> infinity: the trace penalty saturates at c = 2 mu lambda /
  // (2 mu + lambda) -> 2 mu, so the limit is min_y 2(1 + y^2) + 2(1 + y)^2 = 3
  // at y = -1/2 (not 4: the trace is penalized, not constrained).
  const Relaxed2x2 rbig = relax_to_2x2(q3_at_identity({1.0, 1e6}));
  CHECK(q1(rbig.q2).value == doctest::Approx(3.0).epsilon(1e-4));
  CHECK(q1(rbig.q2).argmin_a22 == doctest::Approx(-0.5).epsilon(1e-4));
  CHECK(std::abs(q1(rbig.q2).value - oracles::q1_bruteforce(rbig.q2)) <= 1e-5);

  // q1 for (s mu, s lambda) = s q1(mu, lambda)
  const double s = 3.7;
  const Relaxed2x2 rs = relax_to_2x2(q3_at_identity({s * 1.0, s * 0.6}));
  const Relaxed2x2 r1 = relax_to_2x2(q3_at_identity({1.0, 0.6}));
  CHECK(q1(rs.q2).value == doctest::Approx(s * q1(r1.q2).value).epsilon(1e-12));

  // The 3x3-relaxed route agrees with the q2 route.
  const QuadForm q3 = q3_at_identity({1.0, 0.6});
  const Eigen::Matrix3d sstar = q1_completion(q3, 1.0);
  CHECK(q3(sstar) == doctest::Approx(q1(r1.q2).value).epsilon(1e-12));
}

TEST_CASE("alpha_pm: isotropic value, attained boundary, and scaling") {
  const Relaxed2x2 r10 = relax_to_2x2(q3_at_identity({1.0, 0.0}));
  const auto [ap, am] = alpha_pm(r10.q2);
  CHECK(ap == doctest::Approx(4.0).epsilon(1e-6));
  CHECK(am == doctest::Approx(4.0).epsilon(1e-6));

  // Semidefinite at alpha+, broken 1e-3 beyond.
  const Eigen::Matrix3d cplus = r10.q2.coeffs() + ap * det_form_sym2();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cplus, Eigen::EigenvaluesOnly);
  CHECK(std::abs(es.eigenvalues().minCoeff()) <= 1e-6);
  const Eigen::Matrix3d cbeyond = r10.q2.coeffs() + (ap + 1e-3) * det_form_sym2();
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es2(cbeyond, Eigen::EigenvaluesOnly);
  CHECK(es2.eigenvalues().minCoeff() < 0.0);

  // alpha scales linearly with the form.
  const double s = 2.5;
  const QuadForm scaled = QuadForm::sym2(Eigen::Matrix3d(s * r10.q2.coeffs()));
  const auto [aps, ams] = alpha_pm(scaled);
  CHECK(aps == doctest::Approx(s * ap).epsilon(1e-5));
  CHECK(ams == doctest::Approx(s * am).epsilon(1e-5));

  // Nonnegativity on random symmetric matrices at alpha+ and alpha-.
  const IsotropicModuli m{0.9, 1.4};
  const Relaxed2x2 rm = relax_to_2x2(q3_at_identity(m));
  const auto [ap2, am2] = alpha_pm(rm.q2);
  std::mt19937_64 rng(31);
  std::normal_distribution<double> d;
  for (int i = 0; i < 200; ++i) {
    Eigen::Matrix2d mm;
    const double a = d(rng), b = d(rng), c = d(rng);
    mm << a, b, b, c;
    CHECK(rm.q2(mm) + ap2 * mm.determinant() >= -1e-8);
    CHECK(rm.q2(mm) - am2 * mm.determinant() >= -1e-8);
  }
}

TEST_CASE("plate form reduces to tilde-Q2 in the flat trivial cases") {
  const IsotropicModuli m{1.0, 0.0};
  const Relaxed2x2 rel = relax_to_2x2(q3_at_identity(m));

  // kappa = 0, II0 = 0: A0 = I and Q_w == tilde-Q2 exactly.
  {
    const EuclideanRibbon rib(make_preset("euclidean"), 0.001, 0.05);
    const QuadForm qw = plate_form(rib, Eigen::Vector2d(0.4, 0.3), m);
    CHECK((qw.coeffs() - rel.q2.coeffs()).cwiseAbs().maxCoeff() <= 1e-10);
  }
  // Any geometry at x2 = 0: A0 = Q0 and conjugation drops out.
  {
    const EuclideanRibbon rib(make_preset("fig1e", {{"kappa", 0.5}, {"l", 1.0}}), 0.001, 0.05);
    const QuadForm qw = plate_form(rib, Eigen::Vector2d(0.6, 0.0), m);
    CHECK((qw.coeffs() - rel.q2.coeffs()).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("plate form converges to tilde-Q2 linearly in w") {
  const IsotropicModuli m{1.0, 0.3};
  const Relaxed2x2 rel = relax_to_2x2(q3_at_identity(m));
  const RibbonGeometry geom = make_preset("fig1e", {{"kappa", 0.7}, {"l", 1.1}});
  std::vector<double> ws = {0.1, 0.05, 0.025};
  std::vector<double> errs;
  for (double w : ws) {
    const EuclideanRibbon rib(geom, 1e-4, w);
    const QuadForm qw = plate_form(rib, Eigen::Vector2d(0.5, 0.37), m);
    errs.push_back((qw.coeffs() - rel.q2.coeffs()).cwiseAbs().maxCoeff());
  }
  // coefficientwise <= C w: halving w should at least roughly halve the gap
  CHECK(errs[1] <= 0.75 * errs[0]);
  CHECK(errs[2] <= 0.75 * errs[1]);
  const double slope = oracles::fit_loglog_slope(ws, errs);
  CHECK(slope >= 0.8);
}
