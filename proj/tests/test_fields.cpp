#include <cmath>

#include "doctest.h"
#include "ribbonlab/fields.hpp"

using namespace ribbonlab;

TEST_CASE("quintic spline reproduces smooth data with two derivatives") {
  auto f = [](double s) { return std::sin(3.0 * s) + 0.2 * s * s; };
  auto df = [](double s) { return 3.0 * std::cos(3.0 * s) + 0.4 * s; };
  auto d2f = [](double s) { return -9.0 * std::sin(3.0 * s) + 0.4; };
  const SmoothField1D spline = sample_field(0.0, 1.0, 201, f);
  for (double s : {0.05, 0.31, 0.5, 0.77, 0.95}) {
    CHECK(spline(s) == doctest::Approx(f(s)).epsilon(1e-9));
    CHECK(spline.d1(s) == doctest::Approx(df(s)).epsilon(1e-6));
    CHECK(spline.d2(s) == doctest::Approx(d2f(s)).epsilon(1e-4));
  }
}

TEST_CASE("field derivative evaluators agree with central differences") {
  const SmoothField1D g = SmoothField1D::analytic(
      [](double s) { return std::exp(0.5 * s) * std::cos(s); },
      [](double s) { return std::exp(0.5 * s) * (0.5 * std::cos(s) - std::sin(s)); },
      [](double s) { return std::exp(0.5 * s) * (-0.75 * std::cos(s) - std::sin(s)); });
  const double h = 1e-5;
  for (double s : {0.2, 0.6, 0.9}) {
    const double fd1 = (g(s + h) - g(s - h)) / (2 * h);
    const double fd2 = (g(s + h) - 2 * g(s) + g(s - h)) / (h * h);
    CHECK(std::abs(g.d1(s) - fd1) <= 1e-6 * std::max(1.0, std::abs(fd1)));
    CHECK(std::abs(g.d2(s) - fd2) <= 1e-4 * std::max(1.0, std::abs(fd2)));
  }
}

TEST_CASE("SymField2x2 returns exactly symmetric values and consistent partials") {
  const SymField2x2 f = SymField2x2::analytic_fd([](double z1, double z2) {
    Eigen::Matrix2d m;
    m << std::sin(z1), z1 * z2, z1 * z2, std::cos(z2);
    return m;
  });
  const Eigen::Matrix2d v = f.value(0.4, 0.1);
  CHECK(v(0, 1) == v(1, 0));
  const double h = 1e-4;
  const Eigen::Matrix2d fd1 = (f.value(0.4 + h, 0.1) - f.value(0.4 - h, 0.1)) / (2 * h);
  CHECK((f.d1(0.4, 0.1) - fd1).cwiseAbs().maxCoeff() <= 1e-6);
  const Eigen::Matrix2d fd2 = (f.value(0.4, 0.1 + h) - f.value(0.4, 0.1 - h)) / (2 * h);
  CHECK((f.d2(0.4, 0.1) - fd2).cwiseAbs().maxCoeff() <= 1e-6);
}
