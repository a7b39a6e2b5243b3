#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <memory>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ribbonlab {

// Scalar field on [0,L] carrying value and derivatives up to order 2.
// Backed either by closed-form evaluators or by a sampled table with
// quintic Hermite interpolation (C^2 across knots).
class SmoothField1D {
 public:
  using Fn = std::function<double(double)>;

  SmoothField1D()
      : value_([](double) { return 0.0; }),
        d1_([](double) { return 0.0; }),
        d2_([](double) { return 0.0; }) {}

  static SmoothField1D constant(double c) {
    SmoothField1D f;
    f.value_ = [c](double) { return c; };
    return f;
  }

  static SmoothField1D analytic(Fn value, Fn d1, Fn d2) {
    SmoothField1D f;
    f.value_ = std::move(value);
    f.d1_ = std::move(d1);
    f.d2_ = std::move(d2);
    return f;
  }

  // Closed-form value with finite-difference derivatives. Step chosen for
  // ~1e-10 absolute accuracy on O(1)-smooth data.
  static SmoothField1D analytic_fd(Fn value, double h = 1e-4) {
    SmoothField1D f;
    Fn v = value;
    f.value_ = v;
    f.d1_ = [v, h](double s) { return (v(s + h) - v(s - h)) / (2 * h); };
    f.d2_ = [v, h](double s) { return (v(s + h) - 2 * v(s) + v(s - h)) / (h * h); };
    return f;
  }

  // Uniformly sampled table, quintic Hermite per interval. Knot first and
  // second derivatives come from 5-point central stencils (one-sided at the
  // ends), so the interpolant is C^2 and ~O(h^4) accurate.
  static SmoothField1D from_samples(const Eigen::VectorXd& grid, const Eigen::VectorXd& values);

  double operator()(double s) const { return value_(s); }
  double d1(double s) const { return d1_(s); }
  double d2(double s) const { return d2_(s); }

 private:
  Fn value_, d1_, d2_;
};

namespace detail {

struct QuinticTable {
  double s0 = 0, h = 1;
  std::vector<double> v, dv, d2v;  // knot data

  // Hermite quintic on [knot i, knot i+1] matching (v, dv, d2v) at both ends.
  // Returns value and first/second derivative at local coordinate u in [0,1].
  void eval(double s, double* val, double* der1, double* der2) const {
    const int n = static_cast<int>(v.size());
    double x = (s - s0) / h;
    int i = static_cast<int>(std::floor(x));
    if (i < 0) i = 0;
    if (i > n - 2) i = n - 2;
    const double u = x - i;
    const double a0 = v[i], a1 = dv[i] * h, a2 = 0.5 * d2v[i] * h * h;
    const double b0 = v[i + 1], b1 = dv[i + 1] * h, b2 = 0.5 * d2v[i + 1] * h * h;
    // Quintic coefficients matching value/d1/d2 at u=0 and u=1.
    const double c0 = a0, c1 = a1, c2 = a2;
    const double r0 = b0 - (a0 + a1 + a2);
    const double r1 = b1 - (a1 + 2 * a2);
    const double r2 = b2 - a2;
    const double c3 = 10 * r0 - 4 * r1 + r2;
    const double c4 = -15 * r0 + 7 * r1 - 2 * r2;
    const double c5 = 6 * r0 - 3 * r1 + r2;
    const double u2 = u * u, u3 = u2 * u, u4 = u3 * u, u5 = u4 * u;
    if (val) *val = c0 + c1 * u + c2 * u2 + c3 * u3 + c4 * u4 + c5 * u5;
    if (der1)
      *der1 = (c1 + 2 * c2 * u + 3 * c3 * u2 + 4 * c4 * u3 + 5 * c5 * u4) / h;
    if (der2) *der2 = (2 * c2 + 6 * c3 * u + 12 * c4 * u2 + 20 * c5 * u3) / (h * h);
  }
};

// 5-point finite-difference first and second derivatives on a uniform grid.
inline void table_derivatives(const std::vector<double>& v, double h, std::vector<double>& dv,
                              std::vector<double>& d2v) {
  const int n = static_cast<int>(v.size());
  dv.assign(n, 0.0);
  d2v.assign(n, 0.0);
  auto at = [&](int i) { return v[i]; };
  for (int i = 0; i < n; ++i) {
    if (i >= 2 && i <= n - 3) {
      dv[i] = (-at(i + 2) + 8 * at(i + 1) - 8 * at(i - 1) + at(i - 2)) / (12 * h);
      d2v[i] = (-at(i + 2) + 16 * at(i + 1) - 30 * at(i) + 16 * at(i - 1) - at(i - 2)) /
               (12 * h * h);
    } else if (i < 2) {
      dv[i] = (-25 * at(i) + 48 * at(i + 1) - 36 * at(i + 2) + 16 * at(i + 3) - 3 * at(i + 4)) /
              (12 * h);
      d2v[i] = (35 * at(i) - 104 * at(i + 1) + 114 * at(i + 2) - 56 * at(i + 3) + 11 * at(i + 4)) /
               (12 * h * h);
    } else {
      dv[i] = (25 * at(i) - 48 * at(i - 1) + 36 * at(i - 2) - 16 * at(i - 3) + 3 * at(i - 4)) /
              (12 * h);
      d2v[i] = (35 * at(i) - 104 * at(i - 1) + 114 * at(i - 2) - 56 * at(i - 3) + 11 * at(i - 4)) /
               (12 * h * h);
    }
  }
}

}  // namespace detail

inline SmoothField1D SmoothField1D::from_samples(const Eigen::VectorXd& grid,
                                                 const Eigen::VectorXd& values) {
  if (grid.size() != values.size() || grid.size() < 6)
    throw std::invalid_argument("SmoothField1D::from_samples: need >= 6 equally spaced samples");
  auto table = std::make_shared<detail::QuinticTable>();
  table->s0 = grid[0];
  table->h = grid[1] - grid[0];
  const int n = static_cast<int>(grid.size());
  for (int i = 1; i + 1 < n; ++i) {
    if (std::abs((grid[i + 1] - grid[i]) - table->h) > 1e-9 * std::abs(table->h))
      throw std::invalid_argument("SmoothField1D::from_samples: grid must be uniform");
  }
  table->v.assign(values.data(), values.data() + n);
  detail::table_derivatives(table->v, table->h, table->dv, table->d2v);
  SmoothField1D f;
  f.value_ = [table](double s) {
    double v;
    table->eval(s, &v, nullptr, nullptr);
    return v;
  };
  f.d1_ = [table](double s) {
    double d;
    table->eval(s, nullptr, &d, nullptr);
    return d;
  };
  f.d2_ = [table](double s) {
    double d;
    table->eval(s, nullptr, nullptr, &d);
    return d;
  };
  return f;
}

// Helper: sample a function on [a,b] and wrap it as a spline-backed field.
inline SmoothField1D sample_field(double a, double b, int n,
                                  const std::function<double(double)>& f) {
  Eigen::VectorXd grid(n), values(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = a + (b - a) * i / (n - 1);
    values[i] = f(grid[i]);
  }
  return SmoothField1D::from_samples(grid, values);
}

// Symmetric 2x2 matrix field on the physical strip (z1,z2), with first
// partial derivatives. Values are symmetrized on return.
class SymField2x2 {
 public:
  using MatFn = std::function<Eigen::Matrix2d(double, double)>;

  SymField2x2()
      : value_([](double, double) { return Eigen::Matrix2d::Zero().eval(); }),
        d1_([](double, double) { return Eigen::Matrix2d::Zero().eval(); }),
        d2_([](double, double) { return Eigen::Matrix2d::Zero().eval(); }) {}

  static SymField2x2 constant(const Eigen::Matrix2d& m) {
    Eigen::Matrix2d sym = 0.5 * (m + m.transpose());
    SymField2x2 f;
    f.value_ = [sym](double, double) { return sym; };
    return f;
  }

  static SymField2x2 analytic(MatFn value, MatFn d1, MatFn d2) {
    SymField2x2 f;
    f.value_ = std::move(value);
    f.d1_ = std::move(d1);
    f.d2_ = std::move(d2);
    return f;
  }

  static SymField2x2 analytic_fd(MatFn value, double h = 1e-5) {
    SymField2x2 f;
    MatFn v = value;
    f.value_ = v;
    f.d1_ = [v, h](double z1, double z2) {
      return ((v(z1 + h, z2) - v(z1 - h, z2)) / (2 * h)).eval();
    };
    f.d2_ = [v, h](double z1, double z2) {
      return ((v(z1, z2 + h) - v(z1, z2 - h)) / (2 * h)).eval();
    };
    return f;
  }

  Eigen::Matrix2d value(double z1, double z2) const {
    Eigen::Matrix2d m = value_(z1, z2);
    return 0.5 * (m + m.transpose());
  }
  Eigen::Matrix2d d1(double z1, double z2) const {
    Eigen::Matrix2d m = d1_(z1, z2);
    return 0.5 * (m + m.transpose());
  }
  Eigen::Matrix2d d2(double z1, double z2) const {
    Eigen::Matrix2d m = d2_(z1, z2);
    return 0.5 * (m + m.transpose());
  }

 private:
  MatFn value_, d1_, d2_;
};

// Symmetric 2x2 field on the rescaled strip S = (0,L) x (-1/2,1/2), with
// partials in the rescaled coordinates (x1, x2). Used for second-form
// fields entering plate energies and Gauss-Codazzi residuals.
struct StripField2x2 {
  using MatFn = std::function<Eigen::Matrix2d(double, double)>;
  MatFn value;
  MatFn d1, d2;

  static StripField2x2 analytic(MatFn v, MatFn dx1, MatFn dx2) {
    return StripField2x2{std::move(v), std::move(dx1), std::move(dx2)};
  }

  static StripField2x2 with_fd(MatFn v, double h = 1e-5) {
    StripField2x2 f;
    f.value = v;
    f.d1 = [v, h](double x1, double x2) {
      return ((v(x1 + h, x2) - v(x1 - h, x2)) / (2 * h)).eval();
    };
    f.d2 = [v, h](double x1, double x2) {
      return ((v(x1, x2 + h) - v(x1, x2 - h)) / (2 * h)).eval();
    };
    return f;
  }
};

}  // namespace ribbonlab
