#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace ribbonlab {

inline Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d s;
  s << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return s;
}

// Rodrigues exponential of a 3x3 skew matrix.
inline Eigen::Matrix3d exp_so3(const Eigen::Matrix3d& s) {
  const Eigen::Vector3d v(s(2, 1), s(0, 2), s(1, 0));
  const double th = v.norm();
  if (th < 1e-12) {
    return Eigen::Matrix3d::Identity() + s + 0.5 * s * s;
  }
  const double a = std::sin(th) / th;
  const double b = (1.0 - std::cos(th)) / (th * th);
  return Eigen::Matrix3d::Identity() + a * s + b * s * s;
}

// Rotation-valued path R on [0,L] solving R' = R*K(s) with K(s) skew.
// Integrated once on a dense uniform grid with a 4th-order Munthe-Kaas
// scheme; evaluation anywhere re-integrates locally from the nearest stored
// sample, so queries stay smooth and exactly orthogonal.
class FramePath {
 public:
  using GeneratorFn = std::function<Eigen::Matrix3d(double)>;

  FramePath() = default;

  FramePath(GeneratorFn generator, double length, const Eigen::Matrix3d& initial,
            int samples = 2048)
      : gen_(std::move(generator)), length_(length), n_(samples) {
    if (length_ <= 0 || n_ < 2) throw std::invalid_argument("FramePath: bad length or samples");
    h_ = length_ / n_;
    samples_.resize(n_ + 1);
    samples_[0] = initial;
    for (int i = 0; i < n_; ++i) {
      Eigen::Matrix3d r = step(samples_[i], i * h_, h_);
      project(r);
      samples_[i + 1] = r;
    }
  }

  double length() const { return length_; }

  Eigen::Matrix3d at(double s) const {
    int i = static_cast<int>(std::floor(s / h_));
    if (i < 0) i = 0;
    if (i > n_) i = n_;
    double s0 = i * h_;
    double ds = s - s0;
    if (std::abs(ds) < 1e-300) return samples_[i];
    // Two substeps keep the local error at the level of the base grid.
    Eigen::Matrix3d r = step(samples_[i], s0, 0.5 * ds);
    return step(r, s0 + 0.5 * ds, 0.5 * ds);
  }

  // R'(s) = R(s) K(s).
  Eigen::Matrix3d derivative(double s) const { return at(s) * gen_(s); }

  Eigen::Matrix3d generator(double s) const { return gen_(s); }

  // max over stored samples of ||R^T R - I||_inf.
  double orthogonality_drift() const {
    double worst = 0.0;
    for (const auto& r : samples_) {
      worst = std::max(worst,
                       (r.transpose() * r - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff());
    }
    return worst;
  }

  double min_det() const {
    double d = 1e300;
    for (const auto& r : samples_) d = std::min(d, r.determinant());
    return d;
  }

  int sample_count() const { return n_ + 1; }
  const Eigen::Matrix3d& sample(int i) const { return samples_[i]; }

 private:
  static Eigen::Matrix3d commutator(const Eigen::Matrix3d& a, const Eigen::Matrix3d& b) {
    return a * b - b * a;
  }

  // dexpinv_{-u}(w) truncated to double brackets (enough for order 4).
  static Eigen::Matrix3d dexpinv_neg(const Eigen::Matrix3d& u, const Eigen::Matrix3d& w) {
    Eigen::Matrix3d c1 = commutator(u, w);
    return w + 0.5 * c1 + (1.0 / 12.0) * commutator(u, c1);
  }

  Eigen::Matrix3d step(const Eigen::Matrix3d& r0, double s0, double dt) const {
    const Eigen::Matrix3d f1 = gen_(s0);
    Eigen::Matrix3d u2 = 0.5 * dt * f1;
    const Eigen::Matrix3d f2 = dexpinv_neg(u2, gen_(s0 + 0.5 * dt));
    Eigen::Matrix3d u3 = 0.5 * dt * f2;
    const Eigen::Matrix3d f3 = dexpinv_neg(u3, gen_(s0 + 0.5 * dt));
    Eigen::Matrix3d u4 = dt * f3;
    const Eigen::Matrix3d f4 = dexpinv_neg(u4, gen_(s0 + dt));
    Eigen::Matrix3d u = (dt / 6.0) * (f1 + 2 * f2 + 2 * f3 + f4);
    return r0 * exp_so3(u);
  }

  // One Newton polish toward the orthogonal manifold.
  static void project(Eigen::Matrix3d& r) {
    r = r * (1.5 * Eigen::Matrix3d::Identity() - 0.5 * (r.transpose() * r));
  }

  GeneratorFn gen_;
  double length_ = 0, h_ = 0;
  int n_ = 0;
  std::vector<Eigen::Matrix3d> samples_;
};

// Cumulative integral c(s) = c0 + int_0^s f(tau) dtau of a smooth
// vector-valued integrand, stored densely and evaluated by local
// Gauss quadrature from the nearest stored sample.
template <typename Vec>
class CumulativePath {
 public:
  using Fn = std::function<Vec(double)>;

  CumulativePath() = default;

  CumulativePath(Fn f, double length, const Vec& c0, int samples = 2048)
      : f_(std::move(f)), length_(length), n_(samples) {
    h_ = length_ / n_;
    values_.resize(n_ + 1);
    values_[0] = c0;
    for (int i = 0; i < n_; ++i) values_[i + 1] = values_[i] + gauss_segment(i * h_, h_);
  }

  Vec at(double s) const {
    int i = static_cast<int>(std::floor(s / h_));
    if (i < 0) i = 0;
    if (i > n_) i = n_;
    return values_[i] + gauss_segment(i * h_, s - i * h_);
  }

  Vec derivative(double s) const { return f_(s); }

 private:
  Vec gauss_segment(double s0, double ds) const {
    static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    Vec acc = 0.5 * ds * ws[0] * f_(s0 + 0.5 * ds * (1 + xs[0]));
    for (int q = 1; q < 5; ++q) acc += 0.5 * ds * ws[q] * f_(s0 + 0.5 * ds * (1 + xs[q]));
    return acc;
  }

  Fn f_;
  double length_ = 0, h_ = 0;
  int n_ = 0;
  std::vector<Vec> values_;
};

// Planar rotation path P(s) in SO(2) solving P' = P [[0,-k],[k,0]]:
// P is rotation by theta(s) = theta0 + int_0^s kappa.
class PlanarFramePath {
 public:
  PlanarFramePath() = default;

  PlanarFramePath(std::function<double(double)> kappa, double length, double theta0 = 0.0,
                  int samples = 2048)
      : theta_(std::move(kappa), length, theta0, samples) {}

  Eigen::Matrix2d at(double s) const {
    const double th = theta_.at(s);
    Eigen::Matrix2d p;
    p << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return p;
  }

  double angle(double s) const { return theta_.at(s); }

 private:
  CumulativePath<double> theta_;
};

}  // namespace ribbonlab
