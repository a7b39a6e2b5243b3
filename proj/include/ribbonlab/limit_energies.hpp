#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "ribbonlab/euclidean_ribbon.hpp"
#include "ribbonlab/fields.hpp"
#include "ribbonlab/geometry.hpp"
#include "ribbonlab/quadratic_forms.hpp"

namespace ribbonlab {

// Limiting midline fields (alpha, beta, gammabar) of the narrow-regime
// limits; measure the leading deviation of the midline second form.
struct MidlineState {
  SmoothField1D alpha, beta, gammabar;
  static MidlineState zero() {
    return {SmoothField1D::constant(0), SmoothField1D::constant(0), SmoothField1D::constant(0)};
  }
};

// Symmetric 2x2 field on (0,L).
struct MidlineSecondForm {
  std::function<Eigen::Matrix2d(double)> value;
  static MidlineSecondForm constant(const Eigen::Matrix2d& m) {
    Eigen::Matrix2d s = 0.5 * (m + m.transpose());
    return {[s](double) { return s; }};
  }
};

// x1-dependent access to the relaxed forms. Isotropic moduli give
// x1-independent forms (the conjugation by Q0 drops out).
class LimitForms {
 public:
  explicit LimitForms(const IsotropicModuli& m);
  LimitForms(const QuadForm& q3, std::function<Eigen::Matrix3d(double)> frame);

  const QuadForm& q3(double x1) const;
  const Relaxed2x2& relaxed(double x1) const;
  double q2circ(double x1, double a, double b) const;
  double q1_value(double x1) const;
  std::pair<double, double> alphas(double x1) const;

 private:
  bool constant_ = true;
  QuadForm q3_const_;
  Relaxed2x2 relaxed_const_;
  std::pair<double, double> alphas_const_;
  std::function<Eigen::Matrix3d(double)> frame_;
  QuadForm q3_base_;
  mutable double cache_x1_ = std::numeric_limits<double>::quiet_NaN();
  mutable QuadForm q3_cache_;
  mutable Relaxed2x2 relaxed_cache_;
  void refresh(double x1) const;
};

struct QuadratureOptions {
  int panels_x1 = 64;  // composite 5-point Gauss-Legendre panels on (0,L)
  int panels_x2 = 16;
};

// Narrow-regime Gauss limit:
// (1/12) avg tilde-Q2(x1, [[alpha,beta],[beta,gammabar]])
//   + (1/720) avg tilde-Q1(x1) deltaG(x1)^2.
double e0_gauss(const RibbonGeometry& geom, const LimitForms& forms, const MidlineState& state,
                const QuadratureOptions& opt = {});
double e0_gauss(const RibbonGeometry& geom, const IsotropicModuli& m, const MidlineState& state,
                const QuadratureOptions& opt = {});

// Narrow-regime Codazzi limit (requires deltaG == 0):
// (1/12) avg tilde-Q2(...) + (1/144) avg tilde-Q2circ(x1, deltaC1, deltaC2).
double e0_codazzi(const RibbonGeometry& geom, const LimitForms& forms, const MidlineState& state,
                  const QuadratureOptions& opt = {});
double e0_codazzi(const RibbonGeometry& geom, const IsotropicModuli& m, const MidlineState& state,
                  const QuadratureOptions& opt = {});

// Plate limit energy: (1/12) avg over S of Q_w(x', II_field(x') - II(x1, w x2)).
double plate_energy(const EuclideanRibbon& ribbon, const QuadForm& q3,
                    const StripField2x2& ii_field, const QuadratureOptions& opt = {});
double plate_energy(const EuclideanRibbon& ribbon, const IsotropicModuli& m,
                    const StripField2x2& ii_field, const QuadratureOptions& opt = {});

// Wide-regime Gauss limit J of a candidate midline second form m:
// (1/12) avg [ tilde-Q2(m - II0) + alpha+ (det m)^+ + alpha- (det m)^- ].
double wide_j(const RibbonGeometry& geom, const LimitForms& forms, const MidlineSecondForm& m,
              const QuadratureOptions& opt = {});
double wide_j(const RibbonGeometry& geom, const IsotropicModuli& m, const MidlineSecondForm& mm,
              const QuadratureOptions& opt = {});

// Pointwise minimization of f(x1, M) = tilde-Q2(M - II0) + alpha+(det M)^+
// + alpha-(det M)^-. Branch candidates (stationary points with +-alpha cof M
// and a parametrized det M = 0 search) plus a safeguarded direct search.
struct MinJSample {
  double x1 = 0;
  Eigen::Matrix2d minimizer = Eigen::Matrix2d::Zero();
  double f_min = 0;
  int branch = 0;  // 0 = det-zero, +1 / -1 = signed-det stationary, 9 = direct search
};
struct MinJResult {
  double value = 0;  // (1/12) avg of f_min
  std::vector<MinJSample> samples;
  // Fitted constants in c kappa1^2 <= min f <= C kappa1^2 over x1 with
  // kappa1 != 0 (kappa1 = smaller-modulus principal curvature of II0).
  double c_lower = 0, c_upper = 0;
};
MinJResult min_j(const RibbonGeometry& geom, const LimitForms& forms,
                 const QuadratureOptions& opt = {});
MinJResult min_j(const RibbonGeometry& geom, const IsotropicModuli& m,
                 const QuadratureOptions& opt = {});

// B-structure fields of the wide Codazzi limit; require det II0 == 0 and
// l0 = II0_11 bounded away from zero.
Eigen::Matrix2d make_b0(const RibbonGeometry& geom, double alpha, double beta, double x1);
Eigen::Matrix2d make_b1(const RibbonGeometry& geom, double x1);

// Codazzi-scale limit I(alpha,beta) = (1/12) avg tilde-Q2(B0)
// + (1/144) avg tilde-Q2(B1), with the minimum (alpha = beta = 0) and the
// deficit-based scaling surrogate.
struct CodazziIResult {
  double value = 0;
  double minimum = 0;             // (1/144) avg tilde-Q2(B1)
  double scaling_surrogate = 0;   // avg(|deltaC|^2 + |deltaG1 - n0 dC1 + 2 m0 dC2|^2)
};
CodazziIResult codazzi_i(const RibbonGeometry& geom, const LimitForms& forms,
                         const SmoothField1D& alpha, const SmoothField1D& beta,
                         const QuadratureOptions& opt = {});
CodazziIResult codazzi_i(const RibbonGeometry& geom, const IsotropicModuli& m,
                         const SmoothField1D& alpha, const SmoothField1D& beta,
                         const QuadratureOptions& opt = {});

}  // namespace ribbonlab
