#pragma once

#include <Eigen/Dense>
#include <optional>
#include <utility>

#include "ribbonlab/euclidean_ribbon.hpp"
#include "ribbonlab/geometry.hpp"

namespace ribbonlab {

// Lame parameters of the built-in isotropic density
//   W(F) = (mu/2) |F^T F - I|^2 + (lambda/4) (tr(F^T F - I))^2,
// normalized so that (1/2) D^2_I W = 2 mu |sym B|^2 + lambda (tr B)^2.
struct IsotropicModuli {
  double mu = 1.0;
  double lambda = 0.0;
};
void validate(const IsotropicModuli& m);  // mu > 0, 2mu + lambda > 0

double density_w(const IsotropicModuli& m, const Eigen::Matrix3d& F);
Eigen::Matrix3d density_w_derivative(const IsotropicModuli& m, const Eigen::Matrix3d& F);

// Orthonormal coordinates on symmetric matrices: off-diagonal entries carry
// a sqrt(2) factor so |B|_F^2 = |coords|^2. Order (11, 22, 33, 12, 13, 23)
// and (11, 22, 12).
Eigen::Matrix<double, 6, 1> sym3_coords(const Eigen::Matrix3d& b);
Eigen::Matrix3d sym3_from_coords(const Eigen::Matrix<double, 6, 1>& v);
Eigen::Vector3d sym2_coords(const Eigen::Matrix2d& a);
Eigen::Matrix2d sym2_from_coords(const Eigen::Vector3d& v);

// Positive-semidefinite quadratic form on 3x3 matrices (acting through the
// symmetric part) or on symmetric 2x2 matrices, stored as a coefficient
// matrix in the orthonormal coordinates above.
class QuadForm {
 public:
  enum class Space { Sym3, Sym2 };

  QuadForm() = default;
  static QuadForm sym3(const Eigen::Matrix<double, 6, 6>& coeffs);
  static QuadForm sym2(const Eigen::Matrix3d& coeffs);

  Space space() const { return space_; }
  const Eigen::MatrixXd& coeffs() const { return coeffs_; }
  double min_eigenvalue() const;

  double operator()(const Eigen::Matrix3d& b) const;  // Sym3 (symmetrizes b)
  double operator()(const Eigen::Matrix2d& a) const;  // Sym2 (symmetrizes a)

 private:
  Space space_ = Space::Sym3;
  Eigen::MatrixXd coeffs_;
};

// Q3(B) = 2 mu |sym B|^2 + lambda (tr B)^2, the Hessian form of density_w at
// the identity.
QuadForm q3_at_identity(const IsotropicModuli& m);

// Q3(R B R^T) for a fixed rotation R (x1-dependent tilde-Q3 when R = Q0(x1)).
QuadForm conjugate_q3(const QuadForm& q3, const Eigen::Matrix3d& r);

// tilde-Q2(A) = min { tilde-Q3(B) : upper 2x2 minor of B equals A },
// together with the minimizing completion B(A).
struct Relaxed2x2 {
  QuadForm q2;
  Eigen::Matrix<double, 3, 3> completion_map;  // free sym coords (33,13,23) from sym2 coords
  Eigen::Matrix3d complete(const Eigen::Matrix2d& a) const;
};
Relaxed2x2 relax_to_2x2(const QuadForm& q3,
                        const std::optional<Eigen::Matrix3d>& frame = std::nullopt);

// min over A22 of q2 applied to [[a, b], [b, A22]]; value and minimizer.
struct Q2CircResult {
  double value = 0;
  double argmin_a22 = 0;
};
Q2CircResult q2_circ(const QuadForm& q2, double a, double b);

// min over A with A11 = 1 of q2(A) (off-diagonal and 22 entries free).
struct Q1Result {
  double value = 0;
  double argmin_a12 = 0;
  double argmin_a22 = 0;
};
Q1Result q1(const QuadForm& q2);

// alpha+- = sup { alpha > 0 : q2(M) +- alpha det M >= 0 for all sym M },
// by bisection on the minimum eigenvalue of the combined coefficient matrix.
std::pair<double, double> alpha_pm(const QuadForm& q2, double tol = 1e-8);

// Coefficient matrix of det M = M11 M22 - M12^2 in sym2 coordinates.
Eigen::Matrix3d det_form_sym2();

// Argmin of q3(S) over symmetric S with S11 pinned (all other entries
// free); realizes tilde-Q1 * s11^2.
Eigen::Matrix3d q1_completion(const QuadForm& q3, double s11);

// Plate form Q_w(x', F) = min { Q3(A0^-T G A0^-1) : G_{2x2} = F } for the
// ribbon's frame A0 at x' = (x1, x2) in S (physical offset z2 = w x2).
QuadForm plate_form(const EuclideanRibbon& ribbon, const Eigen::Vector2d& xprime,
                    const QuadForm& q3);
QuadForm plate_form(const EuclideanRibbon& ribbon, const Eigen::Vector2d& xprime,
                    const IsotropicModuli& m);

}  // namespace ribbonlab
