#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ribbonlab/fields.hpp"
#include "ribbonlab/frame_path.hpp"
#include "ribbonlab/geometry.hpp"

namespace ribbonlab {

// Planar isometric immersion chi of a flat strip: chi(z1,z2) =
// int_0^z1 P e1 + z2 P(z1) e2, with P' = P [[0,-kappa],[kappa,0]], P(0) = I.
class PlanarImmersion {
 public:
  PlanarImmersion(const RibbonGeometry& geom, double w, int samples = 2048);

  Eigen::Vector2d value(double z1, double z2) const;
  Eigen::Matrix2d jacobian(double z1, double z2) const;  // columns d1 chi, d2 chi
  Eigen::Matrix2d rotation(double z1) const { return p_.at(z1); }
  double width() const { return w_; }
  double length() const { return length_; }

  // Self-intersection of the offset strip, detected by midline proximity at
  // well-separated parameters. Reported, not fatal.
  bool self_intersection_warning() const { return warn_; }
  const std::string& warning_detail() const { return warn_detail_; }

 private:
  PlanarFramePath p_;
  CumulativePath<Eigen::Vector2d> midline_;
  SmoothField1D kappa_;
  double w_ = 0, length_ = 0;
  bool warn_ = false;
  std::string warn_detail_;
};

PlanarImmersion planar_immersion(const RibbonGeometry& geom, double w);

// The Euclidean ribbon associated with a geometry: mid-surface Phi built on
// the Darboux frame of (kappa, II^0), its normal, the thickened map
// Psi = Phi + z3 n, and the midline rotation Q0 = DPsi(.,0,0).
//
// Phi carries the cubic corrector that removes z2^2 terms from the 12/22
// metric entries, plus a quartic e1-corrector that removes the remaining
// z2^3 term of the 12 entry (the z2^3 coefficient of the 11 entry is the
// geometric one and stays).
class EuclideanRibbon {
 public:
  EuclideanRibbon(const RibbonGeometry& geom, double t, double w, int samples = 2048);

  const RibbonGeometry& geometry() const { return geom_; }
  double thickness() const { return t_; }
  double width() const { return w_; }

  Eigen::Vector3d phi(double z1, double z2) const;
  Eigen::Matrix<double, 3, 2> dphi(double z1, double z2) const;
  Eigen::Vector3d normal(double z1, double z2) const;
  Eigen::Matrix<double, 3, 2> dnormal(double z1, double z2) const;

  Eigen::Vector3d psi(const Eigen::Vector3d& z) const;
  Eigen::Matrix3d dpsi(const Eigen::Vector3d& z) const;

  // Midline frame (e1|e2|e3); equals DPsi(z1,0,0).
  Eigen::Matrix3d q0(double z1) const { return frame_.at(z1); }
  Eigen::Matrix3d q0_derivative(double z1) const { return frame_.derivative(z1); }
  Eigen::Matrix3d frame_generator(double z1) const { return frame_.generator(z1); }
  const FramePath& frame() const { return frame_; }

  // Pushforward of the model metric: gtilde(Psi(z)) = DPsi^-T g DPsi^-1.
  Eigen::Matrix3d gtilde(const Eigen::Vector3d& z) const;

  // DPsi(z)^-1 (DPsi^-T g DPsi^-1)^{-1/2}: right factor of the 3D energy
  // argument at a quadrature point.
  Eigen::Matrix3d strain_factor(const Eigen::Vector3d& z) const;

 private:
  struct Station {
    Eigen::Matrix3d e, de, dde;  // frame and its first two derivatives
    double n0, dn0, ddn0, m0, dm0, ddm0;
    double rho, drho, ddrho;
  };
  Station station(double z1) const;

  RibbonGeometry geom_;
  double t_ = 0, w_ = 0;
  SmoothField1D l0_, m0_, n0_, rho_;
  FramePath frame_;
  CumulativePath<Eigen::Vector3d> directrix_;
};

EuclideanRibbon build_euclidean_ribbon(const RibbonGeometry& geom, double t, double w);

// Decay orders of the metric expansion errors of Psi, fitted over dyadic
// scales, and the numerically extracted X22(z1) coefficient of the z2*z3
// cross term of the 22 entry.
struct ExpansionResidual {
  bool exact = false;     // residual at machine floor everywhere
  double slope_z2 = 0.0;  // expected >= 3
  double slope_z3 = 0.0;  // expected >= 2
  SmoothField1D x22;
  // z2^2 coefficient of (DPsi^T DPsi - g)_11 at z3 = 0 (equals -delta^G up
  // to fit error).
  std::function<double(double)> gauss_coeff_11;
};

ExpansionResidual expansion_residual(const EuclideanRibbon& ribbon);

}  // namespace ribbonlab
