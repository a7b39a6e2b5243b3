#pragma once

#include <Eigen/Dense>
#include <functional>
#include <map>
#include <string>

#include "ribbonlab/fields.hpp"

namespace ribbonlab {

// Reference geometry of a ribbon family: midline length, geodesic curvature
// kappa(z1), Gaussian curvature of the mid-surface (identically zero when
// flat), and the reference second fundamental form II(z1,z2).
struct RibbonGeometry {
  double length = 1.0;
  SmoothField1D kappa;
  bool flat = true;
  std::function<double(double, double)> gaussian_curvature =  // K^S(z1,z2)
      [](double, double) { return 0.0; };
  SymField2x2 second_form;

  // Midline restrictions II^0 = II(.,0) and II^1 = d2 II(.,0).
  Eigen::Matrix2d ii0(double z1) const { return second_form.value(z1, 0.0); }
  Eigen::Matrix2d ii1(double z1) const { return second_form.d2(z1, 0.0); }
  Eigen::Matrix2d dii0(double z1) const { return second_form.d1(z1, 0.0); }
};

// Model metric: the displayed expansion truncated after the terms shown
// (remainders O(z2^3), O(z3^2) set to zero).
Eigen::Matrix3d metric_at(const RibbonGeometry& geom, const Eigen::Vector3d& z);

// Induced mid-surface metric a(z1,z2); equals the upper 2x2 block of
// metric_at at z3 = 0.
Eigen::Matrix2d midsurface_metric(const RibbonGeometry& geom, double z1, double z2);

// det II(z1,0) - K^S(z1,0).
double gauss_deficit(const RibbonGeometry& geom, double z1);
double gauss_deficit_derivative(const RibbonGeometry& geom, double z1);

// (d2 II11 - d1 II12 + kappa (II11 + II22), d2 II12 - d1 II22 - kappa II12)
// evaluated at (z1, 0).
Eigen::Vector2d codazzi_deficit(const RibbonGeometry& geom, double z1);

// First-order Gauss deficit l1 n0 + n1 l0 - 2 m0 m1. Requires
// det II(z1,0) = 0 within tol.
double gauss_deficit_1(const RibbonGeometry& geom, double z1, double tol = 1e-10);

// Positivity margins: min(1 - kappa z2) >= 0.1 and metric eigenvalues
// >= 0.05 over the (t,w)-box.
bool is_admissible(const RibbonGeometry& geom, double t, double w, std::string* why = nullptr);
void require_admissible(const RibbonGeometry& geom, double t, double w);

// Named presets. Parameters not present in `params` take their defaults.
//   euclidean          flat, kappa = 0, II = 0
//   fig1a  {k}         kappa = 0, II = k * I2            (Gauss-incompatible)
//   fig1b              kappa = 0, II = diag(0, z1)       (Codazzi, II11 = 0)
//   fig1c              kappa = 0, II = [[1,z2],[z2,z2^2]] (Codazzi, II11 != 0)
//   fig1d  {kappa, n}  kappa const, II = diag(0, n)      (Codazzi, II11 = 0)
//   fig1e  {kappa, l}  kappa const, II = diag(l, 0)      (Codazzi, II11 != 0)
// All presets accept L (midline length, default 1).
RibbonGeometry make_preset(const std::string& name,
                           const std::map<std::string, double>& params = {});

}  // namespace ribbonlab
