#include "ribbonlab/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ribbonlab {

Eigen::Matrix3d metric_at(const RibbonGeometry& geom, const Eigen::Vector3d& z) {
  const double z1 = z[0], z2 = z[1], z3 = z[2];
  const double k = geom.kappa(z1);
  double g11 = (1.0 - k * z2) * (1.0 - k * z2);
  if (!geom.flat) g11 -= geom.gaussian_curvature(z1, 0.0) * z2 * z2;
  Eigen::Matrix3d g = Eigen::Matrix3d::Identity();
  g(0, 0) = g11;
  const Eigen::Matrix2d ii = geom.second_form.value(z1, z2);
  g.topLeftCorner<2, 2>() -= 2.0 * z3 * ii;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    std::ostringstream msg;
    msg << "metric_at: non-positive-definite metric at z = (" << z1 << ", " << z2 << ", " << z3
        << "); w or t too large for this geometry";
    throw std::domain_error(msg.str());
  }
  return g;
}

Eigen::Matrix2d midsurface_metric(const RibbonGeometry& geom, double z1, double z2) {
  return metric_at(geom, Eigen::Vector3d(z1, z2, 0.0)).topLeftCorner<2, 2>();
}

double gauss_deficit(const RibbonGeometry& geom, double z1) {
  const double ks = geom.flat ? 0.0 : geom.gaussian_curvature(z1, 0.0);
  return geom.ii0(z1).determinant() - ks;
}

double gauss_deficit_derivative(const RibbonGeometry& geom, double z1) {
  const Eigen::Matrix2d ii0 = geom.ii0(z1);
  const Eigen::Matrix2d d = geom.dii0(z1);
  double det_prime = d(0, 0) * ii0(1, 1) + ii0(0, 0) * d(1, 1) - 2.0 * ii0(0, 1) * d(0, 1);
  if (!geom.flat) {
    const double h = 1e-5;
    det_prime -= (geom.gaussian_curvature(z1 + h, 0.0) - geom.gaussian_curvature(z1 - h, 0.0)) /
                 (2.0 * h);
  }
  return det_prime;
}

Eigen::Vector2d codazzi_deficit(const RibbonGeometry& geom, double z1) {
  const double k = geom.kappa(z1);
  const Eigen::Matrix2d ii = geom.ii0(z1);
  const Eigen::Matrix2d d1 = geom.dii0(z1);
  const Eigen::Matrix2d d2 = geom.ii1(z1);
  Eigen::Vector2d dc;
  dc[0] = d2(0, 0) - d1(0, 1) + k * (ii(0, 0) + ii(1, 1));
  dc[1] = d2(0, 1) - d1(1, 1) - k * ii(0, 1);
  return dc;
}

double gauss_deficit_1(const RibbonGeometry& geom, double z1, double tol) {
  const Eigen::Matrix2d ii0 = geom.ii0(z1);
  if (std::abs(ii0.determinant()) > tol)
    throw std::domain_error(
        "gauss_deficit_1: first-order deficit undefined off the Gauss-compatible stratum");
  const Eigen::Matrix2d ii1 = geom.ii1(z1);
  return ii1(0, 0) * ii0(1, 1) + ii1(1, 1) * ii0(0, 0) - 2.0 * ii0(0, 1) * ii1(0, 1);
}

bool is_admissible(const RibbonGeometry& geom, double t, double w, std::string* why) {
  const int n1 = 65, n2 = 9, n3 = 5;
  for (int i = 0; i < n1; ++i) {
    const double z1 = geom.length * i / (n1 - 1);
    for (int j = 0; j < n2; ++j) {
      const double z2 = -0.5 * w + w * j / (n2 - 1);
      if (1.0 - geom.kappa(z1) * z2 < 0.1) {
        if (why) {
          std::ostringstream msg;
          msg << "1 - kappa*z2 = " << 1.0 - geom.kappa(z1) * z2 << " < 0.1 at (z1,z2)=(" << z1
              << "," << z2 << ")";
          *why = msg.str();
        }
        return false;
      }
      for (int l = 0; l < n3; ++l) {
        const double z3 = -0.5 * t + t * l / (n3 - 1);
        Eigen::Matrix3d g;
        try {
          g = metric_at(geom, Eigen::Vector3d(z1, z2, z3));
        } catch (const std::domain_error& e) {
          if (why) *why = e.what();
          return false;
        }
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(g, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() < 0.05) {
          if (why) {
            std::ostringstream msg;
            msg << "metric eigenvalue " << es.eigenvalues().minCoeff() << " < 0.05 at (" << z1
                << "," << z2 << "," << z3 << ")";
            *why = msg.str();
          }
          return false;
        }
      }
    }
  }
  return true;
}

void require_admissible(const RibbonGeometry& geom, double t, double w) {
  std::string why;
  if (!is_admissible(geom, t, w, &why))
    throw std::domain_error("geometry not admissible at (t,w)=(" + std::to_string(t) + "," +
                            std::to_string(w) + "): " + why);
}

namespace {

double param(const std::map<std::string, double>& p, const std::string& key, double fallback) {
  auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

}  // namespace

RibbonGeometry make_preset(const std::string& name, const std::map<std::string, double>& params) {
  RibbonGeometry g;
  g.length = param(params, "L", 1.0);
  g.flat = true;
  g.kappa = SmoothField1D::constant(0.0);
  g.second_form = SymField2x2::constant(Eigen::Matrix2d::Zero());

  if (name == "euclidean") {
    return g;
  }
  if (name == "fig1a") {
    const double k = param(params, "k", 1.0);
    g.second_form = SymField2x2::constant(k * Eigen::Matrix2d::Identity());
    return g;
  }
  if (name == "fig1b") {
    // a = I, II = diag(0, z1): Codazzi deficit (0,-1), II11 = 0 on the midline.
    g.second_form = SymField2x2::analytic(
        [](double z1, double) {
          Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
          m(1, 1) = z1;
          return m;
        },
        [](double, double) {
          Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
          m(1, 1) = 1.0;
          return m;
        },
        [](double, double) { return Eigen::Matrix2d::Zero().eval(); });
    return g;
  }
  if (name == "fig1c") {
    // a = I, II = (1, z2) (x) (1, z2): rank one everywhere, delta^C = (0, 1).
    g.second_form = SymField2x2::analytic(
        [](double, double z2) {
          Eigen::Matrix2d m;
          m << 1.0, z2, z2, z2 * z2;
          return m;
        },
        [](double, double) { return Eigen::Matrix2d::Zero().eval(); },
        [](double, double z2) {
          Eigen::Matrix2d m;
          m << 0.0, 1.0, 1.0, 2.0 * z2;
          return m;
        });
    return g;
  }
  if (name == "fig1d") {
    const double k = param(params, "kappa", 1.0);
    const double n = param(params, "n", 1.0);
    g.kappa = SmoothField1D::constant(k);
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    m(1, 1) = n;
    g.second_form = SymField2x2::constant(m);
    return g;
  }
  if (name == "fig1e") {
    const double k = param(params, "kappa", 0.5);
    const double l = param(params, "l", 1.0);
    g.kappa = SmoothField1D::constant(k);
    Eigen::Matrix2d m = Eigen::Matrix2d::Zero();
    m(0, 0) = l;
    g.second_form = SymField2x2::constant(m);
    return g;
  }
  throw std::invalid_argument("make_preset: unknown preset '" + name + "'");
}

}  // namespace ribbonlab
