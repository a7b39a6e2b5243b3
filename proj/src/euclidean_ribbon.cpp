#include "ribbonlab/euclidean_ribbon.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace ribbonlab {

PlanarImmersion::PlanarImmersion(const RibbonGeometry& geom, double w, int samples)
    : w_(w), length_(geom.length) {
  if (!geom.flat) throw std::domain_error("planar_immersion: geometry must be flat");
  require_admissible(geom, 0.0, w);
  kappa_ = geom.kappa;
  auto kap = geom.kappa;
  p_ = PlanarFramePath([kap](double s) { return kap(s); }, geom.length, 0.0, samples);
  midline_ = CumulativePath<Eigen::Vector2d>(
      [p = p_](double s) { return Eigen::Vector2d(p.at(s).col(0)); }, geom.length,
      Eigen::Vector2d::Zero(), samples);

  // Midline proximity scan: points far apart in arclength but closer than w
  // in the plane mean the offset strip overlaps itself.
  const int n = 256;
  std::vector<Eigen::Vector2d> pts(n + 1);
  for (int i = 0; i <= n; ++i) pts[i] = midline_.at(length_ * i / n);
  for (int i = 0; i <= n && !warn_; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const double ds = (j - i) * length_ / n;
      if (ds < 0.2 * length_) continue;
      if ((pts[i] - pts[j]).norm() < w) {
        warn_ = true;
        std::ostringstream msg;
        msg << "midline points at z1 = " << length_ * i / n << " and " << length_ * j / n
            << " are closer than w = " << w;
        warn_detail_ = msg.str();
        break;
      }
    }
  }
}

Eigen::Vector2d PlanarImmersion::value(double z1, double z2) const {
  return midline_.at(z1) + z2 * p_.at(z1).col(1);
}

Eigen::Matrix2d PlanarImmersion::jacobian(double z1, double z2) const {
  const Eigen::Matrix2d p = p_.at(z1);
  Eigen::Matrix2d j;
  j.col(0) = (1.0 - kappa_(z1) * z2) * p.col(0);
  j.col(1) = p.col(1);
  return j;
}

PlanarImmersion planar_immersion(const RibbonGeometry& geom, double w) {
  return PlanarImmersion(geom, w);
}

namespace {

// Darboux generator: R' = R K with K = [[0,-k,-l],[k,0,-m],[l,m,0]].
Eigen::Matrix3d darboux_generator(double k, double l, double m) {
  Eigen::Matrix3d g;
  g << 0, -k, -l, k, 0, -m, l, m, 0;
  return g;
}

}  // namespace

EuclideanRibbon::EuclideanRibbon(const RibbonGeometry& geom, double t, double w, int samples)
    : geom_(geom), t_(t), w_(w) {
  require_admissible(geom_, t, w);
  const SymField2x2 ii = geom_.second_form;
  const double fd = 1e-4;
  auto entry_field = [ii, fd](int r, int c) {
    return SmoothField1D::analytic(
        [ii, r, c](double s) { return ii.value(s, 0.0)(r, c); },
        [ii, r, c](double s) { return ii.d1(s, 0.0)(r, c); },
        [ii, r, c, fd](double s) {
          return (ii.d1(s + fd, 0.0)(r, c) - ii.d1(s - fd, 0.0)(r, c)) / (2 * fd);
        });
  };
  l0_ = entry_field(0, 0);
  m0_ = entry_field(0, 1);
  n0_ = entry_field(1, 1);

  // Quartic corrector coefficient: rho = -6 * (z2^3 coefficient of the 12
  // metric entry of the cubic-only Phi) = -2 kappa m0 n0 - n0 n0'.
  const SmoothField1D kap = geom_.kappa;
  const SmoothField1D m0 = m0_, n0 = n0_;
  rho_ = sample_field(0.0, geom_.length, 257, [kap, m0, n0](double s) {
    return -2.0 * kap(s) * m0(s) * n0(s) - n0(s) * n0.d1(s);
  });

  const SmoothField1D l0 = l0_;
  frame_ = FramePath(
      [kap, l0, m0](double s) { return darboux_generator(kap(s), l0(s), m0(s)); }, geom_.length,
      Eigen::Matrix3d::Identity(), samples);
  directrix_ = CumulativePath<Eigen::Vector3d>(
      [fr = frame_](double s) { return Eigen::Vector3d(fr.at(s).col(0)); }, geom_.length,
      Eigen::Vector3d::Zero(), samples);
}

EuclideanRibbon::Station EuclideanRibbon::station(double z1) const {
  Station st;
  st.e = frame_.at(z1);
  const double k = geom_.kappa(z1), dk = geom_.kappa.d1(z1);
  const double l0 = l0_(z1), dl0 = l0_.d1(z1);
  st.n0 = n0_(z1);
  st.dn0 = n0_.d1(z1);
  st.ddn0 = n0_.d2(z1);
  st.m0 = m0_(z1);
  st.dm0 = m0_.d1(z1);
  st.ddm0 = m0_.d2(z1);
  st.rho = rho_(z1);
  st.drho = rho_.d1(z1);
  st.ddrho = rho_.d2(z1);
  const Eigen::Matrix3d kgen = darboux_generator(k, l0, st.m0);
  const Eigen::Matrix3d dkgen = darboux_generator(dk, dl0, st.dm0);
  st.de = st.e * kgen;
  st.dde = st.e * (kgen * kgen + dkgen);
  return st;
}

Eigen::Vector3d EuclideanRibbon::phi(double z1, double z2) const {
  const Station st = station(z1);
  const Eigen::Vector3d e1 = st.e.col(0), e2 = st.e.col(1), e3 = st.e.col(2);
  const Eigen::Vector3d b = st.n0 * st.m0 * e1 + st.n0 * st.n0 * e2;
  return directrix_.at(z1) + z2 * e2 + 0.5 * z2 * z2 * st.n0 * e3 -
         (z2 * z2 * z2 / 6.0) * b + (z2 * z2 * z2 * z2 / 24.0) * st.rho * e1;
}

Eigen::Matrix<double, 3, 2> EuclideanRibbon::dphi(double z1, double z2) const {
  const Station st = station(z1);
  const Eigen::Vector3d e1 = st.e.col(0), e2 = st.e.col(1), e3 = st.e.col(2);
  const Eigen::Vector3d de1 = st.de.col(0), de2 = st.de.col(1), de3 = st.de.col(2);
  const Eigen::Vector3d a3p = st.dn0 * e3 + st.n0 * de3;
  const double nm = st.n0 * st.m0, dnm = st.dn0 * st.m0 + st.n0 * st.dm0;
  const double nn = st.n0 * st.n0, dnn = 2.0 * st.n0 * st.dn0;
  const Eigen::Vector3d b = nm * e1 + nn * e2;
  const Eigen::Vector3d bp = dnm * e1 + nm * de1 + dnn * e2 + nn * de2;
  const Eigen::Vector3d cq = st.rho * e1;
  const Eigen::Vector3d cqp = st.drho * e1 + st.rho * de1;
  Eigen::Matrix<double, 3, 2> j;
  j.col(0) = e1 + z2 * de2 + 0.5 * z2 * z2 * a3p - (z2 * z2 * z2 / 6.0) * bp +
             (z2 * z2 * z2 * z2 / 24.0) * cqp;
  j.col(1) = e2 + z2 * st.n0 * e3 - 0.5 * z2 * z2 * b + (z2 * z2 * z2 / 6.0) * cq;
  return j;
}

Eigen::Vector3d EuclideanRibbon::normal(double z1, double z2) const {
  const Eigen::Matrix<double, 3, 2> j = dphi(z1, z2);
  Eigen::Vector3d v = j.col(0).cross(j.col(1));
  const double n = v.norm();
  if (n < 1e-12) throw std::domain_error("EuclideanRibbon::normal: degenerate tangent plane");
  return v / n;
}

Eigen::Matrix<double, 3, 2> EuclideanRibbon::dnormal(double z1, double z2) const {
  const Station st = station(z1);
  const Eigen::Vector3d e1 = st.e.col(0), e2 = st.e.col(1), e3 = st.e.col(2);
  const Eigen::Vector3d de1 = st.de.col(0), de2 = st.de.col(1), de3 = st.de.col(2);
  const Eigen::Vector3d dde1 = st.dde.col(0), dde2 = st.dde.col(1), dde3 = st.dde.col(2);

  const double nm = st.n0 * st.m0;
  const double dnm = st.dn0 * st.m0 + st.n0 * st.dm0;
  const double ddnm = st.ddn0 * st.m0 + 2.0 * st.dn0 * st.dm0 + st.n0 * st.ddm0;
  const double nn = st.n0 * st.n0;
  const double dnn = 2.0 * st.n0 * st.dn0;
  const double ddnn = 2.0 * (st.dn0 * st.dn0 + st.n0 * st.ddn0);

  const Eigen::Vector3d a3 = st.n0 * e3;
  const Eigen::Vector3d a3p = st.dn0 * e3 + st.n0 * de3;
  const Eigen::Vector3d a3pp = st.ddn0 * e3 + 2.0 * st.dn0 * de3 + st.n0 * dde3;
  const Eigen::Vector3d b = nm * e1 + nn * e2;
  const Eigen::Vector3d bp = dnm * e1 + nm * de1 + dnn * e2 + nn * de2;
  const Eigen::Vector3d bpp =
      ddnm * e1 + 2.0 * dnm * de1 + nm * dde1 + ddnn * e2 + 2.0 * dnn * de2 + nn * dde2;
  const Eigen::Vector3d cq = st.rho * e1;
  const Eigen::Vector3d cqp = st.drho * e1 + st.rho * de1;
  const Eigen::Vector3d cqpp = st.ddrho * e1 + 2.0 * st.drho * de1 + st.rho * dde1;

  const double q2 = z2 * z2, q3 = q2 * z2, q4 = q3 * z2;
  const Eigen::Vector3d d1 = e1 + z2 * de2 + 0.5 * q2 * a3p - (q3 / 6.0) * bp + (q4 / 24.0) * cqp;
  const Eigen::Vector3d d2 = e2 + z2 * a3 - 0.5 * q2 * b + (q3 / 6.0) * cq;
  const Eigen::Vector3d d11 =
      de1 + z2 * dde2 + 0.5 * q2 * a3pp - (q3 / 6.0) * bpp + (q4 / 24.0) * cqpp;
  const Eigen::Vector3d d12 = de2 + z2 * a3p - 0.5 * q2 * bp + (q3 / 6.0) * cqp;
  const Eigen::Vector3d d22 = a3 - z2 * b + 0.5 * q2 * cq;

  const Eigen::Vector3d v = d1.cross(d2);
  const double nv = v.norm();
  if (nv < 1e-12) throw std::domain_error("EuclideanRibbon::dnormal: degenerate tangent plane");
  const Eigen::Vector3d nu = v / nv;
  const Eigen::Matrix3d proj = Eigen::Matrix3d::Identity() - nu * nu.transpose();
  Eigen::Matrix<double, 3, 2> dn;
  dn.col(0) = proj * (d11.cross(d2) + d1.cross(d12)) / nv;
  dn.col(1) = proj * (d12.cross(d2) + d1.cross(d22)) / nv;
  return dn;
}

Eigen::Vector3d EuclideanRibbon::psi(const Eigen::Vector3d& z) const {
  return phi(z[0], z[1]) + z[2] * normal(z[0], z[1]);
}

Eigen::Matrix3d EuclideanRibbon::dpsi(const Eigen::Vector3d& z) const {
  const Eigen::Matrix<double, 3, 2> j = dphi(z[0], z[1]);
  const Eigen::Matrix<double, 3, 2> dn = dnormal(z[0], z[1]);
  Eigen::Matrix3d d;
  d.col(0) = j.col(0) + z[2] * dn.col(0);
  d.col(1) = j.col(1) + z[2] * dn.col(1);
  d.col(2) = normal(z[0], z[1]);
  return d;
}

Eigen::Matrix3d EuclideanRibbon::gtilde(const Eigen::Vector3d& z) const {
  const Eigen::Matrix3d dp = dpsi(z);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(dp);
  if (!lu.isInvertible())
    throw std::runtime_error("EuclideanRibbon::gtilde: singular DPsi at quadrature point");
  const Eigen::Matrix3d inv = lu.inverse();
  const Eigen::Matrix3d g = metric_at(geom_, z);
  return inv.transpose() * g * inv;
}

Eigen::Matrix3d EuclideanRibbon::strain_factor(const Eigen::Vector3d& z) const {
  const Eigen::Matrix3d dp = dpsi(z);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(dp);
  if (!lu.isInvertible())
    throw std::runtime_error("EuclideanRibbon::strain_factor: singular DPsi");
  const Eigen::Matrix3d inv = lu.inverse();
  const Eigen::Matrix3d g = metric_at(geom_, z);
  const Eigen::Matrix3d m = inv.transpose() * g * inv;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m);
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw std::runtime_error("EuclideanRibbon::strain_factor: gtilde not positive definite");
  const Eigen::Matrix3d inv_sqrt =
      es.eigenvectors() * es.eigenvalues().cwiseInverse().cwiseSqrt().asDiagonal() *
      es.eigenvectors().transpose();
  return inv * inv_sqrt;
}

EuclideanRibbon build_euclidean_ribbon(const RibbonGeometry& geom, double t, double w) {
  return EuclideanRibbon(geom, t, w);
}

namespace {

double fit_slope(const std::vector<double>& logx, const std::vector<double>& logy) {
  const int n = static_cast<int>(logx.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sx += logx[i];
    sy += logy[i];
    sxx += logx[i] * logx[i];
    sxy += logx[i] * logy[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

ExpansionResidual expansion_residual(const EuclideanRibbon& ribbon) {
  const RibbonGeometry& geom = ribbon.geometry();
  const double L = geom.length;
  const std::vector<double> stations = {0.15 * L, 0.35 * L, 0.55 * L, 0.75 * L, 0.9 * L};

  // Displayed expansion of DPsi^T DPsi at (z1, z2, z3).
  auto expected = [&](double z1, double z2, double z3) {
    Eigen::Matrix3d e = Eigen::Matrix3d::Identity();
    const double k = geom.kappa(z1);
    e(0, 0) = (1 - k * z2) * (1 - k * z2) - geom.ii0(z1).determinant() * z2 * z2;
    e.topLeftCorner<2, 2>() -= 2.0 * z3 * geom.ii0(z1);
    return e;
  };
  auto actual = [&](double z1, double z2, double z3) {
    const Eigen::Matrix3d d = ribbon.dpsi(Eigen::Vector3d(z1, z2, z3));
    return Eigen::Matrix3d(d.transpose() * d);
  };

  ExpansionResidual out;
  const double z2max = 0.5 * ribbon.width();
  const double z3max = 0.5 * ribbon.thickness();

  std::vector<double> lx2, ly2, lx3, ly3;
  bool all_tiny = true;
  for (int kscale = 0; kscale < 6; ++kscale) {
    const double s2 = z2max * std::pow(2.0, -kscale);
    const double s3 = z3max * std::pow(2.0, -kscale);
    double r2 = 0, r3 = 0;
    for (double z1 : stations) {
      r2 += (actual(z1, s2, 0.0) - expected(z1, s2, 0.0)).squaredNorm();
      r3 += (actual(z1, 0.0, s3) - expected(z1, 0.0, s3)).squaredNorm();
    }
    r2 = std::sqrt(r2 / stations.size());
    r3 = std::sqrt(r3 / stations.size());
    if (r2 > 1e-12 || r3 > 1e-12) all_tiny = false;
    if (r2 > 1e-14) {
      lx2.push_back(std::log(s2));
      ly2.push_back(std::log(r2));
    }
    if (r3 > 1e-14) {
      lx3.push_back(std::log(s3));
      ly3.push_back(std::log(r3));
    }
  }
  out.exact = all_tiny;
  out.slope_z2 = (lx2.size() >= 3) ? fit_slope(lx2, ly2) : std::numeric_limits<double>::infinity();
  out.slope_z3 = (lx3.size() >= 3) ? fit_slope(lx3, ly3) : std::numeric_limits<double>::infinity();

  // X22 from the z2*z3 cross term of the 22 entry of g - DPsi^T DPsi, via the
  // four-point mixed difference (kills terms even in z2 or z3).
  const double h2 = std::min(1e-3, 0.3 * z2max);
  const double h3 = std::min(1e-3, 0.3 * std::max(z3max, 1e-6));
  auto defect22 = [&](double z1, double z2, double z3) {
    const Eigen::Matrix3d g = metric_at(geom, Eigen::Vector3d(z1, z2, z3));
    return (g - actual(z1, z2, z3))(1, 1);
  };
  const int nsamp = 33;
  Eigen::VectorXd grid(nsamp), vals(nsamp);
  for (int i = 0; i < nsamp; ++i) {
    const double z1 = L * i / (nsamp - 1);
    grid[i] = z1;
    const double mixed = (defect22(z1, h2, h3) - defect22(z1, -h2, h3) - defect22(z1, h2, -h3) +
                          defect22(z1, -h2, -h3)) /
                         (4.0 * h2 * h3);
    vals[i] = -0.5 * mixed;  // defect22 ~ -2 X22 z2 z3
  }
  out.x22 = SmoothField1D::from_samples(grid, vals);

  const RibbonGeometry* geom_ptr = &ribbon.geometry();
  const EuclideanRibbon* rib_ptr = &ribbon;
  const double hc = std::min(1e-3, 0.3 * z2max);
  out.gauss_coeff_11 = [geom_ptr, rib_ptr, hc](double z1) {
    auto defect11 = [&](double z2) {
      const Eigen::Matrix3d d = rib_ptr->dpsi(Eigen::Vector3d(z1, z2, 0.0));
      const Eigen::Matrix3d g = metric_at(*geom_ptr, Eigen::Vector3d(z1, z2, 0.0));
      return (Eigen::Matrix3d(d.transpose() * d) - g)(0, 0);
    };
    return (defect11(hc) + defect11(-hc) - 2.0 * defect11(0.0)) / (2.0 * hc * hc);
  };
  return out;
}

}  // namespace ribbonlab
