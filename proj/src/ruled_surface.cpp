#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "ribbonlab/constructions.hpp"
#include "ribbonlab/quadrature.hpp"

namespace ribbonlab {

namespace {

// Extend a field from [0,L] to [-eps0, L+eps0] by the quadratic Taylor
// polynomial at each endpoint (value and two derivatives match).
SmoothField1D extend_field(const SmoothField1D& f, double length) {
  const double v0 = f(0.0), d0 = f.d1(0.0), s0 = f.d2(0.0);
  const double vL = f(length), dL = f.d1(length), sL = f.d2(length);
  auto base = f;
  auto val = [=](double s) {
    if (s < 0.0) return v0 + d0 * s + 0.5 * s0 * s * s;
    if (s > length) {
      const double d = s - length;
      return vL + dL * d + 0.5 * sL * d * d;
    }
    return base(s);
  };
  auto der = [=](double s) {
    if (s < 0.0) return d0 + s0 * s;
    if (s > length) return dL + sL * (s - length);
    return base.d1(s);
  };
  auto der2 = [=](double s) {
    if (s < 0.0) return s0;
    if (s > length) return sL;
    return base.d2(s);
  };
  return SmoothField1D::analytic(val, der, der2);
}

struct RuledData {
  double length = 0, w = 0, eps0 = 0, eta = 0, min_q2 = 0;
  SmoothField1D kappa, a11, a12, a22;  // extended A_w entries and kappa
  double qsign = 1.0;
  FramePath base_frame;                // on shifted parameter [0, L + 2 eps0]
  Eigen::Matrix3d gcorr;               // left correction: r(s) = gcorr * base(s + eps0)
  PlanarFramePath base_planar;
  double theta0 = 0;                   // base planar angle at sigma = eps0
  CumulativePath<Eigen::Vector2d> planar_directrix;   // of base planar frame
  Eigen::Vector2d planar_anchor = Eigen::Vector2d::Zero();
  CumulativePath<Eigen::Vector3d> space_directrix;    // of base frame col 0
  Eigen::Vector3d space_anchor = Eigen::Vector3d::Zero();

  Eigen::Matrix3d frame(double s) const { return gcorr * base_frame.at(s + eps0); }
  Eigen::Matrix3d frame_derivative(double s) const {
    return gcorr * base_frame.derivative(s + eps0);
  }
  Eigen::Matrix2d planar(double s) const {
    const double th = base_planar.angle(s + eps0) - theta0;
    Eigen::Matrix2d p;
    p << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return p;
  }
  Eigen::Vector2d planar_curve(double s) const {
    Eigen::Matrix2d g;
    g << std::cos(theta0), std::sin(theta0), -std::sin(theta0), std::cos(theta0);
    return g * (planar_directrix.at(s + eps0) - planar_anchor);
  }
  Eigen::Vector3d space_curve(double s) const {
    return gcorr * (space_directrix.at(s + eps0) - space_anchor);
  }

  Eigen::Vector2d ruling(double s) const {
    const Eigen::Vector2d v(-a12(s), a11(s));
    return qsign * v / v.norm();
  }
  Eigen::Vector2d ruling_derivative(double s) const {
    const Eigen::Vector2d v(-a12(s), a11(s));
    const Eigen::Vector2d dv(-a12.d1(s), a11.d1(s));
    const double n = v.norm();
    return qsign * (dv / n - v * (v.dot(dv)) / (n * n * n));
  }

  // Planar ruled chart phi(t,s) and its Jacobian.
  Eigen::Vector2d chart(double t, double s) const {
    return planar_curve(t) + s * (planar(t) * ruling(t));
  }
  Eigen::Matrix2d chart_jacobian(double t, double s) const {
    const Eigen::Matrix2d p = planar(t);
    const double k = kappa(t);
    const Eigen::Vector2d q = ruling(t);
    const Eigen::Vector2d jq(-k * q[1], k * q[0]);  // J q with J = [[0,-k],[k,0]]
    Eigen::Matrix2d jac;
    jac.col(0) = p * (Eigen::Vector2d(1, 0) + s * (jq + ruling_derivative(t)));
    jac.col(1) = p * q;
    return jac;
  }

  // chi(z1, z2) in the same anchored planar chart.
  Eigen::Vector2d chi(double z1, double z2) const {
    return planar_curve(z1) + z2 * planar(z1).col(1);
  }

  // Damped Newton inversion of the chart.
  void invert(double z1, double z2, double* t_out, double* s_out) const {
    const Eigen::Vector2d target = chi(z1, z2);
    double t = z1;
    double s = z2 / ruling(z1)[1];
    Eigen::Vector2d res = chart(t, s) - target;
    for (int it = 0; it < 60 && res.norm() > 1e-13; ++it) {
      const Eigen::Vector2d step = chart_jacobian(t, s).partialPivLu().solve(res);
      double damp = 1.0;
      for (int half = 0; half < 30; ++half) {
        const double tn = t - damp * step[0];
        const double sn = s - damp * step[1];
        if (tn >= -eps0 && tn <= length + eps0 && std::abs(sn) <= 0.5 * eta) {
          const Eigen::Vector2d rn = chart(tn, sn) - target;
          if (rn.norm() < res.norm()) {
            t = tn;
            s = sn;
            res = rn;
            break;
          }
        }
        damp *= 0.5;
        if (half == 29) {
          std::ostringstream msg;
          msg << "ruled_isometry: chart inversion stalled at (z1,z2)=(" << z1 << "," << z2
              << "), residual " << res.norm();
          throw std::runtime_error(msg.str());
        }
      }
    }
    if (res.norm() > 1e-11) {
      std::ostringstream msg;
      msg << "ruled_isometry: chart inversion failed at (z1,z2)=(" << z1 << "," << z2
          << "), residual " << res.norm();
      throw std::runtime_error(msg.str());
    }
    *t_out = t;
    *s_out = s;
  }
};

}  // namespace

RuledIsometry ruled_isometry(const RibbonGeometry& geom, const SmoothField1D& alpha,
                             const SmoothField1D& beta, double w) {
  if (!geom.flat) throw std::domain_error("ruled_isometry: geometry must be flat");
  const double L = geom.length;
  for (int i = 0; i <= 128; ++i) {
    const double x1 = L * i / 128.0;
    if (std::abs(geom.ii0(x1).determinant()) > 1e-10)
      throw std::domain_error("ruled_isometry: requires det II0 == 0 along the midline");
    if (std::abs(geom.ii0(x1)(0, 0)) < 1e-8)
      throw std::domain_error(
          "ruled_isometry: II0_11 vanishes on the midline; the ruling would be tangent "
          "(construction needs II11(z1,0) != 0)");
  }

  auto data = std::make_shared<RuledData>();
  data->length = L;
  data->w = w;
  data->eps0 = 0.1 * L;

  const SymField2x2 ii = geom.second_form;
  auto entry = [ii](int r, int c) {
    return SmoothField1D::analytic(
        [ii, r, c](double s) { return ii.value(s, 0.0)(r, c); },
        [ii, r, c](double s) { return ii.d1(s, 0.0)(r, c); },
        [ii, r, c](double s) {
          const double h = 1e-4;
          return (ii.d1(s + h, 0.0)(r, c) - ii.d1(s - h, 0.0)(r, c)) / (2 * h);
        });
  };
  const SmoothField1D l0 = extend_field(entry(0, 0), L);
  const SmoothField1D m0 = extend_field(entry(0, 1), L);
  const SmoothField1D n0 = extend_field(entry(1, 1), L);
  const SmoothField1D al = extend_field(alpha, L);
  const SmoothField1D be = extend_field(beta, L);
  data->kappa = extend_field(geom.kappa, L);

  // gamma_w solves det A_w = 0:
  //   gamma_w = (2 m0 beta - n0 alpha + w beta^2) / (l0 + w alpha).
  const double eps0 = data->eps0;
  {
    const int ns = 513;
    Eigen::VectorXd grid(ns), va11(ns), va12(ns), va22(ns);
    for (int i = 0; i < ns; ++i) {
      const double s = -eps0 + (L + 2 * eps0) * i / (ns - 1);
      grid[i] = s;
      const double a11 = l0(s) + w * al(s);
      if (std::abs(a11) < 1e-8)
        throw std::domain_error(
            "ruled_isometry: II0_11 + w alpha vanishes on the extended midline "
            "(construction needs II11(z1,0) != 0)");
      const double a12 = m0(s) + w * be(s);
      const double gw = (2.0 * m0(s) * be(s) - n0(s) * al(s) + w * be(s) * be(s)) / a11;
      va11[i] = a11;
      va12[i] = a12;
      va22[i] = n0(s) + w * gw;
    }
    data->a11 = SmoothField1D::from_samples(grid, va11);
    data->a12 = SmoothField1D::from_samples(grid, va12);
    data->a22 = SmoothField1D::from_samples(grid, va22);
  }
  data->qsign = data->a11(0.0) > 0 ? 1.0 : -1.0;

  // eta: ruling-parameter range, sized from the least-transversal ruling.
  double min_q2 = 1e300;
  for (int i = 0; i <= 256; ++i) {
    const double s = -eps0 + (L + 2 * eps0) * i / 256.0;
    min_q2 = std::min(min_q2, std::abs(data->ruling(s)[1]));
  }
  data->min_q2 = min_q2;
  data->eta = 2.0 * w / min_q2;

  const double total = L + 2 * eps0;
  const SmoothField1D kap = data->kappa;
  const SmoothField1D a11f = data->a11, a12f = data->a12;
  data->base_frame = FramePath(
      [kap, a11f, a12f, eps0](double sigma) {
        const double s = sigma - eps0;
        Eigen::Matrix3d g;
        g << 0, -kap(s), -a11f(s), kap(s), 0, -a12f(s), a11f(s), a12f(s), 0;
        return g;
      },
      total, Eigen::Matrix3d::Identity(), 4096);
  data->gcorr = data->base_frame.at(eps0).transpose();

  data->base_planar =
      PlanarFramePath([kap, eps0](double sigma) { return kap(sigma - eps0); }, total, 0.0, 4096);
  data->theta0 = data->base_planar.angle(eps0);
  {
    const PlanarFramePath bp = data->base_planar;
    data->planar_directrix = CumulativePath<Eigen::Vector2d>(
        [bp](double sigma) { return Eigen::Vector2d(bp.at(sigma).col(0)); }, total,
        Eigen::Vector2d::Zero(), 4096);
    data->planar_anchor = data->planar_directrix.at(eps0);
    const FramePath bf = data->base_frame;
    data->space_directrix = CumulativePath<Eigen::Vector3d>(
        [bf](double sigma) { return Eigen::Vector3d(bf.at(sigma).col(0)); }, total,
        Eigen::Vector3d::Zero(), 4096);
    data->space_anchor = data->space_directrix.at(eps0);
  }

  RuledIsometry out;
  out.a_w = [data](double x1) {
    Eigen::Matrix2d a;
    a << data->a11(x1), data->a12(x1), data->a12(x1), data->a22(x1);
    return a;
  };
  out.frame = [data](double s) { return data->frame(s); };

  out.surface.width = w;
  out.surface.length = L;
  out.surface.value = [data](double z1, double z2) {
    double t, s;
    data->invert(z1, z2, &t, &s);
    const Eigen::Matrix3d r = data->frame(t);
    const Eigen::Vector2d q = data->ruling(t);
    return Eigen::Vector3d(data->space_curve(t) + s * (q[0] * r.col(0) + q[1] * r.col(1)));
  };
  out.surface.jacobian = [data](double z1, double z2) {
    double t, s;
    data->invert(z1, z2, &t, &s);
    const Eigen::Matrix3d r = data->frame(t);
    const Eigen::Matrix2d pt = data->planar(t).transpose();
    Eigen::Matrix<double, 3, 2> h = r.leftCols<2>() * pt;
    // chi Jacobian at (z1, z2)
    const Eigen::Matrix2d p = data->planar(z1);
    Eigen::Matrix2d dchi;
    dchi.col(0) = (1.0 - data->kappa(z1) * z2) * p.col(0);
    dchi.col(1) = p.col(1);
    return Eigen::Matrix<double, 3, 2>(h * dchi);
  };
  out.surface.second = [data](double z1, double z2) {
    double t, s;
    data->invert(z1, z2, &t, &s);
    const Eigen::Matrix3d r = data->frame(t);
    const Eigen::Matrix3d dr = data->frame_derivative(t);
    const Eigen::Matrix2d p = data->planar(t);
    const double kt = data->kappa(t);
    // H(t) = rhat P(t)^T and its t-derivative.
    Eigen::Matrix2d jt;
    jt << 0, -kt, kt, 0;
    const Eigen::Matrix<double, 3, 2> h = r.leftCols<2>() * p.transpose();
    const Eigen::Matrix<double, 3, 2> hp =
        dr.leftCols<2>() * p.transpose() + r.leftCols<2>() * jt.transpose() * p.transpose();
    // Gradient of t over the plane: first row of (chart Jacobian)^-1.
    const Eigen::Matrix2d inv = data->chart_jacobian(t, s).inverse();
    const Eigen::RowVector2d tgrad = inv.row(0);
    // chi Jacobian and its partials at (z1, z2).
    const double k = data->kappa(z1), dk = data->kappa.d1(z1);
    const Eigen::Matrix2d pz = data->planar(z1);
    const Eigen::Vector2d t1 = (1.0 - k * z2) * pz.col(0);
    const Eigen::Vector2d t2 = pz.col(1);
    const Eigen::Vector2d d1t1 = -dk * z2 * pz.col(0) + (1.0 - k * z2) * k * pz.col(1);
    const Eigen::Vector2d d2t1 = -k * pz.col(0);
    const Eigen::Vector2d d1t2 = -k * pz.col(0);
    const Eigen::Vector2d d2t2 = Eigen::Vector2d::Zero();
    const double dt_d1 = tgrad * t1;
    const double dt_d2 = tgrad * t2;
    std::array<Eigen::Vector3d, 3> dd;
    dd[0] = hp * t1 * dt_d1 + h * d1t1;
    dd[1] = hp * t1 * dt_d2 + h * d2t1;
    dd[2] = hp * t2 * dt_d2 + h * d2t2;
    return dd;
  };
  return out;
}

namespace {

Eigen::Matrix3d gamma_matrix(const SymField2x2& a, const SymField2x2& ii, int dir, double z1,
                             double z2) {
  const Eigen::Matrix2d av = a.value(z1, z2);
  const Eigen::Matrix2d d1 = a.d1(z1, z2);
  const Eigen::Matrix2d d2 = a.d2(z1, z2);
  const Eigen::Matrix2d ainv = av.inverse();
  // Christoffel symbols of the second kind.
  auto da = [&](int l, int i, int j) { return l == 0 ? d1(i, j) : d2(i, j); };
  double chr[2][2][2];
  for (int k = 0; k < 2; ++k)
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        double acc = 0;
        for (int l = 0; l < 2; ++l) acc += ainv(k, l) * (da(i, j, l) + da(j, i, l) - da(l, i, j));
        chr[i][j][k] = 0.5 * acc;
      }
  const Eigen::Matrix2d iv = ii.value(z1, z2);
  const Eigen::Matrix2d mixed = iv * ainv;  // II_i^j = II_ik a^kj
  Eigen::Matrix3d g;
  g << chr[dir][0][0], chr[dir][1][0], -mixed(dir, 0), chr[dir][0][1], chr[dir][1][1],
      -mixed(dir, 1), iv(dir, 0), iv(dir, 1), 0;
  return g;
}

struct FrameState {
  Eigen::Matrix3d f;
  Eigen::Vector3d pos;
};

FrameState rk4_line(const SymField2x2& a, const SymField2x2& ii, FrameState y, int dir, double z1,
                    double z2, double h, int substeps) {
  const double hs = h / substeps;
  for (int k = 0; k < substeps; ++k) {
    auto deriv = [&](const FrameState& s, double u1, double u2) {
      const Eigen::Matrix3d g = gamma_matrix(a, ii, dir, u1, u2);
      FrameState d;
      d.f = s.f * g;
      d.pos = s.f.col(dir);
      return d;
    };
    double u1 = z1, u2 = z2;
    auto advance = [&](double frac) {
      if (dir == 0) return std::pair<double, double>(u1 + frac * hs, u2);
      return std::pair<double, double>(u1, u2 + frac * hs);
    };
    const auto [m1a, m1b] = advance(0.0);
    FrameState k1 = deriv(y, m1a, m1b);
    FrameState y2{y.f + 0.5 * hs * k1.f, y.pos + 0.5 * hs * k1.pos};
    const auto [m2a, m2b] = advance(0.5);
    FrameState k2 = deriv(y2, m2a, m2b);
    FrameState y3{y.f + 0.5 * hs * k2.f, y.pos + 0.5 * hs * k2.pos};
    FrameState k3 = deriv(y3, m2a, m2b);
    FrameState y4{y.f + hs * k3.f, y.pos + hs * k3.pos};
    const auto [m4a, m4b] = advance(1.0);
    FrameState k4 = deriv(y4, m4a, m4b);
    y.f += (hs / 6.0) * (k1.f + 2 * k2.f + 2 * k3.f + k4.f);
    y.pos += (hs / 6.0) * (k1.pos + 2 * k2.pos + 2 * k3.pos + k4.pos);
    if (dir == 0)
      z1 += hs;
    else
      z2 += hs;
  }
  return y;
}

struct GridData {
  int n1, n2;
  double l1, l2;
  std::vector<Eigen::Vector3d> pos;
  std::vector<Eigen::Matrix3d> frames;
  SymField2x2 a, ii;
};

double catmull_rom(double pm1, double p0, double p1, double p2, double u) {
  return 0.5 * ((2 * p0) + (-pm1 + p1) * u + (2 * pm1 - 5 * p0 + 4 * p1 - p2) * u * u +
                (-pm1 + 3 * p0 - 3 * p1 + p2) * u * u * u);
}

}  // namespace

FrameSurface surface_from_forms(const SymField2x2& a, const SymField2x2& ii, double l1, double l2,
                                const Eigen::Vector3d& base, int n1, int n2) {
  FrameSurface out;
  out.n1 = n1;
  out.n2 = n2;
  out.l1 = l1;
  out.l2 = l2;
  const double h1 = l1 / (n1 - 1);
  const double h2 = l2 / (n2 - 1);
  const int j0 = (n2 - 1) / 2;
  auto z1_of = [&](int i) { return i * h1; };
  auto z2_of = [&](int j) { return -0.5 * l2 + j * h2; };

  FrameState start;
  {
    const Eigen::Matrix2d a0 = a.value(0.0, z2_of(j0));
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a0);
    if (es.eigenvalues().minCoeff() <= 0)
      throw std::domain_error("surface_from_forms: a must be positive definite");
    const Eigen::Matrix2d asqrt = es.eigenvectors() * es.eigenvalues().cwiseSqrt().asDiagonal() *
                                  es.eigenvectors().transpose();
    start.f = Eigen::Matrix3d::Identity();
    start.f.topLeftCorner<2, 2>() = asqrt;
    start.pos = base;
  }

  const int sub = 2;
  std::vector<FrameState> sheet_a(n1 * n2), sheet_b(n1 * n2);
  auto idx = [&](int i, int j) { return i * n2 + j; };

  // Sheet A: along x1 on the base row, then along x2 columns.
  sheet_a[idx(0, j0)] = start;
  for (int i = 1; i < n1; ++i)
    sheet_a[idx(i, j0)] =
        rk4_line(a, ii, sheet_a[idx(i - 1, j0)], 0, z1_of(i - 1), z2_of(j0), h1, sub);
  for (int i = 0; i < n1; ++i) {
    for (int j = j0 + 1; j < n2; ++j)
      sheet_a[idx(i, j)] = rk4_line(a, ii, sheet_a[idx(i, j - 1)], 1, z1_of(i), z2_of(j - 1), h2,
                                    sub);
    for (int j = j0 - 1; j >= 0; --j)
      sheet_a[idx(i, j)] = rk4_line(a, ii, sheet_a[idx(i, j + 1)], 1, z1_of(i), z2_of(j + 1), -h2,
                                    sub);
  }

  // Sheet B: along x2 on the base column, then along x1 rows.
  sheet_b[idx(0, j0)] = start;
  for (int j = j0 + 1; j < n2; ++j)
    sheet_b[idx(0, j)] = rk4_line(a, ii, sheet_b[idx(0, j - 1)], 1, 0.0, z2_of(j - 1), h2, sub);
  for (int j = j0 - 1; j >= 0; --j)
    sheet_b[idx(0, j)] = rk4_line(a, ii, sheet_b[idx(0, j + 1)], 1, 0.0, z2_of(j + 1), -h2, sub);
  for (int j = 0; j < n2; ++j)
    for (int i = 1; i < n1; ++i)
      sheet_b[idx(i, j)] = rk4_line(a, ii, sheet_b[idx(i - 1, j)], 0, z1_of(i - 1), z2_of(j), h1,
                                    sub);

  out.positions.resize(n1 * n2);
  out.frames.resize(n1 * n2);
  out.residual.resize(n1, n2);
  out.residual_max = 0;
  for (int i = 0; i < n1; ++i)
    for (int j = 0; j < n2; ++j) {
      out.positions[idx(i, j)] = sheet_a[idx(i, j)].pos;
      out.frames[idx(i, j)] = sheet_a[idx(i, j)].f;
      const double r = (sheet_a[idx(i, j)].f - sheet_b[idx(i, j)].f).norm();
      out.residual(i, j) = r;
      out.residual_max = std::max(out.residual_max, r);
    }

  auto data = std::make_shared<GridData>();
  data->n1 = n1;
  data->n2 = n2;
  data->l1 = l1;
  data->l2 = l2;
  data->pos = out.positions;
  data->frames = out.frames;
  data->a = a;
  data->ii = ii;

  auto interp = [data](double z1, double z2, bool frame, Eigen::Vector3d* pv,
                       Eigen::Matrix3d* pf) {
    const double h1 = data->l1 / (data->n1 - 1);
    const double h2 = data->l2 / (data->n2 - 1);
    const double x = z1 / h1;
    const double y = (z2 + 0.5 * data->l2) / h2;
    int i0 = static_cast<int>(std::floor(x));
    int j0 = static_cast<int>(std::floor(y));
    i0 = std::max(1, std::min(data->n1 - 3, i0));
    j0 = std::max(1, std::min(data->n2 - 3, j0));
    const double u = x - i0, v = y - j0;
    auto sample = [&](int i, int j, int comp, int rr, int cc) {
      const int id = i * data->n2 + j;
      return frame ? data->frames[id](rr, cc) : data->pos[id][comp];
    };
    auto eval = [&](int comp, int rr, int cc) {
      double rows[4];
      for (int di = -1; di <= 2; ++di) {
        rows[di + 1] = catmull_rom(sample(i0 + di, j0 - 1, comp, rr, cc),
                                   sample(i0 + di, j0, comp, rr, cc),
                                   sample(i0 + di, j0 + 1, comp, rr, cc),
                                   sample(i0 + di, j0 + 2, comp, rr, cc), v);
      }
      return catmull_rom(rows[0], rows[1], rows[2], rows[3], u);
    };
    if (pv)
      for (int c = 0; c < 3; ++c) (*pv)[c] = eval(c, 0, 0);
    if (pf)
      for (int rr = 0; rr < 3; ++rr)
        for (int cc = 0; cc < 3; ++cc) (*pf)(rr, cc) = eval(0, rr, cc);
  };

  out.immersion.width = l2;
  out.immersion.length = l1;
  out.immersion.value = [interp](double z1, double z2) {
    Eigen::Vector3d v;
    interp(z1, z2, false, &v, nullptr);
    return v;
  };
  out.immersion.jacobian = [interp](double z1, double z2) {
    Eigen::Matrix3d f;
    interp(z1, z2, true, nullptr, &f);
    return Eigen::Matrix<double, 3, 2>(f.leftCols<2>());
  };
  out.immersion.second = [interp, data](double z1, double z2) {
    Eigen::Matrix3d f;
    interp(z1, z2, true, nullptr, &f);
    const Eigen::Matrix3d g1 = gamma_matrix(data->a, data->ii, 0, z1, z2);
    const Eigen::Matrix3d g2 = gamma_matrix(data->a, data->ii, 1, z1, z2);
    std::array<Eigen::Vector3d, 3> dd;
    dd[0] = (f * g1).col(0);
    dd[1] = 0.5 * ((f * g2).col(0) + (f * g1).col(1));
    dd[2] = (f * g2).col(1);
    return dd;
  };
  return out;
}

}  // namespace ribbonlab
