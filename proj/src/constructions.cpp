#include "ribbonlab/constructions.hpp"

#include <cmath>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "ribbonlab/quadrature.hpp"

namespace ribbonlab {

FramePath darboux_frame(const SmoothField1D& kappa, const SmoothField1D& mu,
                        const SmoothField1D& tau, double length, const Eigen::Matrix3d& initial,
                        int samples) {
  auto k = kappa, m = mu, t = tau;
  return FramePath(
      [k, m, t](double s) {
        Eigen::Matrix3d g;
        g << 0, -k(s), -m(s), k(s), 0, -t(s), m(s), t(s), 0;
        return g;
      },
      length, initial, samples);
}

AnalyticConfig3 psi_config(const EuclideanRibbon& ribbon) {
  AnalyticConfig3 cfg;
  cfg.t = ribbon.thickness();
  cfg.w = ribbon.width();
  auto rib = std::make_shared<EuclideanRibbon>(ribbon);
  const double t = cfg.t, w = cfg.w;
  cfg.value = [rib, t, w](const Eigen::Vector3d& x) {
    return rib->psi(Eigen::Vector3d(x[0], w * x[1], t * x[2]));
  };
  cfg.grad_t = [rib, t, w](const Eigen::Vector3d& x) {
    return rib->dpsi(Eigen::Vector3d(x[0], w * x[1], t * x[2]));
  };
  return cfg;
}

namespace {

// 3-vector field sampled into three splines.
struct VecField {
  SmoothField1D c0, c1, c2;
  Eigen::Vector3d at(double s) const { return Eigen::Vector3d(c0(s), c1(s), c2(s)); }
  Eigen::Vector3d d1(double s) const { return Eigen::Vector3d(c0.d1(s), c1.d1(s), c2.d1(s)); }
};

VecField sample_vec_field(double length, int n,
                          const std::function<Eigen::Vector3d(double)>& f) {
  Eigen::VectorXd grid(n), a(n), b(n), c(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = length * i / (n - 1);
    const Eigen::Vector3d v = f(grid[i]);
    a[i] = v[0];
    b[i] = v[1];
    c[i] = v[2];
  }
  return {SmoothField1D::from_samples(grid, a), SmoothField1D::from_samples(grid, b),
          SmoothField1D::from_samples(grid, c)};
}

// lambda-vector realizing the 2x2 relaxation: the completion B* of A gives
// the third-column profile (2 B13, 2 B23, B33).
Eigen::Vector3d completion_lambda(const Relaxed2x2& rel, const Eigen::Matrix2d& a) {
  const Eigen::Matrix3d b = rel.complete(a);
  return Eigen::Vector3d(2.0 * b(0, 2), 2.0 * b(1, 2), b(2, 2));
}

struct RecoveryCtx {
  EuclideanRibbon ribbon;
  FramePath rbar;
  CumulativePath<Eigen::Vector3d> p;
  SmoothField1D alpha, beta, gamma;
  VecField v1extra;  // unused in Gauss mode
  VecField lam, lam1, eta2, eta3;
  SmoothField1D sigma;
  double eps = 0, t = 0, w = 0;
  bool codazzi = false;

  RecoveryCtx(const EuclideanRibbon& rib) : ribbon(rib) {}
};

AnalyticConfig3 assemble_recovery(std::shared_ptr<RecoveryCtx> ctx) {
  AnalyticConfig3 cfg;
  cfg.t = ctx->t;
  cfg.w = ctx->w;

  cfg.value = [ctx](const Eigen::Vector3d& x) {
    const double x1 = x[0], x2 = x[1], x3 = x[2];
    const double t = ctx->t, w = ctx->w, eps = ctx->eps;
    const Eigen::Vector3d z(x1, w * x2, t * x3);
    const Eigen::Matrix3d rb = ctx->rbar.at(x1);
    const Eigen::Matrix3d q0 = ctx->ribbon.q0(x1);
    const Eigen::Vector3d psi = ctx->ribbon.psi(z);
    const Eigen::Vector3d theta = ctx->ribbon.phi(x1, 0.0);
    const double gam = ctx->gamma(x1);
    Eigen::Vector3d v1(ctx->beta(x1), gam, 0.0);
    Eigen::Vector3d m;
    if (!ctx->codazzi) {
      m = (w * w / t) * x2 * x2 * Eigen::Vector3d(0, 0, gam) -
          t * x3 * x3 * ctx->lam.at(x1) +
          (w / 3.0) * (x2 * x2 * x2 - 0.25 * x2) * ctx->eta2.at(x1) +
          t * (x2 * x2 - 1.0 / 12.0) * x3 * ctx->eta3.at(x1);
    } else {
      const double sig = ctx->sigma(x1);
      v1[1] += 0.5 * x2 * sig;
      m = (w * w / t) * x2 * x2 * Eigen::Vector3d(0, 0, gam + x2 * sig / 3.0) -
          t * x3 * x3 * (ctx->lam.at(x1) + x2 * ctx->lam1.at(x1));
    }
    return Eigen::Vector3d(ctx->p.at(x1) + rb * (psi - theta) -
                           eps * w * x2 * x3 * rb * (q0 * v1) + 0.5 * eps * rb * (q0 * m));
  };

  cfg.grad_t = [ctx](const Eigen::Vector3d& x) {
    const double x1 = x[0], x2 = x[1], x3 = x[2];
    const double t = ctx->t, w = ctx->w, eps = ctx->eps;
    const Eigen::Vector3d z(x1, w * x2, t * x3);
    const Eigen::Matrix3d rb = ctx->rbar.at(x1);
    const Eigen::Matrix3d drb = ctx->rbar.derivative(x1);
    const Eigen::Matrix3d q0 = ctx->ribbon.q0(x1);
    const Eigen::Matrix3d dq0 = ctx->ribbon.q0_derivative(x1);
    const Eigen::Matrix3d dpsi = ctx->ribbon.dpsi(z);
    const Eigen::Vector3d psi = ctx->ribbon.psi(z);
    const Eigen::Vector3d theta = ctx->ribbon.phi(x1, 0.0);
    const Eigen::Vector3d theta_p = q0.col(0);

    const double gam = ctx->gamma(x1), dgam = ctx->gamma.d1(x1);
    Eigen::Vector3d v1(ctx->beta(x1), gam, 0.0);
    Eigen::Vector3d dv1(ctx->beta.d1(x1), dgam, 0.0);
    Eigen::Vector3d m, dm_dx1, dm_dx2, dm_dx3;
    double pfactor = 1.0;
    if (!ctx->codazzi) {
      const double dg = gauss_deficit(ctx->ribbon.geometry(), x1);
      pfactor = 1.0 + eps / 24.0 * dg;
      const double q2c = x2 * x2 * x2 - 0.25 * x2;
      m = (w * w / t) * x2 * x2 * Eigen::Vector3d(0, 0, gam) - t * x3 * x3 * ctx->lam.at(x1) +
          (w / 3.0) * q2c * ctx->eta2.at(x1) + t * (x2 * x2 - 1.0 / 12.0) * x3 * ctx->eta3.at(x1);
      dm_dx1 = (w * w / t) * x2 * x2 * Eigen::Vector3d(0, 0, dgam) -
               t * x3 * x3 * ctx->lam.d1(x1) + (w / 3.0) * q2c * ctx->eta2.d1(x1) +
               t * (x2 * x2 - 1.0 / 12.0) * x3 * ctx->eta3.d1(x1);
      dm_dx2 = (w * w / t) * 2.0 * x2 * Eigen::Vector3d(0, 0, gam) +
               (w / 3.0) * (3.0 * x2 * x2 - 0.25) * ctx->eta2.at(x1) +
               2.0 * t * x2 * x3 * ctx->eta3.at(x1);
      dm_dx3 = -2.0 * t * x3 * ctx->lam.at(x1) + t * (x2 * x2 - 1.0 / 12.0) * ctx->eta3.at(x1);
    } else {
      const double sig = ctx->sigma(x1), dsig = ctx->sigma.d1(x1);
      v1[1] += 0.5 * x2 * sig;
      dv1[1] += 0.5 * x2 * dsig;
      m = (w * w / t) * x2 * x2 * Eigen::Vector3d(0, 0, gam + x2 * sig / 3.0) -
          t * x3 * x3 * (ctx->lam.at(x1) + x2 * ctx->lam1.at(x1));
      dm_dx1 = (w * w / t) * x2 * x2 * Eigen::Vector3d(0, 0, dgam + x2 * dsig / 3.0) -
               t * x3 * x3 * (ctx->lam.d1(x1) + x2 * ctx->lam1.d1(x1));
      dm_dx2 = (w * w / t) * Eigen::Vector3d(0, 0, 2.0 * x2 * gam + x2 * x2 * sig) -
               t * x3 * x3 * ctx->lam1.at(x1);
      dm_dx3 = -2.0 * t * x3 * (ctx->lam.at(x1) + x2 * ctx->lam1.at(x1));
    }

    Eigen::Matrix3d g;
    // d1 u
    g.col(0) = rb * theta_p * pfactor + drb * (psi - theta) + rb * (dpsi.col(0) - theta_p) -
               eps * w * x2 * x3 * (drb * (q0 * v1) + rb * (dq0 * v1) + rb * (q0 * dv1)) +
               0.5 * eps * (drb * (q0 * m) + rb * (dq0 * m) + rb * (q0 * dm_dx1));
    // w^-1 d2 u; note w^-1 d2 of the x2 x3 term differentiates v1(x2) too.
    Eigen::Vector3d dv1_dx2 = Eigen::Vector3d::Zero();
    if (ctx->codazzi) dv1_dx2[1] = 0.5 * ctx->sigma(x1);
    g.col(1) = rb * dpsi.col(1) - eps * x3 * rb * (q0 * (v1 + x2 * dv1_dx2)) +
               0.5 * (eps / w) * rb * (q0 * dm_dx2);
    // t^-1 d3 u
    g.col(2) = rb * dpsi.col(2) - (eps * w / t) * x2 * rb * (q0 * v1) +
               0.5 * (eps / t) * rb * (q0 * dm_dx3);
    return g;
  };
  return cfg;
}

}  // namespace

AnalyticConfig3 recovery_narrow_gauss(const EuclideanRibbon& ribbon, const LimitForms& forms,
                                      const MidlineState& state, double t, double w) {
  auto ctx = std::make_shared<RecoveryCtx>(ribbon);
  ctx->t = t;
  ctx->w = w;
  ctx->eps = w * w;
  ctx->codazzi = false;
  ctx->alpha = state.alpha;
  ctx->beta = state.beta;
  ctx->gamma = state.gammabar;
  const RibbonGeometry& geom = ribbon.geometry();
  const double L = geom.length;
  const int ns = 257;

  ctx->lam = sample_vec_field(L, ns, [&](double x1) {
    Eigen::Matrix2d a;
    a << state.alpha(x1), state.beta(x1), state.beta(x1), state.gammabar(x1);
    return completion_lambda(forms.relaxed(x1), a);
  });
  // eta profiles realize tilde-Q1 * deltaG^2: S* minimizes tilde-Q3 over
  // S11 = -deltaG, and the eta columns are read off its entries.
  VecField e2 = sample_vec_field(L, ns, [&](double x1) {
    const Eigen::Matrix3d s = q1_completion(forms.q3(x1), -gauss_deficit(geom, x1));
    return Eigen::Vector3d(2.0 * s(0, 1), s(1, 1), s(1, 2));
  });
  VecField e3 = sample_vec_field(L, ns, [&](double x1) {
    const Eigen::Matrix3d s = q1_completion(forms.q3(x1), -gauss_deficit(geom, x1));
    return Eigen::Vector3d(2.0 * s(0, 2), s(1, 2), s(2, 2));
  });
  ctx->eta2 = e2;
  ctx->eta3 = e3;
  ctx->lam1 = sample_vec_field(L, ns, [](double) { return Eigen::Vector3d::Zero(); });
  ctx->sigma = SmoothField1D::constant(0.0);

  // Rotation path of the state: A' = Q0 Vtilde Q0^T, Rbar' = (eps/t) Rbar A'.
  const double ratio = ctx->eps / t;
  auto rib = std::make_shared<EuclideanRibbon>(ribbon);
  auto a_state = state;
  auto aprime = [rib, a_state](double s) {
    Eigen::Matrix3d v = Eigen::Matrix3d::Zero();
    v(0, 2) = -a_state.alpha(s);
    v(1, 2) = -a_state.beta(s);
    v(2, 0) = a_state.alpha(s);
    v(2, 1) = a_state.beta(s);
    const Eigen::Matrix3d q0 = rib->q0(s);
    return Eigen::Matrix3d(q0 * v * q0.transpose());
  };
  ctx->rbar = FramePath([aprime, ratio](double s) { return Eigen::Matrix3d(ratio * aprime(s)); },
                        L, Eigen::Matrix3d::Identity(), 1024);

  const FramePath rbar_copy = ctx->rbar;
  const double eps = ctx->eps;
  auto geom_copy = geom;
  ctx->p = CumulativePath<Eigen::Vector3d>(
      [rbar_copy, rib, geom_copy, eps](double s) {
        const double factor = 1.0 + eps / 24.0 * gauss_deficit(geom_copy, s);
        return Eigen::Vector3d(rbar_copy.at(s) * rib->q0(s).col(0) * factor);
      },
      L, Eigen::Vector3d::Zero(), 1024);

  return assemble_recovery(ctx);
}

AnalyticConfig3 recovery_narrow_codazzi(const EuclideanRibbon& ribbon, const LimitForms& forms,
                                        const MidlineState& state, double t, double w,
                                        const std::optional<SmoothField1D>& x22_override) {
  const RibbonGeometry& geom = ribbon.geometry();
  const double L = geom.length;
  for (int i = 0; i <= 64; ++i) {
    if (std::abs(gauss_deficit(geom, L * i / 64.0)) > 1e-10)
      throw std::domain_error("recovery_narrow_codazzi: requires deltaG == 0");
  }
  auto ctx = std::make_shared<RecoveryCtx>(ribbon);
  ctx->t = t;
  ctx->w = w;
  ctx->eps = w * t;
  ctx->codazzi = true;
  ctx->alpha = state.alpha;
  ctx->beta = state.beta;
  ctx->gamma = state.gammabar;
  const int ns = 257;

  SmoothField1D x22 = x22_override ? *x22_override : expansion_residual(ribbon).x22;

  // sigma shifts the 22 slot of the deficit matrix to the q2circ argmin.
  ctx->sigma = sample_field(0.0, L, ns, [&](double x1) {
    const Eigen::Vector2d dc = codazzi_deficit(geom, x1);
    const double cstar = q2_circ(forms.relaxed(x1).q2, dc[0], dc[1]).argmin_a22;
    return cstar - x22(x1);
  });
  ctx->lam = sample_vec_field(L, ns, [&](double x1) {
    Eigen::Matrix2d a;
    a << state.alpha(x1), state.beta(x1), state.beta(x1), state.gammabar(x1);
    return completion_lambda(forms.relaxed(x1), a);
  });
  ctx->lam1 = sample_vec_field(L, ns, [&](double x1) {
    const Eigen::Vector2d dc = codazzi_deficit(geom, x1);
    const double cstar = q2_circ(forms.relaxed(x1).q2, dc[0], dc[1]).argmin_a22;
    Eigen::Matrix2d a;
    a << dc[0], dc[1], dc[1], cstar;
    return completion_lambda(forms.relaxed(x1), a);
  });
  ctx->eta2 = sample_vec_field(L, ns, [](double) { return Eigen::Vector3d::Zero(); });
  ctx->eta3 = ctx->eta2;

  const double ratio = ctx->eps / t;
  auto rib = std::make_shared<EuclideanRibbon>(ribbon);
  auto a_state = state;
  auto aprime = [rib, a_state](double s) {
    Eigen::Matrix3d v = Eigen::Matrix3d::Zero();
    v(0, 2) = -a_state.alpha(s);
    v(1, 2) = -a_state.beta(s);
    v(2, 0) = a_state.alpha(s);
    v(2, 1) = a_state.beta(s);
    const Eigen::Matrix3d q0 = rib->q0(s);
    return Eigen::Matrix3d(q0 * v * q0.transpose());
  };
  ctx->rbar = FramePath([aprime, ratio](double s) { return Eigen::Matrix3d(ratio * aprime(s)); },
                        L, Eigen::Matrix3d::Identity(), 1024);
  const FramePath rbar_copy = ctx->rbar;
  ctx->p = CumulativePath<Eigen::Vector3d>(
      [rbar_copy, rib](double s) { return Eigen::Vector3d(rbar_copy.at(s) * rib->q0(s).col(0)); },
      L, Eigen::Vector3d::Zero(), 1024);

  return assemble_recovery(ctx);
}

Eigen::Vector3d SurfaceImmersion::normal(double z1, double z2) const {
  const Eigen::Matrix<double, 3, 2> j = jacobian(z1, z2);
  Eigen::Vector3d v = j.col(0).cross(j.col(1));
  const double n = v.norm();
  if (n < 1e-12) throw std::runtime_error("SurfaceImmersion::normal: degenerate tangent plane");
  return v / n;
}

Eigen::Matrix2d SurfaceImmersion::first_form(double z1, double z2) const {
  const Eigen::Matrix<double, 3, 2> j = jacobian(z1, z2);
  return j.transpose() * j;
}

Eigen::Matrix2d SurfaceImmersion::second_form(double z1, double z2) const {
  const std::array<Eigen::Vector3d, 3> dd = second(z1, z2);
  const Eigen::Vector3d nu = normal(z1, z2);
  Eigen::Matrix2d ii;
  ii << dd[0].dot(nu), dd[1].dot(nu), dd[1].dot(nu), dd[2].dot(nu);
  return ii;
}

GcResidual gc_residual(const RibbonGeometry& geom, double w, const StripField2x2& ii_field,
                       int n1, int n2) {
  GcResidual out;
  out.n1 = n1;
  out.n2 = n2;
  out.gauss.resize(n1, n2);
  out.codazzi1.resize(n1, n2);
  out.codazzi2.resize(n1, n2);
  for (int i = 0; i < n1; ++i) {
    const double x1 = geom.length * i / (n1 - 1);
    const double k = geom.kappa(x1);
    const double dk = geom.kappa.d1(x1);
    for (int j = 0; j < n2; ++j) {
      const double x2 = -0.5 + 1.0 * j / (n2 - 1);
      const Eigen::Matrix2d ii = ii_field.value(x1, x2);
      const Eigen::Matrix2d p1 = ii_field.d1(x1, x2);
      const Eigen::Matrix2d p2 = ii_field.d2(x1, x2);
      const double c = 1.0 - k * w * x2;
      out.gauss(i, j) = ii.determinant();
      out.codazzi1(i, j) = c * (p2(0, 0) / w - p1(0, 1)) + k * ii(0, 0) -
                           dk * w * x2 * ii(0, 1) + k * c * c * ii(1, 1);
      out.codazzi2(i, j) = c * (p2(0, 1) / w - p1(1, 1)) - k * ii(0, 1);
    }
  }
  out.gauss_max = out.gauss.cwiseAbs().maxCoeff();
  out.codazzi_max =
      std::max(out.codazzi1.cwiseAbs().maxCoeff(), out.codazzi2.cwiseAbs().maxCoeff());
  return out;
}

StripField2x2 extract_rescaled_second_form(const SurfaceImmersion& f, double w) {
  auto surf = std::make_shared<SurfaceImmersion>(f);
  auto value = [surf, w](double x1, double x2) { return surf->second_form(x1, w * x2); };
  return StripField2x2::with_fd(value, 1e-5);
}

AnsatzResult ansatz_field(const RibbonGeometry& geom, AnsatzKind kind, double w,
                          const IsotropicModuli& moduli, std::optional<double> delta,
                          const QuadratureOptions& opt) {
  AnsatzResult out;
  if (kind == AnsatzKind::D) {
    const double kappa = geom.kappa(0.0);
    const double n = geom.ii0(0.0)(1, 1);
    const double d = delta ? *delta : std::cbrt(kappa * w);
    const double bound = std::sqrt(kappa * w) * std::sqrt(4.0 - kappa * w) / (2.0 - kappa * w);
    if (!(d > bound)) {
      std::ostringstream msg;
      msg << "ansatz_field(d): delta = " << d << " must exceed "
          << "(kappa w)^(1/2) (4 - kappa w)^(1/2) / (2 - kappa w) = " << bound;
      throw std::domain_error(msg.str());
    }
    auto value = [kappa, n, d, w](double, double x2) {
      const double c = 1.0 - kappa * w * x2;
      const double s = std::sqrt((d * d + 1.0) * c * c - 1.0);
      Eigen::Matrix2d m;
      m << s, 1.0 / c, 1.0 / c, 1.0 / (c * c * s);
      return Eigen::Matrix2d(d * n * m);
    };
    auto dx2 = [kappa, n, d, w](double, double x2) {
      const double c = 1.0 - kappa * w * x2;
      const double cp = -kappa * w;
      const double s = std::sqrt((d * d + 1.0) * c * c - 1.0);
      const double sp = (d * d + 1.0) * c * cp / s;
      Eigen::Matrix2d m;
      m << sp, -cp / (c * c), -cp / (c * c),
          -(2.0 * cp / (c * c * c * s) + sp / (c * c * s * s));
      return Eigen::Matrix2d(d * n * m);
    };
    out.field = StripField2x2::analytic(
        value, [](double, double) { return Eigen::Matrix2d::Zero().eval(); }, dx2);
    out.predicted_order = std::pow(kappa, 2.0 / 3.0) * n * n * std::pow(w, 2.0 / 3.0);
  } else {
    const double sw = std::sqrt(w);
    auto base = [w, sw]() {
      Eigen::Matrix2d m;
      m << w, sw, sw, 1.0;
      return m;
    };
    auto value = [base, sw](double x1, double x2) {
      return Eigen::Matrix2d((x1 + sw * x2) * base());
    };
    auto dx1 = [base](double, double) { return Eigen::Matrix2d(base()); };
    auto dx2 = [base, sw](double, double) { return Eigen::Matrix2d(sw * base()); };
    out.field = StripField2x2::analytic(value, dx1, dx2);
    out.predicted_order = w;
  }
  const EuclideanRibbon ribbon(geom, 0.0, w);
  out.plate_energy_value = plate_energy(ribbon, moduli, out.field, opt);
  return out;
}

}  // namespace ribbonlab
