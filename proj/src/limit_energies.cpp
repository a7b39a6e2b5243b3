#include "ribbonlab/limit_energies.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

#include "ribbonlab/quadrature.hpp"

namespace ribbonlab {

LimitForms::LimitForms(const IsotropicModuli& m) {
  constant_ = true;
  q3_const_ = q3_at_identity(m);
  relaxed_const_ = relax_to_2x2(q3_const_);
  alphas_const_ = alpha_pm(relaxed_const_.q2);
}

LimitForms::LimitForms(const QuadForm& q3, std::function<Eigen::Matrix3d(double)> frame)
    : constant_(false), frame_(std::move(frame)), q3_base_(q3) {}

void LimitForms::refresh(double x1) const {
  if (x1 == cache_x1_) return;
  q3_cache_ = conjugate_q3(q3_base_, frame_(x1));
  relaxed_cache_ = relax_to_2x2(q3_cache_);
  cache_x1_ = x1;
}

const QuadForm& LimitForms::q3(double x1) const {
  if (constant_) return q3_const_;
  refresh(x1);
  return q3_cache_;
}

const Relaxed2x2& LimitForms::relaxed(double x1) const {
  if (constant_) return relaxed_const_;
  refresh(x1);
  return relaxed_cache_;
}

double LimitForms::q2circ(double x1, double a, double b) const {
  return q2_circ(relaxed(x1).q2, a, b).value;
}

double LimitForms::q1_value(double x1) const { return q1(relaxed(x1).q2).value; }

std::pair<double, double> LimitForms::alphas(double x1) const {
  if (constant_) return alphas_const_;
  return alpha_pm(relaxed(x1).q2);
}

namespace {

Eigen::Matrix2d state_matrix(const MidlineState& s, double x1) {
  Eigen::Matrix2d m;
  const double a = s.alpha(x1), b = s.beta(x1), g = s.gammabar(x1);
  m << a, b, b, g;
  return m;
}

void require_gauss_compatible(const RibbonGeometry& geom, const char* who) {
  const int n = 257;
  for (int i = 0; i < n; ++i) {
    const double x1 = geom.length * i / (n - 1);
    if (std::abs(gauss_deficit(geom, x1)) > 1e-10)
      throw std::domain_error(std::string(who) +
                              ": Codazzi limit undefined on Gauss-incompatible input");
  }
}

}  // namespace

double e0_gauss(const RibbonGeometry& geom, const LimitForms& forms, const MidlineState& state,
                const QuadratureOptions& opt) {
  const double first = average(0.0, geom.length, opt.panels_x1, [&](double x1) {
    return forms.relaxed(x1).q2(state_matrix(state, x1));
  });
  const double second = average(0.0, geom.length, opt.panels_x1, [&](double x1) {
    const double dg = gauss_deficit(geom, x1);
    return forms.q1_value(x1) * dg * dg;
  });
  return first / 12.0 + second / 720.0;
}

double e0_gauss(const RibbonGeometry& geom, const IsotropicModuli& m, const MidlineState& state,
                const QuadratureOptions& opt) {
  return e0_gauss(geom, LimitForms(m), state, opt);
}

double e0_codazzi(const RibbonGeometry& geom, const LimitForms& forms, const MidlineState& state,
                  const QuadratureOptions& opt) {
  require_gauss_compatible(geom, "e0_codazzi");
  const double first = average(0.0, geom.length, opt.panels_x1, [&](double x1) {
    return forms.relaxed(x1).q2(state_matrix(state, x1));
  });
  const double second = average(0.0, geom.length, opt.panels_x1, [&](double x1) {
    const Eigen::Vector2d dc = codazzi_deficit(geom, x1);
    return forms.q2circ(x1, dc[0], dc[1]);
  });
  return first / 12.0 + second / 144.0;
}

double e0_codazzi(const RibbonGeometry& geom, const IsotropicModuli& m, const MidlineState& state,
                  const QuadratureOptions& opt) {
  return e0_codazzi(geom, LimitForms(m), state, opt);
}

double plate_energy(const EuclideanRibbon& ribbon, const QuadForm& q3,
                    const StripField2x2& ii_field, const QuadratureOptions& opt) {
  const RibbonGeometry& geom = ribbon.geometry();
  const double w = ribbon.width();
  const PanelRule r1 = make_panel_rule(0.0, geom.length, opt.panels_x1);
  const PanelRule r2 = make_panel_rule(-0.5, 0.5, opt.panels_x2);
  double acc = 0.0;
  for (std::size_t i = 0; i < r1.nodes.size(); ++i) {
    const double x1 = r1.nodes[i];
    for (std::size_t j = 0; j < r2.nodes.size(); ++j) {
      const double x2 = r2.nodes[j];
      const QuadForm qw = plate_form(ribbon, Eigen::Vector2d(x1, x2), q3);
      const Eigen::Matrix2d ref = geom.second_form.value(x1, w * x2);
      const Eigen::Matrix2d diff = ii_field.value(x1, x2) - ref;
      acc += r1.weights[i] * r2.weights[j] * qw(diff);
    }
  }
  return acc / (12.0 * geom.length);
}

double plate_energy(const EuclideanRibbon& ribbon, const IsotropicModuli& m,
                    const StripField2x2& ii_field, const QuadratureOptions& opt) {
  return plate_energy(ribbon, q3_at_identity(m), ii_field, opt);
}

namespace {

double f_pointwise(const QuadForm& q2, double ap, double am, const Eigen::Matrix2d& ii0,
                   const Eigen::Matrix2d& m) {
  const double det = m.determinant();
  const double pen = det >= 0 ? ap * det : -am * det;
  return q2(Eigen::Matrix2d(m - ii0)) + pen;
}

struct PointMin {
  Eigen::Matrix2d m;
  double f;
  int branch;
};

// Stationary branch with sign * alpha * cof M: (C + sign*alpha*D) v = C v0 in
// sym2 coordinates. The combined matrix is singular at alpha = alpha+- by
// construction, so solve by pseudoinverse and validate the residual.
bool signed_branch(const QuadForm& q2, double alpha, double sign, const Eigen::Matrix2d& ii0,
                   Eigen::Matrix2d* out) {
  const Eigen::Matrix3d c = q2.coeffs();
  const Eigen::Matrix3d a = c + sign * alpha * det_form_sym2();
  const Eigen::Vector3d rhs = c * sym2_coords(ii0);
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(a);
  const double cutoff = 1e-9 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::Vector3d inv = es.eigenvalues();
  for (int i = 0; i < 3; ++i) inv[i] = std::abs(inv[i]) > cutoff ? 1.0 / inv[i] : 0.0;
  const Eigen::Vector3d v =
      es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * rhs;
  if ((a * v - rhs).norm() > 1e-8 * std::max(1.0, rhs.norm())) return false;
  *out = sym2_from_coords(v);
  const double det = out->determinant();
  if (sign > 0 && det < -1e-10) return false;
  if (sign < 0 && det > 1e-10) return false;
  return true;
}

// det M = 0 branch: M = rho u(theta) u(theta)^T with closed-form rho*(theta),
// scanned and refined in theta.
PointMin rank_deficient_branch(const QuadForm& q2, const Eigen::Matrix2d& ii0) {
  const Eigen::Matrix3d c = q2.coeffs();
  const Eigen::Vector3d v0 = sym2_coords(ii0);
  auto value_at = [&](double theta, Eigen::Matrix2d* mstar) {
    const Eigen::Vector2d u(std::cos(theta), std::sin(theta));
    const Eigen::Matrix2d uu = u * u.transpose();
    const Eigen::Vector3d vu = sym2_coords(uu);
    const double a = vu.dot(c * vu);
    const double b = vu.dot(c * v0);
    const double rho = a > 1e-14 ? b / a : 0.0;
    if (mstar) *mstar = rho * uu;
    const Eigen::Vector3d d = rho * vu - v0;
    return d.dot(c * d);
  };
  const int n = 256;
  double best_theta = 0, best_val = 1e300;
  for (int i = 0; i < n; ++i) {
    const double theta = M_PI * i / n;
    const double val = value_at(theta, nullptr);
    if (val < best_val) {
      best_val = val;
      best_theta = theta;
    }
  }
  double lo = best_theta - M_PI / n, hi = best_theta + M_PI / n;
  const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = value_at(x1, nullptr), f2 = value_at(x2, nullptr);
  for (int it = 0; it < 80; ++it) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = value_at(x1, nullptr);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = value_at(x2, nullptr);
    }
  }
  PointMin out;
  out.branch = 0;
  const double theta = 0.5 * (lo + hi);
  out.f = value_at(theta, &out.m);
  return out;
}

// Safeguard: dense grid centered on II0 with iterated shrinking refinement.
PointMin direct_search(const QuadForm& q2, double ap, double am, const Eigen::Matrix2d& ii0,
                       int npts = 13, int rounds = 24) {
  Eigen::Vector3d center = sym2_coords(ii0);
  double radius = 2.0 * std::max(1.0, ii0.norm());
  PointMin best;
  best.branch = 9;
  best.f = 1e300;
  best.m = ii0;
  for (int round = 0; round < rounds; ++round) {
    Eigen::Vector3d best_local = center;
    double fbest_local = 1e300;
    for (int i = 0; i < npts; ++i)
      for (int j = 0; j < npts; ++j)
        for (int k = 0; k < npts; ++k) {
          Eigen::Vector3d v = center;
          v[0] += radius * (2.0 * i / (npts - 1) - 1.0);
          v[1] += radius * (2.0 * j / (npts - 1) - 1.0);
          v[2] += radius * (2.0 * k / (npts - 1) - 1.0);
          const Eigen::Matrix2d m = sym2_from_coords(v);
          const double f = f_pointwise(q2, ap, am, ii0, m);
          if (f < fbest_local) {
            fbest_local = f;
            best_local = v;
          }
        }
    center = best_local;
    radius *= 0.55;
    if (fbest_local < best.f) {
      best.f = fbest_local;
      best.m = sym2_from_coords(best_local);
    }
  }
  return best;
}

PointMin minimize_pointwise(const QuadForm& q2, double ap, double am,
                            const Eigen::Matrix2d& ii0) {
  std::vector<PointMin> cands;
  cands.push_back(rank_deficient_branch(q2, ii0));
  Eigen::Matrix2d m;
  if (signed_branch(q2, ap, +1.0, ii0, &m))
    cands.push_back({m, f_pointwise(q2, ap, am, ii0, m), +1});
  if (signed_branch(q2, am, -1.0, ii0, &m))
    cands.push_back({m, f_pointwise(q2, ap, am, ii0, m), -1});
  cands.push_back(direct_search(q2, ap, am, ii0));
  PointMin best = cands[0];
  for (const auto& c : cands)
    if (c.f < best.f - 1e-10) best = c;
  // Ties resolve toward the det-zero branch.
  for (const auto& c : cands)
    if (c.branch == 0 && c.f <= best.f + 1e-10) return c;
  return best;
}

}  // namespace

double wide_j(const RibbonGeometry& geom, const LimitForms& forms, const MidlineSecondForm& m,
              const QuadratureOptions& opt) {
  if (!geom.flat) throw std::domain_error("wide_j: requires a flat mid-surface");
  return average(0.0, geom.length, opt.panels_x1, [&](double x1) {
           const auto [ap, am] = forms.alphas(x1);
           const Eigen::Matrix2d mm = m.value(x1);
           return f_pointwise(forms.relaxed(x1).q2, ap, am, geom.ii0(x1), mm);
         }) /
         12.0;
}

double wide_j(const RibbonGeometry& geom, const IsotropicModuli& m, const MidlineSecondForm& mm,
              const QuadratureOptions& opt) {
  return wide_j(geom, LimitForms(m), mm, opt);
}

MinJResult min_j(const RibbonGeometry& geom, const LimitForms& forms,
                 const QuadratureOptions& opt) {
  if (!geom.flat) throw std::domain_error("min_j: requires a flat mid-surface");
  MinJResult out;
  const PanelRule rule = make_panel_rule(0.0, geom.length, opt.panels_x1);
  double acc = 0.0;
  out.c_lower = 1e300;
  out.c_upper = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double x1 = rule.nodes[i];
    const auto [ap, am] = forms.alphas(x1);
    const Eigen::Matrix2d ii0 = geom.ii0(x1);
    const PointMin pm = minimize_pointwise(forms.relaxed(x1).q2, ap, am, ii0);
    acc += rule.weights[i] * pm.f;
    MinJSample s;
    s.x1 = x1;
    s.minimizer = pm.m;
    s.f_min = pm.f;
    s.branch = pm.branch;
    out.samples.push_back(s);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(ii0, Eigen::EigenvaluesOnly);
    const double k1 = std::min(std::abs(es.eigenvalues()[0]), std::abs(es.eigenvalues()[1]));
    if (k1 > 1e-12) {
      out.c_lower = std::min(out.c_lower, pm.f / (k1 * k1));
      out.c_upper = std::max(out.c_upper, pm.f / (k1 * k1));
    }
  }
  if (out.c_lower > out.c_upper) out.c_lower = out.c_upper = 0.0;  // kappa1 == 0 throughout
  out.value = acc / (12.0 * geom.length);
  return out;
}

MinJResult min_j(const RibbonGeometry& geom, const IsotropicModuli& m,
                 const QuadratureOptions& opt) {
  return min_j(geom, LimitForms(m), opt);
}

namespace {

void require_b_structure(const RibbonGeometry& geom, double x1) {
  const Eigen::Matrix2d ii0 = geom.ii0(x1);
  if (std::abs(ii0.determinant()) > 1e-10)
    throw std::domain_error("B-structure requires det II0 == 0 along the midline");
  if (std::abs(ii0(0, 0)) < 1e-8)
    throw std::domain_error("B-structure requires II0_11 bounded away from zero at x1=" +
                            std::to_string(x1));
}

}  // namespace

Eigen::Matrix2d make_b0(const RibbonGeometry& geom, double alpha, double beta, double x1) {
  require_b_structure(geom, x1);
  const Eigen::Matrix2d ii0 = geom.ii0(x1);
  const double l0 = ii0(0, 0), m0 = ii0(0, 1), n0 = ii0(1, 1);
  Eigen::Matrix2d b;
  b << alpha, beta, beta, (2.0 * m0 * beta - n0 * alpha) / l0;
  return b;
}

Eigen::Matrix2d make_b1(const RibbonGeometry& geom, double x1) {
  require_b_structure(geom, x1);
  const Eigen::Matrix2d ii0 = geom.ii0(x1);
  const double l0 = ii0(0, 0), m0 = ii0(0, 1), n0 = ii0(1, 1);
  const Eigen::Vector2d dc = codazzi_deficit(geom, x1);
  const double dg1 = gauss_deficit_1(geom, x1);
  Eigen::Matrix2d b;
  b << dc[0], dc[1], dc[1], (dg1 - n0 * dc[0] + 2.0 * m0 * dc[1]) / l0;
  return -b;
}

CodazziIResult codazzi_i(const RibbonGeometry& geom, const LimitForms& forms,
                         const SmoothField1D& alpha, const SmoothField1D& beta,
                         const QuadratureOptions& opt) {
  CodazziIResult out;
  const double first = average(0.0, geom.length, opt.panels_x1, [&](double x1) {
    return forms.relaxed(x1).q2(make_b0(geom, alpha(x1), beta(x1), x1));
  });
  const double second = average(0.0, geom.length, opt.panels_x1, [&](double x1) {
    return forms.relaxed(x1).q2(make_b1(geom, x1));
  });
  out.value = first / 12.0 + second / 144.0;
  out.minimum = second / 144.0;
  out.scaling_surrogate = average(0.0, geom.length, opt.panels_x1, [&](double x1) {
    const Eigen::Matrix2d ii0 = geom.ii0(x1);
    const double l0 = ii0(0, 0), m0 = ii0(0, 1), n0 = ii0(1, 1);
    (void)l0;
    const Eigen::Vector2d dc = codazzi_deficit(geom, x1);
    const double dg1 = gauss_deficit_1(geom, x1);
    const double comb = dg1 - n0 * dc[0] + 2.0 * m0 * dc[1];
    return dc.squaredNorm() + comb * comb;
  });
  return out;
}

CodazziIResult codazzi_i(const RibbonGeometry& geom, const IsotropicModuli& m,
                         const SmoothField1D& alpha, const SmoothField1D& beta,
                         const QuadratureOptions& opt) {
  return codazzi_i(geom, LimitForms(m), alpha, beta, opt);
}

}  // namespace ribbonlab
