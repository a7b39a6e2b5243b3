#include "ribbonlab/quadratic_forms.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace ribbonlab {

void validate(const IsotropicModuli& m) {
  if (!(m.mu > 0.0) || !(2.0 * m.mu + m.lambda > 0.0))
    throw std::invalid_argument("IsotropicModuli: need mu > 0 and 2 mu + lambda > 0");
}

double density_w(const IsotropicModuli& m, const Eigen::Matrix3d& F) {
  const Eigen::Matrix3d e = F.transpose() * F - Eigen::Matrix3d::Identity();
  return 0.5 * m.mu * e.squaredNorm() + 0.25 * m.lambda * e.trace() * e.trace();
}

Eigen::Matrix3d density_w_derivative(const IsotropicModuli& m, const Eigen::Matrix3d& F) {
  const Eigen::Matrix3d e = F.transpose() * F - Eigen::Matrix3d::Identity();
  return 2.0 * m.mu * F * e + m.lambda * e.trace() * F;
}

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

Eigen::Matrix<double, 6, 1> sym3_coords(const Eigen::Matrix3d& b) {
  const Eigen::Matrix3d s = 0.5 * (b + b.transpose());
  Eigen::Matrix<double, 6, 1> v;
  v << s(0, 0), s(1, 1), s(2, 2), kSqrt2 * s(0, 1), kSqrt2 * s(0, 2), kSqrt2 * s(1, 2);
  return v;
}

Eigen::Matrix3d sym3_from_coords(const Eigen::Matrix<double, 6, 1>& v) {
  Eigen::Matrix3d s;
  s << v[0], v[3] / kSqrt2, v[4] / kSqrt2, v[3] / kSqrt2, v[1], v[5] / kSqrt2, v[4] / kSqrt2,
      v[5] / kSqrt2, v[2];
  return s;
}

Eigen::Vector3d sym2_coords(const Eigen::Matrix2d& a) {
  const Eigen::Matrix2d s = 0.5 * (a + a.transpose());
  return Eigen::Vector3d(s(0, 0), s(1, 1), kSqrt2 * s(0, 1));
}

Eigen::Matrix2d sym2_from_coords(const Eigen::Vector3d& v) {
  Eigen::Matrix2d s;
  s << v[0], v[2] / kSqrt2, v[2] / kSqrt2, v[1];
  return s;
}

QuadForm QuadForm::sym3(const Eigen::Matrix<double, 6, 6>& coeffs) {
  QuadForm q;
  q.space_ = Space::Sym3;
  q.coeffs_ = 0.5 * (coeffs + coeffs.transpose());
  return q;
}

QuadForm QuadForm::sym2(const Eigen::Matrix3d& coeffs) {
  QuadForm q;
  q.space_ = Space::Sym2;
  q.coeffs_ = 0.5 * (coeffs + coeffs.transpose());
  return q;
}

double QuadForm::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(coeffs_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

double QuadForm::operator()(const Eigen::Matrix3d& b) const {
  if (space_ != Space::Sym3) throw std::logic_error("QuadForm: 3x3 argument on Sym2 form");
  const Eigen::Matrix<double, 6, 1> v = sym3_coords(b);
  return v.dot(coeffs_ * v);
}

double QuadForm::operator()(const Eigen::Matrix2d& a) const {
  if (space_ != Space::Sym2) throw std::logic_error("QuadForm: 2x2 argument on Sym3 form");
  const Eigen::Vector3d v = sym2_coords(a);
  return v.dot(coeffs_ * v);
}

QuadForm q3_at_identity(const IsotropicModuli& m) {
  validate(m);
  Eigen::Matrix<double, 6, 6> c = 2.0 * m.mu * Eigen::Matrix<double, 6, 6>::Identity();
  Eigen::Matrix<double, 6, 1> tr;
  tr << 1, 1, 1, 0, 0, 0;
  c += m.lambda * tr * tr.transpose();
  return QuadForm::sym3(c);
}

QuadForm conjugate_q3(const QuadForm& q3, const Eigen::Matrix3d& r) {
  if (q3.space() != QuadForm::Space::Sym3)
    throw std::logic_error("conjugate_q3: expects a Sym3 form");
  // Induced linear map on sym coordinates: S -> R S R^T.
  Eigen::Matrix<double, 6, 6> map;
  for (int j = 0; j < 6; ++j) {
    Eigen::Matrix<double, 6, 1> e = Eigen::Matrix<double, 6, 1>::Zero();
    e[j] = 1.0;
    const Eigen::Matrix3d s = sym3_from_coords(e);
    map.col(j) = sym3_coords(r * s * r.transpose());
  }
  return QuadForm::sym3(map.transpose() * q3.coeffs() * map);
}

namespace {

// Minimize v^T C v over the free coordinates given the constrained ones.
// Returns the reduced coefficient matrix on the constrained block and the
// linear completion free = W * constrained. Uses a pseudoinverse so that
// semidefinite free blocks (null directions that do not affect the value)
// are handled.
void schur_reduce(const Eigen::MatrixXd& c, const std::vector<int>& con,
                  const std::vector<int>& fre, Eigen::MatrixXd* reduced, Eigen::MatrixXd* compl_map) {
  const int nc = static_cast<int>(con.size());
  const int nf = static_cast<int>(fre.size());
  Eigen::MatrixXd ccc(nc, nc), ccf(nc, nf), cff(nf, nf);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nc; ++j) ccc(i, j) = c(con[i], con[j]);
  for (int i = 0; i < nc; ++i)
    for (int j = 0; j < nf; ++j) ccf(i, j) = c(con[i], fre[j]);
  for (int i = 0; i < nf; ++i)
    for (int j = 0; j < nf; ++j) cff(i, j) = c(fre[i], fre[j]);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cff);
  const double cutoff = 1e-12 * std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  Eigen::VectorXd inv = es.eigenvalues();
  for (int i = 0; i < nf; ++i) inv[i] = (std::abs(inv[i]) > cutoff) ? 1.0 / inv[i] : 0.0;
  const Eigen::MatrixXd pinv = es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();

  *compl_map = -pinv * ccf.transpose();
  *reduced = ccc + ccf * (*compl_map);
  *reduced = 0.5 * (*reduced + reduced->transpose());
}

}  // namespace

Relaxed2x2 relax_to_2x2(const QuadForm& q3, const std::optional<Eigen::Matrix3d>& frame) {
  const QuadForm q = frame ? conjugate_q3(q3, *frame) : q3;
  // sym3 coordinate order (11, 22, 33, 12, 13, 23): the upper 2x2 minor pins
  // (11, 22, 12); (33, 13, 23) relax.
  const std::vector<int> con = {0, 1, 3};
  const std::vector<int> fre = {2, 4, 5};
  Eigen::MatrixXd reduced, cmap;
  schur_reduce(q.coeffs(), con, fre, &reduced, &cmap);
  Relaxed2x2 out;
  out.q2 = QuadForm::sym2(reduced);
  out.completion_map = cmap;
  return out;
}

Eigen::Matrix3d Relaxed2x2::complete(const Eigen::Matrix2d& a) const {
  const Eigen::Vector3d x = sym2_coords(a);
  const Eigen::Vector3d y = completion_map * x;  // (33, 13, 23) coords
  Eigen::Matrix<double, 6, 1> v;
  v << x[0], x[1], y[0], x[2], y[1], y[2];
  return sym3_from_coords(v);
}

Q2CircResult q2_circ(const QuadForm& q2, double a, double b) {
  if (q2.space() != QuadForm::Space::Sym2) throw std::logic_error("q2_circ: expects a Sym2 form");
  const Eigen::MatrixXd& c = q2.coeffs();
  // coords x = (a, c22, sqrt2 b); minimize the quadratic in c22.
  const double denom = c(1, 1);
  if (denom <= 0) throw std::runtime_error("q2_circ: degenerate 22 channel");
  const double c22 = -(c(1, 0) * a + c(1, 2) * kSqrt2 * b) / denom;
  Eigen::Vector3d x(a, c22, kSqrt2 * b);
  Q2CircResult out;
  out.value = x.dot(c * x);
  out.argmin_a22 = c22;
  return out;
}

Q1Result q1(const QuadForm& q2) {
  if (q2.space() != QuadForm::Space::Sym2) throw std::logic_error("q1: expects a Sym2 form");
  Eigen::MatrixXd reduced, cmap;
  schur_reduce(q2.coeffs(), {0}, {1, 2}, &reduced, &cmap);
  Q1Result out;
  out.value = reduced(0, 0);
  out.argmin_a22 = cmap(0, 0);
  out.argmin_a12 = cmap(1, 0) / kSqrt2;
  return out;
}

Eigen::Matrix3d det_form_sym2() {
  Eigen::Matrix3d d;
  d << 0, 0.5, 0, 0.5, 0, 0, 0, 0, -0.5;
  return d;
}

Eigen::Matrix3d q1_completion(const QuadForm& q3, double s11) {
  if (q3.space() != QuadForm::Space::Sym3)
    throw std::logic_error("q1_completion: expects a Sym3 form");
  Eigen::MatrixXd reduced, cmap;
  schur_reduce(q3.coeffs(), {0}, {1, 2, 3, 4, 5}, &reduced, &cmap);
  Eigen::Matrix<double, 6, 1> v;
  v[0] = s11;
  for (int i = 0; i < 5; ++i) v[i + 1] = cmap(i, 0) * s11;
  return sym3_from_coords(v);
}

std::pair<double, double> alpha_pm(const QuadForm& q2, double tol) {
  if (q2.space() != QuadForm::Space::Sym2) throw std::logic_error("alpha_pm: expects a Sym2 form");
  if (q2.min_eigenvalue() <= 0)
    throw std::domain_error("alpha_pm: q2 must be positive definite on sym 2x2");
  const Eigen::Matrix3d c = q2.coeffs();
  const Eigen::Matrix3d d = det_form_sym2();
  auto min_eig = [&](double alpha, double sign) {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(c + sign * alpha * d,
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
  };
  auto solve = [&](double sign) {
    double lo = 0.0, hi = 1.0;
    while (min_eig(hi, sign) > 0) {
      hi *= 2.0;
      if (hi > 1e12) throw std::runtime_error("alpha_pm: no finite supremum found");
    }
    while (hi - lo > tol) {
      const double mid = 0.5 * (lo + hi);
      (min_eig(mid, sign) >= 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  return {solve(+1.0), solve(-1.0)};
}

QuadForm plate_form(const EuclideanRibbon& ribbon, const Eigen::Vector2d& xprime,
                    const QuadForm& q3) {
  const double z1 = xprime[0];
  const double z2 = ribbon.width() * xprime[1];
  Eigen::Matrix3d tframe;
  tframe.leftCols<2>() = ribbon.dphi(z1, z2);
  tframe.col(2) = ribbon.normal(z1, z2);
  Eigen::FullPivLU<Eigen::Matrix3d> lu(tframe);
  if (!lu.isInvertible()) throw std::domain_error("plate_form: singular tangent frame A0");
  const Eigen::Matrix3d tinv = lu.inverse();

  Eigen::Matrix3d abar = Eigen::Matrix3d::Identity();
  abar.topLeftCorner<2, 2>() = midsurface_metric(ribbon.geometry(), z1, z2);
  const Eigen::Matrix3d f0 = tinv.transpose() * abar * tinv;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(f0);
  if (es.eigenvalues().minCoeff() <= 0.0) throw std::domain_error("plate_form: F0 not positive");
  const Eigen::Matrix3d f0sqrt = es.eigenvectors() *
                                 es.eigenvalues().cwiseSqrt().asDiagonal() *
                                 es.eigenvectors().transpose();
  const Eigen::Matrix3d a0 = f0sqrt * tframe;
  const Eigen::Matrix3d a0inv = a0.inverse();

  // Quadratic form on full 3x3 G (9 coordinates, row-major order) of
  // Q3(A0^-T G A0^-1); the conjugation does not commute with sym, so all
  // nine entries participate.
  Eigen::Matrix<double, 6, 9> lift;
  for (int j = 0; j < 9; ++j) {
    Eigen::Matrix3d g = Eigen::Matrix3d::Zero();
    g(j / 3, j % 3) = 1.0;
    lift.col(j) = sym3_coords(a0inv.transpose() * g * a0inv);
  }
  const Eigen::MatrixXd chat = lift.transpose() * q3.coeffs() * lift;

  // Entries (11,12,21,22) = vec indices (0,1,3,4) are pinned to F.
  const std::vector<int> con = {0, 1, 3, 4};
  const std::vector<int> fre = {2, 5, 6, 7, 8};
  Eigen::MatrixXd reduced, cmap;
  schur_reduce(chat, con, fre, &reduced, &cmap);

  // Compress (F11, F12, F21, F22) to symmetric coordinates.
  Eigen::Matrix<double, 4, 3> embed;
  embed << 1, 0, 0, 0, 0, 1.0 / kSqrt2, 0, 0, 1.0 / kSqrt2, 0, 1, 0;
  const Eigen::Matrix3d csym = embed.transpose() * reduced * embed;
  return QuadForm::sym2(csym);
}

QuadForm plate_form(const EuclideanRibbon& ribbon, const Eigen::Vector2d& xprime,
                    const IsotropicModuli& m) {
  return plate_form(ribbon, xprime, q3_at_identity(m));
}

}  // namespace ribbonlab
