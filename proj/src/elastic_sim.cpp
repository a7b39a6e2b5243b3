#include "ribbonlab/elastic_sim.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "ribbonlab/quadrature.hpp"

namespace ribbonlab {

void Grid3::validate() const {
  if (n1 < 4 || n2 < 2 || n3 < 2)
    throw std::invalid_argument("Grid3: need n1 >= 4, n2 >= 2, n3 >= 2");
  if (length <= 0) throw std::invalid_argument("Grid3: length must be positive");
}

Energy3D::Energy3D(const EuclideanRibbon& ribbon, const IsotropicModuli& moduli,
                   const Grid3& grid, int workers)
    : grid_(grid), moduli_(moduli), t_(ribbon.thickness()), w_(ribbon.width()),
      workers_(std::max(1, workers)), ribbon_(std::make_shared<EuclideanRibbon>(ribbon)) {
  grid_.validate();
  validate(moduli_);
  const double* gx = gauss2_nodes();
  const double h1 = grid_.h1(), h2 = grid_.h2(), h3 = grid_.h3();
  const double wq = h1 * h2 * h3 / 8.0 / grid_.length;  // averaged integral
  qps_.reserve(static_cast<std::size_t>(grid_.n1) * grid_.n2 * grid_.n3 * 8);
  for (int i = 0; i < grid_.n1; ++i)
    for (int j = 0; j < grid_.n2; ++j)
      for (int k = 0; k < grid_.n3; ++k) {
        int nodes[8];
        int a = 0;
        for (int di = 0; di < 2; ++di)
          for (int dj = 0; dj < 2; ++dj)
            for (int dk = 0; dk < 2; ++dk) nodes[a++] = grid_.node_index(i + di, j + dj, k + dk);
        const Eigen::Vector3d lo = grid_.node(i, j, k);
        for (int qi = 0; qi < 2; ++qi)
          for (int qj = 0; qj < 2; ++qj)
            for (int qk = 0; qk < 2; ++qk) {
              QuadPoint qp;
              qp.weight = wq;
              const Eigen::Vector3d xi(gx[qi], gx[qj], gx[qk]);
              const Eigen::Vector3d x(lo[0] + 0.5 * h1 * (1 + xi[0]),
                                      lo[1] + 0.5 * h2 * (1 + xi[1]),
                                      lo[2] + 0.5 * h3 * (1 + xi[2]));
              a = 0;
              for (int di = 0; di < 2; ++di)
                for (int dj = 0; dj < 2; ++dj)
                  for (int dk = 0; dk < 2; ++dk) {
                    qp.cell_nodes[a] = nodes[a];
                    const double s1 = 2 * di - 1, s2 = 2 * dj - 1, s3 = 2 * dk - 1;
                    const double f1 = 1 + s1 * xi[0], f2 = 1 + s2 * xi[1], f3 = 1 + s3 * xi[2];
                    qp.dn(0, a) = 0.125 * s1 * f2 * f3 * (2.0 / h1);
                    qp.dn(1, a) = 0.125 * f1 * s2 * f3 * (2.0 / h2) / w_;
                    qp.dn(2, a) = 0.125 * f1 * f2 * s3 * (2.0 / h3) / t_;
                    ++a;
                  }
              const Eigen::Vector3d z(x[0], w_ * x[1], t_ * x[2]);
              qp.bfactor = ribbon_->strain_factor(z);
              qps_.push_back(qp);
            }
      }
}

double Energy3D::energy(const Config3& u, Eigen::Matrix3Xd* grad) const {
  if (u.nodes.cols() != grid_.node_count())
    throw std::invalid_argument("Energy3D: configuration does not match the grid");
  const int nq = static_cast<int>(qps_.size());
  const int nw = std::min(workers_, nq);
  std::vector<double> partial(nw, 0.0);
  std::vector<Eigen::Matrix3Xd> gpartial;
  if (grad) gpartial.assign(nw, Eigen::Matrix3Xd::Zero(3, u.nodes.cols()));

  auto work = [&](int widx) {
    const int lo = nq * widx / nw, hi = nq * (widx + 1) / nw;
    double acc = 0.0;
    for (int q = lo; q < hi; ++q) {
      const QuadPoint& qp = qps_[q];
      Eigen::Matrix3d gt = Eigen::Matrix3d::Zero();
      for (int a = 0; a < 8; ++a) gt += u.nodes.col(qp.cell_nodes[a]) * qp.dn.col(a).transpose();
      const Eigen::Matrix3d f = gt * qp.bfactor;
      acc += qp.weight * density_w(moduli_, f);
      if (grad) {
        const Eigen::Matrix3d dwdg =
            density_w_derivative(moduli_, f) * qp.bfactor.transpose();
        for (int a = 0; a < 8; ++a)
          gpartial[widx].col(qp.cell_nodes[a]) += qp.weight * (dwdg * qp.dn.col(a));
      }
    }
    partial[widx] = acc;
  };
  if (nw == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (int widx = 0; widx < nw; ++widx) threads.emplace_back(work, widx);
    for (auto& th : threads) th.join();
  }
  double total = 0.0;
  for (int widx = 0; widx < nw; ++widx) total += partial[widx];
  if (grad) {
    grad->setZero(3, u.nodes.cols());
    for (int widx = 0; widx < nw; ++widx) *grad += gpartial[widx];
  }
  return total;
}

Config3 Energy3D::sample_psi() const {
  Config3 cfg;
  cfg.grid = grid_;
  cfg.nodes.resize(3, grid_.node_count());
  for (int i = 0; i <= grid_.n1; ++i)
    for (int j = 0; j <= grid_.n2; ++j)
      for (int k = 0; k <= grid_.n3; ++k) {
        const Eigen::Vector3d x = grid_.node(i, j, k);
        cfg.nodes.col(grid_.node_index(i, j, k)) =
            ribbon_->psi(Eigen::Vector3d(x[0], w_ * x[1], t_ * x[2]));
      }
  return cfg;
}

double energy3d_analytic(const EuclideanRibbon& ribbon, const IsotropicModuli& moduli,
                         const AnalyticConfig3& cfg, int panels1, int panels2, int panels3) {
  const double t = cfg.t, w = cfg.w;
  const double L = ribbon.geometry().length;
  const PanelRule r1 = make_panel_rule(0.0, L, panels1);
  const PanelRule r2 = make_panel_rule(-0.5, 0.5, panels2);
  const PanelRule r3 = make_panel_rule(-0.5, 0.5, panels3);
  double acc = 0.0;
  for (std::size_t i = 0; i < r1.nodes.size(); ++i)
    for (std::size_t j = 0; j < r2.nodes.size(); ++j)
      for (std::size_t k = 0; k < r3.nodes.size(); ++k) {
        const Eigen::Vector3d x(r1.nodes[i], r2.nodes[j], r3.nodes[k]);
        const Eigen::Vector3d z(x[0], w * x[1], t * x[2]);
        const Eigen::Matrix3d f = cfg.grad_t(x) * ribbon.strain_factor(z);
        acc += r1.weights[i] * r2.weights[j] * r3.weights[k] * density_w(moduli, f);
      }
  return acc / L;
}

namespace {

struct CellData {
  Eigen::Vector3d d1, d2, nu;
  double vnorm = 0;
  Eigen::Matrix2d aform;
};

CellData cell_data(const SurfaceConfig& f, int i, int j) {
  const SurfaceGrid& g = f.grid;
  const auto& nd = f.nodes;
  const int i00 = g.node_index(i, j), i01 = g.node_index(i, j + 1);
  const int i10 = g.node_index(i + 1, j), i11 = g.node_index(i + 1, j + 1);
  CellData c;
  c.d1 = (nd.col(i10) + nd.col(i11) - nd.col(i00) - nd.col(i01)) / (2.0 * g.h1());
  c.d2 = (nd.col(i01) + nd.col(i11) - nd.col(i00) - nd.col(i10)) / (2.0 * g.h2());
  const Eigen::Vector3d v = c.d1.cross(c.d2);
  c.vnorm = v.norm();
  c.nu = c.vnorm > 0 ? Eigen::Vector3d(v / c.vnorm) : Eigen::Vector3d::Zero();
  c.aform << c.d1.dot(c.d1), c.d1.dot(c.d2), c.d1.dot(c.d2), c.d2.dot(c.d2);
  return c;
}

}  // namespace

DiscreteForms fundamental_forms(const SurfaceConfig& f) {
  const SurfaceGrid& g = f.grid;
  DiscreteForms out;
  out.first.resize(static_cast<std::size_t>(g.n1) * g.n2);
  out.normals.resize(out.first.size());
  out.min_cross = 1e300;
  std::vector<CellData> cells(out.first.size());
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      CellData c = cell_data(f, i, j);
      cells[i * g.n2 + j] = c;
      out.first[i * g.n2 + j] = c.aform;
      out.normals[i * g.n2 + j] = c.nu;
      out.min_cross = std::min(out.min_cross, c.vnorm);
    }
  out.second.resize(static_cast<std::size_t>(g.n1 - 1) * (g.n2 - 1));
  for (int i = 1; i < g.n1; ++i)
    for (int j = 1; j < g.n2; ++j) {
      const Eigen::Vector3d p1 =
          (f.nodes.col(g.node_index(i + 1, j)) - f.nodes.col(g.node_index(i - 1, j))) /
          (2.0 * g.h1());
      const Eigen::Vector3d p2 =
          (f.nodes.col(g.node_index(i, j + 1)) - f.nodes.col(g.node_index(i, j - 1))) /
          (2.0 * g.h2());
      const Eigen::Vector3d& nmm = cells[(i - 1) * g.n2 + (j - 1)].nu;
      const Eigen::Vector3d& nmp = cells[(i - 1) * g.n2 + j].nu;
      const Eigen::Vector3d& npm = cells[i * g.n2 + (j - 1)].nu;
      const Eigen::Vector3d& npp = cells[i * g.n2 + j].nu;
      const Eigen::Vector3d n1 = (npm + npp - nmm - nmp) / (2.0 * g.h1());
      const Eigen::Vector3d n2 = (nmp + npp - nmm - npm) / (2.0 * g.h2());
      Eigen::Matrix2d ii;
      ii(0, 0) = -p1.dot(n1);
      ii(1, 1) = -p2.dot(n2);
      ii(0, 1) = ii(1, 0) = -0.5 * (p1.dot(n2) + p2.dot(n1));
      out.second[(i - 1) * (g.n2 - 1) + (j - 1)] = ii;
    }
  return out;
}

ReducedShell::ReducedShell(const RibbonGeometry& geom, double t, double w,
                           const SurfaceGrid& grid, const ReducedWeights& weights)
    : grid_(grid), t_(t), w_(w), weights_(weights) {
  if (grid_.n1 < 4 || grid_.n2 < 2) throw std::invalid_argument("ReducedShell: grid too small");
  a_ref_.resize(static_cast<std::size_t>(grid_.n1) * grid_.n2);
  sqrtdet_cell_.resize(a_ref_.size());
  vol_cells_ = 0;
  for (int i = 0; i < grid_.n1; ++i)
    for (int j = 0; j < grid_.n2; ++j) {
      const double z1 = (i + 0.5) * grid_.h1();
      const double z2 = -0.5 * grid_.width + (j + 0.5) * grid_.h2();
      const Eigen::Matrix2d a = midsurface_metric(geom, z1, z2);
      a_ref_[i * grid_.n2 + j] = a;
      sqrtdet_cell_[i * grid_.n2 + j] = std::sqrt(a.determinant());
      vol_cells_ += sqrtdet_cell_[i * grid_.n2 + j];
    }
  ii_ref_.resize(static_cast<std::size_t>(grid_.n1 - 1) * (grid_.n2 - 1));
  sqrtdet_node_.resize(ii_ref_.size());
  vol_nodes_ = 0;
  for (int i = 1; i < grid_.n1; ++i)
    for (int j = 1; j < grid_.n2; ++j) {
      const Eigen::Vector2d z = grid_.node(i, j);
      const Eigen::Matrix2d a = midsurface_metric(geom, z[0], z[1]);
      ii_ref_[(i - 1) * (grid_.n2 - 1) + (j - 1)] = geom.second_form.value(z[0], z[1]);
      sqrtdet_node_[(i - 1) * (grid_.n2 - 1) + (j - 1)] = std::sqrt(a.determinant());
      vol_nodes_ += sqrtdet_node_[(i - 1) * (grid_.n2 - 1) + (j - 1)];
    }
}

double ReducedShell::energy(const SurfaceConfig& f, Eigen::Matrix3Xd* grad, bool strict) const {
  const SurfaceGrid& g = grid_;
  if (f.nodes.cols() != g.node_count())
    throw std::invalid_argument("ReducedShell: configuration does not match the grid");
  const int ncell = g.n1 * g.n2;
  std::vector<CellData> cells(ncell);
  std::vector<Eigen::Vector3d> dd1(grad ? ncell : 0), dd2(grad ? ncell : 0);
  std::vector<Eigen::Vector3d> gnu(grad ? ncell : 0, Eigen::Vector3d::Zero());

  double stretch = 0.0;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) {
      const int c = i * g.n2 + j;
      cells[c] = cell_data(f, i, j);
      if (cells[c].vnorm < 1e-6) {
        if (strict) {
          std::ostringstream msg;
          msg << "reduced_energy: degenerate cell (" << i << "," << j << "), |d1 x d2| = "
              << cells[c].vnorm;
          throw std::runtime_error(msg.str());
        }
        return std::numeric_limits<double>::infinity();
      }
      const Eigen::Matrix2d e = cells[c].aform - a_ref_[c];
      const double sd = sqrtdet_cell_[c];
      stretch += (e(0, 0) * e(0, 0) + 2 * e(0, 1) * e(0, 1) + e(1, 1) * e(1, 1)) * sd;
      if (grad) {
        const double wfac = weights_.stretch * sd / vol_cells_;
        dd1[c] = wfac * (4.0 * e(0, 0) * cells[c].d1 + 4.0 * e(0, 1) * cells[c].d2);
        dd2[c] = wfac * (4.0 * e(1, 1) * cells[c].d2 + 4.0 * e(0, 1) * cells[c].d1);
      }
    }
  stretch /= vol_cells_;

  double bend = 0.0;
  Eigen::Matrix3Xd gbuf;
  if (grad) gbuf = Eigen::Matrix3Xd::Zero(3, f.nodes.cols());
  const double bcoef = weights_.bend * t_ * t_;
  for (int i = 1; i < g.n1; ++i)
    for (int j = 1; j < g.n2; ++j) {
      const int n = (i - 1) * (g.n2 - 1) + (j - 1);
      const int cmm = (i - 1) * g.n2 + (j - 1), cmp = (i - 1) * g.n2 + j;
      const int cpm = i * g.n2 + (j - 1), cpp = i * g.n2 + j;
      const Eigen::Vector3d p1 =
          (f.nodes.col(g.node_index(i + 1, j)) - f.nodes.col(g.node_index(i - 1, j))) /
          (2.0 * g.h1());
      const Eigen::Vector3d p2 =
          (f.nodes.col(g.node_index(i, j + 1)) - f.nodes.col(g.node_index(i, j - 1))) /
          (2.0 * g.h2());
      const Eigen::Vector3d n1 =
          (cells[cpm].nu + cells[cpp].nu - cells[cmm].nu - cells[cmp].nu) / (2.0 * g.h1());
      const Eigen::Vector3d n2 =
          (cells[cmp].nu + cells[cpp].nu - cells[cmm].nu - cells[cpm].nu) / (2.0 * g.h2());
      Eigen::Matrix2d ii;
      ii(0, 0) = -p1.dot(n1);
      ii(1, 1) = -p2.dot(n2);
      ii(0, 1) = ii(1, 0) = -0.5 * (p1.dot(n2) + p2.dot(n1));
      const Eigen::Matrix2d e = ii - ii_ref_[n];
      const double sd = sqrtdet_node_[n];
      bend += (e(0, 0) * e(0, 0) + 2 * e(0, 1) * e(0, 1) + e(1, 1) * e(1, 1)) * sd;
      if (grad) {
        const double wfac = bcoef * sd / vol_nodes_;
        // d bend / d II entries
        const double g11 = 2 * e(0, 0), g12 = 4 * e(0, 1), g22 = 2 * e(1, 1);
        const Eigen::Vector3d dP1 = wfac * (-g11 * n1 - 0.5 * g12 * n2);
        const Eigen::Vector3d dP2 = wfac * (-g22 * n2 - 0.5 * g12 * n1);
        const Eigen::Vector3d dN1 = wfac * (-g11 * p1 - 0.5 * g12 * p2);
        const Eigen::Vector3d dN2 = wfac * (-g22 * p2 - 0.5 * g12 * p1);
        gbuf.col(g.node_index(i + 1, j)) += dP1 / (2.0 * g.h1());
        gbuf.col(g.node_index(i - 1, j)) -= dP1 / (2.0 * g.h1());
        gbuf.col(g.node_index(i, j + 1)) += dP2 / (2.0 * g.h2());
        gbuf.col(g.node_index(i, j - 1)) -= dP2 / (2.0 * g.h2());
        const Eigen::Vector3d a1 = dN1 / (2.0 * g.h1());
        const Eigen::Vector3d a2 = dN2 / (2.0 * g.h2());
        gnu[cpm] += a1 - a2;
        gnu[cpp] += a1 + a2;
        gnu[cmm] += -a1 - a2;
        gnu[cmp] += -a1 + a2;
      }
    }
  bend /= vol_nodes_;

  if (grad) {
    for (int i = 0; i < g.n1; ++i)
      for (int j = 0; j < g.n2; ++j) {
        const int c = i * g.n2 + j;
        // Chain dB/dnu through the normalization into D1, D2.
        const Eigen::Vector3d gproj =
            (gnu[c] - cells[c].nu * cells[c].nu.dot(gnu[c])) / cells[c].vnorm;
        const Eigen::Vector3d t1 = dd1[c] + cells[c].d2.cross(gproj);
        const Eigen::Vector3d t2 = dd2[c] + gproj.cross(cells[c].d1);
        const Eigen::Vector3d s1 = t1 / (2.0 * g.h1());
        const Eigen::Vector3d s2 = t2 / (2.0 * g.h2());
        gbuf.col(g.node_index(i + 1, j)) += s1 - s2;
        gbuf.col(g.node_index(i + 1, j + 1)) += s1 + s2;
        gbuf.col(g.node_index(i, j)) += -s1 - s2;
        gbuf.col(g.node_index(i, j + 1)) += -s1 + s2;
      }
    *grad = gbuf;
  }
  return weights_.stretch * stretch + bcoef * bend;
}

std::vector<Eigen::Matrix2d> ReducedShell::midline_second_form(const SurfaceConfig& f) const {
  const DiscreteForms forms = fundamental_forms(f);
  const int jmid = grid_.n2 / 2;  // interior node row nearest z2 = 0
  std::vector<Eigen::Matrix2d> out;
  for (int i = 1; i < grid_.n1; ++i)
    out.push_back(forms.second[(i - 1) * (grid_.n2 - 1) + (jmid - 1)]);
  return out;
}

Config3 sample_map(const AnalyticConfig3& cfg, const Grid3& grid) {
  Config3 out;
  out.grid = grid;
  out.nodes.resize(3, grid.node_count());
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j <= grid.n2; ++j)
      for (int k = 0; k <= grid.n3; ++k)
        out.nodes.col(grid.node_index(i, j, k)) = cfg.value(grid.node(i, j, k));
  return out;
}

SurfaceConfig sample_map(const std::function<Eigen::Vector3d(double, double)>& f,
                         const SurfaceGrid& grid) {
  SurfaceConfig out;
  out.grid = grid;
  out.nodes.resize(3, grid.node_count());
  for (int i = 0; i <= grid.n1; ++i)
    for (int j = 0; j <= grid.n2; ++j) {
      const Eigen::Vector2d z = grid.node(i, j);
      out.nodes.col(grid.node_index(i, j)) = f(z[0], z[1]);
    }
  return out;
}

SurfaceConfig sample_map(const SurfaceImmersion& f, const SurfaceGrid& grid) {
  return sample_map([&f](double z1, double z2) { return f.value(z1, z2); }, grid);
}

Eigen::VectorXd flatten(const Eigen::Matrix3Xd& nodes) {
  return Eigen::Map<const Eigen::VectorXd>(nodes.data(), nodes.size());
}

Eigen::Matrix3Xd unflatten(const Eigen::VectorXd& x, int count) {
  return Eigen::Map<const Eigen::Matrix3Xd>(x.data(), 3, count);
}

}  // namespace ribbonlab
