#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <vector>

#include "ribbonlab/constructions.hpp"
#include "ribbonlab/euclidean_ribbon.hpp"
#include "ribbonlab/geometry.hpp"
#include "ribbonlab/lbfgs.hpp"
#include "ribbonlab/quadratic_forms.hpp"

namespace ribbonlab {

// Node grid on the rescaled domain U = (0,L) x (-1/2,1/2)^2; counts are
// cells per axis.
struct Grid3 {
  int n1 = 8, n2 = 4, n3 = 3;
  double length = 1.0;

  int nodes1() const { return n1 + 1; }
  int nodes2() const { return n2 + 1; }
  int nodes3() const { return n3 + 1; }
  int node_count() const { return nodes1() * nodes2() * nodes3(); }
  int node_index(int i, int j, int k) const { return (i * nodes2() + j) * nodes3() + k; }
  double h1() const { return length / n1; }
  double h2() const { return 1.0 / n2; }
  double h3() const { return 1.0 / n3; }
  Eigen::Vector3d node(int i, int j, int k) const {
    return {i * h1(), -0.5 + j * h2(), -0.5 + k * h3()};
  }
  void validate() const;
};

// Nodal deformation on a Grid3.
struct Config3 {
  Grid3 grid;
  Eigen::Matrix3Xd nodes;  // 3 x node_count
};

// 3D rescaled elastic energy with trilinear elements and 2x2x2 Gauss
// quadrature per cell. Geometry factors are cached at construction;
// assembly runs in `workers` deterministic chunks.
class Energy3D {
 public:
  Energy3D(const EuclideanRibbon& ribbon, const IsotropicModuli& moduli, const Grid3& grid,
           int workers = 1);

  double energy(const Config3& u, Eigen::Matrix3Xd* grad = nullptr) const;
  const Grid3& grid() const { return grid_; }
  int workers() const { return workers_; }

  Config3 sample_psi() const;  // nodal sampling of Psi_t

 private:
  Grid3 grid_;
  IsotropicModuli moduli_;
  double t_ = 0, w_ = 0;
  int workers_ = 1;
  struct QuadPoint {
    Eigen::Matrix3d bfactor;          // (grad_t Psi_t)^-1 gtilde^-1/2
    double weight;                    // quadrature weight (already /|U|)
    int cell_nodes[8];                // node indices
    Eigen::Matrix<double, 3, 8> dn;   // scaled shape gradients
  };
  std::vector<QuadPoint> qps_;
  std::shared_ptr<EuclideanRibbon> ribbon_;
};

// Average rescaled 3D energy of a closed-form configuration by composite
// Gauss quadrature.
double energy3d_analytic(const EuclideanRibbon& ribbon, const IsotropicModuli& moduli,
                         const AnalyticConfig3& cfg, int panels1 = 32, int panels2 = 8,
                         int panels3 = 4);

// --- Reduced (Kirchhoff) shell model on the physical strip S_w ---

struct SurfaceGrid {
  int n1 = 32, n2 = 8;  // cells
  double length = 1.0, width = 0.1;

  int nodes1() const { return n1 + 1; }
  int nodes2() const { return n2 + 1; }
  int node_count() const { return nodes1() * nodes2(); }
  int node_index(int i, int j) const { return i * nodes2() + j; }
  double h1() const { return length / n1; }
  double h2() const { return width / n2; }
  Eigen::Vector2d node(int i, int j) const { return {i * h1(), -0.5 * width + j * h2()}; }
};

struct SurfaceConfig {
  SurfaceGrid grid;
  Eigen::Matrix3Xd nodes;  // 3 x node_count
};

// Discrete fundamental forms: first forms and normals at cell centers
// (4-point central differences), second forms at interior nodes by
// differencing the cell-center normals.
struct DiscreteForms {
  std::vector<Eigen::Matrix2d> first;    // n1 * n2, cell order i*n2+j
  std::vector<Eigen::Vector3d> normals;  // same layout
  std::vector<Eigen::Matrix2d> second;   // (n1-1)*(n2-1), interior node order
  double min_cross = 0;                  // min |d1 f x d2 f| over cells
};
DiscreteForms fundamental_forms(const SurfaceConfig& f);

struct ReducedWeights {
  double stretch = 1.0;
  double bend = 1.0;  // multiplies t^2
};

// avg |a_f - a|^2 dVol_a + t^2 avg |II_f - II|^2 dVol_a with discrete forms.
class ReducedShell {
 public:
  ReducedShell(const RibbonGeometry& geom, double t, double w, const SurfaceGrid& grid,
               const ReducedWeights& weights = {});

  // Throws on a degenerate cell when `strict`; returns +inf otherwise.
  double energy(const SurfaceConfig& f, Eigen::Matrix3Xd* grad = nullptr,
                bool strict = true) const;
  const SurfaceGrid& grid() const { return grid_; }
  double thickness() const { return t_; }

  // Second form along the row of interior nodes nearest the midline.
  std::vector<Eigen::Matrix2d> midline_second_form(const SurfaceConfig& f) const;

 private:
  SurfaceGrid grid_;
  double t_ = 0, w_ = 0;
  ReducedWeights weights_;
  std::vector<Eigen::Matrix2d> a_ref_, ii_ref_;  // cell centers / interior nodes
  std::vector<double> sqrtdet_cell_, sqrtdet_node_;
  double vol_cells_ = 0, vol_nodes_ = 0;
};

// Nodal sampling.
Config3 sample_map(const AnalyticConfig3& cfg, const Grid3& grid);
SurfaceConfig sample_map(const std::function<Eigen::Vector3d(double, double)>& f,
                         const SurfaceGrid& grid);
SurfaceConfig sample_map(const SurfaceImmersion& f, const SurfaceGrid& grid);

// Vectorize nodal positions for the optimizer.
Eigen::VectorXd flatten(const Eigen::Matrix3Xd& nodes);
Eigen::Matrix3Xd unflatten(const Eigen::VectorXd& x, int count);

}  // namespace ribbonlab
