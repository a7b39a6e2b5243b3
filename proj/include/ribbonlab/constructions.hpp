#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <optional>
#include <vector>

#include "ribbonlab/euclidean_ribbon.hpp"
#include "ribbonlab/fields.hpp"
#include "ribbonlab/frame_path.hpp"
#include "ribbonlab/geometry.hpp"
#include "ribbonlab/limit_energies.hpp"
#include "ribbonlab/quadratic_forms.hpp"

namespace ribbonlab {

// Darboux frame along a curve with geodesic curvature kappa, normal
// curvature mu and relative torsion tau: r' = r K(kappa, mu, tau).
FramePath darboux_frame(const SmoothField1D& kappa, const SmoothField1D& mu,
                        const SmoothField1D& tau, double length,
                        const Eigen::Matrix3d& initial = Eigen::Matrix3d::Identity(),
                        int samples = 2048);

// Closed-form configuration on the rescaled domain U = (0,L) x (-1/2,1/2)^2
// with parameters (t, w); value and scaled gradient (d1 | w^-1 d2 | t^-1 d3).
struct AnalyticConfig3 {
  double t = 0, w = 0;
  std::function<Eigen::Vector3d(const Eigen::Vector3d&)> value;
  std::function<Eigen::Matrix3d(const Eigen::Vector3d&)> grad_t;
};

// The rescaled Euclidean ribbon itself, u = Psi_t.
AnalyticConfig3 psi_config(const EuclideanRibbon& ribbon);

// Recovery sequence for the narrow Gauss regime (epsilon = w^2): backbone
// Psi_t bent by the rotation path of the midline state, plus the corrector
// profiles realizing the relaxed forms.
AnalyticConfig3 recovery_narrow_gauss(const EuclideanRibbon& ribbon, const LimitForms& forms,
                                      const MidlineState& state, double t, double w);

// Recovery sequence for the narrow Codazzi regime (epsilon = w t); requires
// deltaG == 0. X22 is extracted from the constructed Psi unless supplied.
AnalyticConfig3 recovery_narrow_codazzi(const EuclideanRibbon& ribbon, const LimitForms& forms,
                                        const MidlineState& state, double t, double w,
                                        const std::optional<SmoothField1D>& x22_override =
                                            std::nullopt);

// Immersed surface over a strip in physical coordinates (z1, z2).
struct SurfaceImmersion {
  double width = 0;
  double length = 0;
  std::function<Eigen::Vector3d(double, double)> value;
  std::function<Eigen::Matrix<double, 3, 2>(double, double)> jacobian;
  // Second derivatives (d11, d12, d22).
  std::function<std::array<Eigen::Vector3d, 3>(double, double)> second;

  Eigen::Vector3d normal(double z1, double z2) const;
  Eigen::Matrix2d first_form(double z1, double z2) const;
  Eigen::Matrix2d second_form(double z1, double z2) const;
};

// Ruled isometric immersion of the flat strip whose midline second form is
// A_w = II0 + w [[alpha, beta], [beta, gamma_w]] with det A_w = 0. Requires
// det II0 == 0 and II0_11 bounded away from zero.
struct RuledIsometry {
  SurfaceImmersion surface;
  // A_w along the midline.
  std::function<Eigen::Matrix2d(double)> a_w;
  // Frame r_w and planar ruling data, exposed for diagnostics.
  std::function<Eigen::Matrix3d(double)> frame;
};
RuledIsometry ruled_isometry(const RibbonGeometry& geom, const SmoothField1D& alpha,
                             const SmoothField1D& beta, double w);

// Moving-frame integration of prescribed fundamental forms on a rectangle
// [0,L1] x [-L2/2, L2/2]. The path-dependence residual (x1-then-x2 versus
// x2-then-x1 integration) vanishes iff (a, II) satisfy Gauss-Codazzi.
struct FrameSurface {
  int n1 = 0, n2 = 0;
  double l1 = 0, l2 = 0;
  std::vector<Eigen::Vector3d> positions;      // row-major (i*n2 + j)
  std::vector<Eigen::Matrix3d> frames;         // sheet integrated x1 then x2
  Eigen::MatrixXd residual;                    // ||F_a - F_b|| per node
  double residual_max = 0;
  SurfaceImmersion immersion;                  // interpolated, sheet A

  const Eigen::Vector3d& position(int i, int j) const { return positions[i * n2 + j]; }
  const Eigen::Matrix3d& frame(int i, int j) const { return frames[i * n2 + j]; }
};
FrameSurface surface_from_forms(const SymField2x2& a, const SymField2x2& ii, double l1, double l2,
                                const Eigen::Vector3d& base = Eigen::Vector3d::Zero(),
                                int n1 = 129, int n2 = 129);

// Rescaled Gauss-Codazzi residuals of a second-form field on S: the Gauss
// part det II and the two Codazzi residuals with their (1 - kappa w x2)
// weights. Sampled on a tensor grid.
struct GcResidual {
  int n1 = 0, n2 = 0;
  Eigen::MatrixXd gauss;      // det II_field
  Eigen::MatrixXd codazzi1;
  Eigen::MatrixXd codazzi2;
  double gauss_max = 0, codazzi_max = 0;
};
GcResidual gc_residual(const RibbonGeometry& geom, double w, const StripField2x2& ii_field,
                       int n1 = 65, int n2 = 33);

// Second fundamental form of an immersion in rescaled strip coordinates,
// II^w_f(x1, x2) = II_f(x1, w x2), with finite-difference partials.
StripField2x2 extract_rescaled_second_form(const SurfaceImmersion& f, double w);

// Closed-form ansatz second-form fields for the geometries with II0_11 = 0.
enum class AnsatzKind { D, B };
struct AnsatzResult {
  StripField2x2 field;
  double plate_energy_value = 0;
  double predicted_order = 0;  // kappa^(2/3) n^2 w^(2/3) for (d); w for (b)
};
AnsatzResult ansatz_field(const RibbonGeometry& geom, AnsatzKind kind, double w,
                          const IsotropicModuli& moduli,
                          std::optional<double> delta = std::nullopt,
                          const QuadratureOptions& opt = {});

}  // namespace ribbonlab
