#include "ribbonlab/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace ribbonlab {

MinimizeResult minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& objective,
    const Eigen::VectorXd& init, const MinimizeOptions& opt) {
  MinimizeResult out;
  Eigen::VectorXd x = init;
  Eigen::VectorXd g(x.size());
  double f = objective(x, &g);
  out.trace.push_back(f);

  std::deque<Eigen::VectorXd> s_hist, y_hist;
  std::deque<double> rho_hist;
  double h0 = 1.0;

  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (g.lpNorm<Eigen::Infinity>() <= opt.gtol) {
      out.converged = true;
      break;
    }
    // Two-loop recursion.
    Eigen::VectorXd q = g;
    std::vector<double> alphas(s_hist.size());
    for (int i = static_cast<int>(s_hist.size()) - 1; i >= 0; --i) {
      alphas[i] = rho_hist[i] * s_hist[i].dot(q);
      q -= alphas[i] * y_hist[i];
    }
    q *= h0;
    for (std::size_t i = 0; i < s_hist.size(); ++i) {
      const double beta = rho_hist[i] * y_hist[i].dot(q);
      q += (alphas[i] - beta) * s_hist[i];
    }
    Eigen::VectorXd dir = -q;
    double slope = g.dot(dir);
    if (!(slope < 0)) {  // fall back to steepest descent
      dir = -g;
      slope = -g.squaredNorm();
      s_hist.clear();
      y_hist.clear();
      rho_hist.clear();
      h0 = 1.0 / std::max(1e-12, g.lpNorm<Eigen::Infinity>());
    }

    double step = 1.0;
    bool accepted = false;
    Eigen::VectorXd xn, gn(x.size());
    double fn = f;
    for (int bt = 0; bt < opt.max_backtracks; ++bt) {
      xn = x + step * dir;
      fn = objective(xn, &gn);
      if (std::isfinite(fn) && fn <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      // quadratic interpolation of the step, safeguarded into [0.1, 0.5]
      double next = 0.5 * step;
      if (std::isfinite(fn)) {
        const double denom = 2.0 * (fn - f - step * slope);
        if (denom > 0) next = std::min(0.5 * step, std::max(0.1 * step,
                                                            -slope * step * step / denom));
      }
      step = next;
    }
    if (!accepted) break;  // line-search failure: return best iterate

    // Expand while the model still predicts progress (near-exact line search
    // on quadratics, which keeps the two-loop directions conjugate).
    for (int ex = 0; ex < 12; ++ex) {
      if (gn.dot(dir) >= 0.5 * slope) break;  // curvature satisfied
      const double trial = 2.0 * step;
      Eigen::VectorXd xt = x + trial * dir;
      Eigen::VectorXd gt(x.size());
      const double ft = objective(xt, &gt);
      if (!std::isfinite(ft) || ft > f + 1e-4 * trial * slope || ft > fn) break;
      step = trial;
      xn = xt;
      fn = ft;
      gn = gt;
    }

    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double ys = y.dot(s);
    if (ys > 1e-12 * y.norm() * s.norm()) {
      s_hist.push_back(s);
      y_hist.push_back(y);
      rho_hist.push_back(1.0 / ys);
      if (static_cast<int>(s_hist.size()) > opt.memory) {
        s_hist.pop_front();
        y_hist.pop_front();
        rho_hist.pop_front();
      }
      h0 = ys / y.squaredNorm();
    }
    x = xn;
    g = gn;
    f = fn;
    out.trace.push_back(f);
  }
  out.x = x;
  out.energy = f;
  out.iterations = it;
  return out;
}

}  // namespace ribbonlab
