#pragma once

#include <functional>
#include <vector>

namespace ribbonlab {

// Composite Gauss-Legendre rule: k-point Gauss on each of n equal panels.
struct PanelRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// 5-point Gauss-Legendre abscissae/weights on [-1,1].
inline const double* gauss5_nodes() {
  static const double x[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                              0.5384693101056831, 0.9061798459386640};
  return x;
}
inline const double* gauss5_weights() {
  static const double w[5] = {0.2369268850561891, 0.4786286704993665,
                              0.5688888888888889, 0.4786286704993665,
                              0.2369268850561891};
  return w;
}

// 2-point Gauss-Legendre on [-1,1] (per-cell rule for trilinear elements).
inline const double* gauss2_nodes() {
  static const double x[2] = {-0.5773502691896258, 0.5773502691896258};
  return x;
}

inline PanelRule make_panel_rule(double a, double b, int panels, int points_per_panel = 5) {
  PanelRule rule;
  rule.nodes.reserve(panels * points_per_panel);
  rule.weights.reserve(panels * points_per_panel);
  const double h = (b - a) / panels;
  const double* xs = gauss5_nodes();
  const double* ws = gauss5_weights();
  for (int p = 0; p < panels; ++p) {
    const double mid = a + (p + 0.5) * h;
    for (int q = 0; q < points_per_panel; ++q) {
      rule.nodes.push_back(mid + 0.5 * h * xs[q]);
      rule.weights.push_back(0.5 * h * ws[q]);
    }
  }
  return rule;
}

inline double integrate(const PanelRule& rule, const std::function<double(double)>& f) {
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(rule.nodes[i]);
  return acc;
}

// Average of f over [a,b]: composite Gauss divided by the length.
inline double average(double a, double b, int panels, const std::function<double(double)>& f) {
  return integrate(make_panel_rule(a, b, panels), f) / (b - a);
}

}  // namespace ribbonlab
