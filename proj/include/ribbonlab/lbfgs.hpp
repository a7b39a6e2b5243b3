#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace ribbonlab {

struct MinimizeOptions {
  int max_iterations = 2000;
  double gtol = 1e-9;  // infinity-norm gradient threshold
  int memory = 12;
  int max_backtracks = 40;
};

struct MinimizeResult {
  Eigen::VectorXd x;
  double energy = 0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;  // accepted energies, monotone
};

// Limited-memory quasi-Newton descent with Armijo backtracking.
// The objective may return +inf to reject infeasible trial points.
MinimizeResult minimize(
    const std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>& objective,
    const Eigen::VectorXd& init, const MinimizeOptions& opt = {});

}  // namespace ribbonlab
