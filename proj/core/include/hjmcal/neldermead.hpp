#pragma once

#include <Eigen/Dense>
#include <functional>

namespace hjmcal {

struct NelderMeadOptions {
  int max_iter = 5000;
  // Convergence when the simplex diameter (max pairwise vertex distance) drops below this.
  double tol_diameter = 1e-6;
  double initial_step = 0.5;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Derivative-free simplex search with dimension-adaptive expansion/contraction
// coefficients. Deterministic: ties in vertex ordering break by insertion order.
NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const NelderMeadOptions& opt = {});

}  // namespace hjmcal
