#pragma once

#include <functional>
#include <vector>

namespace hjmcal {

// Gauss-Legendre rule on [-1, 1]; nodes ascending, weights positive.
struct GlRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

// Cached rule of order n (n >= 1); thread-safe.
const GlRule& gl_rule(int n);

template <class F>
double gl_integrate(F&& f, double a, double b, int n) {
  const GlRule& r = gl_rule(n);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double s = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) s += r.weights[i] * f(mid + half * r.nodes[i]);
  return s * half;
}

// Adaptive panel-bisection integration with an embedded GL7/GL15 error estimate.
// abs_tol is an absolute tolerance on the whole interval; throws
// QuadratureNoConvergence past max_depth.
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth = 48);

}  // namespace hjmcal
