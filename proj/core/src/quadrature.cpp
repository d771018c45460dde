#include "hjmcal/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include "hjmcal/errors.hpp"

namespace hjmcal {
namespace {

GlRule make_rule(int n) {
  GlRule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int m = (n + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-like initial guess, then Newton on P_n.
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  return r;
}

}  // namespace

const GlRule& gl_rule(int n) {
  static std::mutex mu;
  static std::map<int, GlRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_rule(n)).first;
  return it->second;
}

namespace {

double adapt(const std::function<double(double)>& f, double a, double b, double coarse,
             double tol, int depth, int max_depth) {
  const double mid = 0.5 * (a + b);
  const double left = gl_integrate(f, a, mid, 15);
  const double right = gl_integrate(f, mid, b, 15);
  const double fine = left + right;
  if (std::abs(fine - coarse) <= tol || depth >= max_depth) {
    if (depth >= max_depth && std::abs(fine - coarse) > tol * 16)
      throw QuadratureNoConvergence("adaptive quadrature stalled on [" + std::to_string(a) +
                                    ", " + std::to_string(b) + "]");
    return fine;
  }
  return adapt(f, a, mid, left, tol * 0.5, depth + 1, max_depth) +
         adapt(f, mid, b, right, tol * 0.5, depth + 1, max_depth);
}

}  // namespace

double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double abs_tol, int max_depth) {
  if (a == b) return 0.0;
  return adapt(f, a, b, gl_integrate(f, a, b, 15), abs_tol, 0, max_depth);
}

}  // namespace hjmcal
