#include "hjmcal/neldermead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace hjmcal {

NelderMeadResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& f,
                             const Eigen::VectorXd& x0, const NelderMeadOptions& opt) {
  const int n = static_cast<int>(x0.size());
  // Dimension-adaptive coefficients; for n <= 2 these reduce to the classic values.
  const double alpha = 1.0;
  const double beta = 1.0 + 2.0 / n;
  const double gamma = 0.75 - 1.0 / (2.0 * n);
  const double delta = 1.0 - 1.0 / n;

  std::vector<Eigen::VectorXd> xs(n + 1, x0);
  for (int i = 0; i < n; ++i) {
    double step = opt.initial_step * std::max(1.0, std::abs(x0[i]));
    xs[i + 1][i] += step;
  }
  std::vector<double> fs(n + 1);
  for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);

  std::vector<int> order(n + 1);
  auto sort_simplex = [&] {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
  };

  NelderMeadResult res;
  int it = 0;
  for (; it < opt.max_iter; ++it) {
    sort_simplex();
    double diam = 0.0;
    for (int i = 1; i <= n; ++i)
      diam = std::max(diam, (xs[order[i]] - xs[order[0]]).norm());
    if (diam < opt.tol_diameter) {
      res.converged = true;
      break;
    }

    const int best = order[0], worst = order[n], second_worst = order[n - 1];
    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) centroid += xs[order[i]];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + alpha * (centroid - xs[worst]);
    const double fr = f(xr);
    if (fr < fs[best]) {
      const Eigen::VectorXd xe = centroid + beta * (xr - centroid);
      const double fe = f(xe);
      if (fe < fr) {
        xs[worst] = xe;
        fs[worst] = fe;
      } else {
        xs[worst] = xr;
        fs[worst] = fr;
      }
    } else if (fr < fs[second_worst]) {
      xs[worst] = xr;
      fs[worst] = fr;
    } else {
      const bool outside = fr < fs[worst];
      const double sign = outside ? 1.0 : -1.0;
      const Eigen::VectorXd xc = centroid + (sign * gamma) * (xr - centroid);
      const double fc = f(xc);
      if ((outside && fc <= fr) || (!outside && fc < fs[worst])) {
        xs[worst] = xc;
        fs[worst] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          const int idx = order[i];
          xs[idx] = xs[best] + delta * (xs[idx] - xs[best]);
          fs[idx] = f(xs[idx]);
        }
      }
    }
  }
  sort_simplex();
  res.x = xs[order[0]];
  res.f = fs[order[0]];
  res.iterations = it;
  return res;
}

}  // namespace hjmcal
