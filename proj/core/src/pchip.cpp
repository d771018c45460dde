#include "hjmcal/pchip.hpp"

#include <algorithm>
#include <cmath>

#include "hjmcal/errors.hpp"

namespace hjmcal {

namespace {

double sign(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

// One-sided three-point end-slope with the shape-preserving clamps.
double edge_slope(double h0, double h1, double m0, double m1) {
  double d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
  if (sign(d) != sign(m0)) return 0.0;
  if (sign(m0) != sign(m1) && std::abs(d) > 3.0 * std::abs(m0)) return 3.0 * m0;
  return d;
}

}  // namespace

Pchip::Pchip(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n == 0 || y_.size() != x_.size()) throw BadConfig("pchip: need matching nonempty knots");
  for (int i = 1; i < n; ++i)
    if (!(x_[i] > x_[i - 1])) throw BadConfig("pchip: knots must be strictly increasing");
  d_.assign(static_cast<size_t>(n), 0.0);
  if (n == 1) return;
  if (n == 2) {
    d_[0] = d_[1] = (y_[1] - y_[0]) / (x_[1] - x_[0]);
    return;
  }
  std::vector<double> h(static_cast<size_t>(n - 1)), m(static_cast<size_t>(n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    h[static_cast<size_t>(i)] = x_[i + 1] - x_[i];
    m[static_cast<size_t>(i)] = (y_[i + 1] - y_[i]) / h[static_cast<size_t>(i)];
  }
  for (int i = 1; i + 1 < n; ++i) {
    const double mk0 = m[static_cast<size_t>(i - 1)], mk1 = m[static_cast<size_t>(i)];
    if (mk0 * mk1 <= 0.0) {
      d_[static_cast<size_t>(i)] = 0.0;
    } else {
      const double hk0 = h[static_cast<size_t>(i - 1)], hk1 = h[static_cast<size_t>(i)];
      const double w1 = 2.0 * hk1 + hk0;
      const double w2 = hk1 + 2.0 * hk0;
      d_[static_cast<size_t>(i)] = (w1 + w2) / (w1 / mk0 + w2 / mk1);
    }
  }
  d_[0] = edge_slope(h[0], h[1], m[0], m[1]);
  d_[static_cast<size_t>(n - 1)] =
      edge_slope(h[static_cast<size_t>(n - 2)], h[static_cast<size_t>(n - 3)],
                 m[static_cast<size_t>(n - 2)], m[static_cast<size_t>(n - 3)]);
}

double Pchip::operator()(double t) const {
  const int n = static_cast<int>(x_.size());
  if (n == 1 || t <= x_.front()) return y_.front();
  if (t >= x_.back()) return y_.back();
  const int i =
      static_cast<int>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s, s3 = s2 * s;
  return y_[i] * (2.0 * s3 - 3.0 * s2 + 1.0) + h * d_[i] * (s3 - 2.0 * s2 + s) +
         y_[i + 1] * (-2.0 * s3 + 3.0 * s2) + h * d_[i + 1] * (s3 - s2);
}

double Pchip::derivative(double t) const {
  const int n = static_cast<int>(x_.size());
  if (n == 1 || t <= x_.front() || t >= x_.back()) return 0.0;
  const int i =
      static_cast<int>(std::upper_bound(x_.begin(), x_.end(), t) - x_.begin()) - 1;
  const double h = x_[i + 1] - x_[i];
  const double s = (t - x_[i]) / h;
  const double s2 = s * s;
  return (y_[i] * (6.0 * s2 - 6.0 * s) + h * d_[i] * (3.0 * s2 - 4.0 * s + 1.0) +
          y_[i + 1] * (-6.0 * s2 + 6.0 * s) + h * d_[i + 1] * (3.0 * s2 - 2.0 * s)) /
         h;
}

}  // namespace hjmcal
