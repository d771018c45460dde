#pragma once

#include <vector>

namespace hjmcal {

// Monotonicity-preserving piecewise cubic Hermite interpolant (Fritsch-Carlson
// derivative rule). On each knot interval the value stays within the range of
// the two endpoint values, so monotone data produce a monotone interpolant and
// positive data stay positive. Evaluation outside the knot span is clamped
// flat to the boundary values.
class Pchip {
 public:
  Pchip() : x_{0.0}, y_{1.0}, d_{0.0} {}
  explicit Pchip(double constant) : x_{0.0}, y_{constant}, d_{0.0} {}
  Pchip(std::vector<double> x, std::vector<double> y);

  double operator()(double t) const;
  double derivative(double t) const;

  const std::vector<double>& knots() const { return x_; }
  const std::vector<double>& values() const { return y_; }
  const std::vector<double>& slopes() const { return d_; }

 private:
  std::vector<double> x_, y_, d_;
};

}  // namespace hjmcal
