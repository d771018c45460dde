#pragma once

#include <vector>

#include "hjmcal/errors.hpp"

namespace hjmcal {

// Right-continuous piecewise-constant function: value v0 on (-inf, b[0]),
// v[i+1] on [b[i], b[i+1]), v[m] on [b[m-1], inf).
class PiecewiseConstant {
 public:
  PiecewiseConstant() : values_{1.0} {}
  explicit PiecewiseConstant(double constant) : values_{constant} {}
  PiecewiseConstant(std::vector<double> breakpoints, std::vector<double> values)
      : breaks_(std::move(breakpoints)), values_(std::move(values)) {
    if (values_.size() != breaks_.size() + 1)
      throw BadConfig("piecewise: need one more value than breakpoints");
    for (std::size_t i = 1; i < breaks_.size(); ++i)
      if (!(breaks_[i] > breaks_[i - 1]))
        throw BadConfig("piecewise: breakpoints must be strictly increasing");
  }

  double operator()(double x) const {
    std::size_t i = 0;
    while (i < breaks_.size() && x >= breaks_[i]) ++i;
    return values_[i];
  }

  bool is_constant() const { return breaks_.empty(); }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& values() const { return values_; }
  std::vector<double>& values() { return values_; }

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

}  // namespace hjmcal
