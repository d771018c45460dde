#include "hjmcal/quadrature.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace hjmcal;

TEST(Quadrature, RuleProperties) {
  for (int n : {1, 2, 5, 7, 15, 31}) {
    const GlRule& r = gl_rule(n);
    double ws = 0.0;
    for (double w : r.weights) ws += w;
    EXPECT_NEAR(ws, 2.0, 1e-14) << "order " << n;
    for (std::size_t i = 1; i < r.nodes.size(); ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
  }
}

TEST(Quadrature, ExactForPolynomials) {
  // Order-n GL integrates degree 2n-1 exactly.
  auto poly = [](double x) { return ((3 * x + 1) * x - 2) * x * x * x; };  // degree 5
  const double exact = 2.0 / 5.0;  // odd powers vanish over [-1, 1]
  EXPECT_NEAR(gl_integrate(poly, -1.0, 1.0, 3), exact, 1e-14);
}

TEST(Quadrature, AdaptiveSmooth) {
  const double v = adaptive_integrate([](double x) { return std::exp(x); }, 0.0, 2.0, 1e-12);
  EXPECT_NEAR(v, std::exp(2.0) - 1.0, 1e-11);
}

TEST(Quadrature, AdaptiveNearSingular) {
  // 1/sqrt(x + eps) stresses panel subdivision near 0.
  const double eps = 1e-6;
  const double v = adaptive_integrate(
      [&](double x) { return 1.0 / std::sqrt(x + eps); }, 0.0, 1.0, 1e-10);
  const double exact = 2.0 * (std::sqrt(1.0 + eps) - std::sqrt(eps));
  EXPECT_NEAR(v, exact, 1e-8);
}

TEST(Quadrature, EmptyInterval) {
  EXPECT_EQ(adaptive_integrate([](double) { return 1.0; }, 3.0, 3.0, 1e-10), 0.0);
}
