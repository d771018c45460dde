#include "hjmcal/pchip.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "hjmcal/errors.hpp"

using namespace hjmcal;

TEST(Pchip, InterpolatesNodes) {
  Pchip p({0.0, 1.0, 2.5, 4.0}, {1.0, 3.0, 2.0, 5.0});
  EXPECT_DOUBLE_EQ(p(0.0), 1.0);
  EXPECT_DOUBLE_EQ(p(1.0), 3.0);
  EXPECT_DOUBLE_EQ(p(2.5), 2.0);
  EXPECT_DOUBLE_EQ(p(4.0), 5.0);
}

TEST(Pchip, KnownHermiteValue) {
  // For knots (0,1,2) -> (0,1,0) the Fritsch-Carlson rule gives d = (2,0,-2);
  // the cubic on [0,1] evaluates to 0.75 at the midpoint.
  Pchip p({0.0, 1.0, 2.0}, {0.0, 1.0, 0.0});
  EXPECT_NEAR(p(0.5), 0.75, 1e-15);
}

TEST(Pchip, MonotonePreserving) {
  Pchip p({0.0, 1.0, 2.0, 3.0, 4.0}, {0.0, 0.1, 2.0, 2.1, 5.0});
  double prev = p(0.0);
  for (int i = 1; i <= 400; ++i) {
    double v = p(i * 0.01);
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
  // No overshoot beyond the data range.
  EXPECT_LE(prev, 5.0 + 1e-12);
}

TEST(Pchip, ConstantAndClamping) {
  Pchip p({0.0, 1.0, 2.0}, {3.0, 3.0, 3.0});
  EXPECT_DOUBLE_EQ(p(0.7), 3.0);
  Pchip q({1.0, 2.0}, {1.0, 4.0});
  EXPECT_DOUBLE_EQ(q(0.0), 1.0);   // flat extrapolation left
  EXPECT_DOUBLE_EQ(q(10.0), 4.0);  // flat extrapolation right
}

TEST(Pchip, RejectsBadKnots) {
  EXPECT_THROW(Pchip({1.0, 1.0}, {0.0, 1.0}), BadConfig);
  EXPECT_THROW(Pchip({}, {}), BadConfig);
  EXPECT_THROW(Pchip({0.0, 1.0}, {0.0}), BadConfig);
}

TEST(Pchip, MatchesReferenceImplementationValues) {
  // Expected values frozen from an independent reference implementation of
  // the same derivative rule (weighted-harmonic-mean interior slopes,
  // one-sided three-point end slopes with shape clamps).
  Pchip p({0.1, 0.35, 0.6, 1.0, 1.7}, {1.2, 0.8, 0.95, 1.5, 1.4});
  const std::vector<double> ds = {-2.6999999999999997, 0.0, 0.810964083175803, 0.0,
                                  -0.4285714285714289};
  ASSERT_EQ(p.slopes().size(), ds.size());
  for (size_t i = 0; i < ds.size(); ++i) EXPECT_NEAR(p.slopes()[i], ds[i], 1e-13);
  const std::vector<double> q = {0.1, 0.2, 0.35, 0.5, 0.77, 1.0, 1.31, 1.7};
  const std::vector<double> v = {1.2,
                                 0.962,
                                 0.8,
                                 0.8680052930056711,
                                 1.2091703125000002,
                                 1.5,
                                 1.4913145772594751,
                                 1.4};
  for (size_t i = 0; i < q.size(); ++i) EXPECT_NEAR(p(q[i]), v[i], 1e-13);

  Pchip r({0.0, 1.0, 2.0, 3.0}, {0.0, 0.1, 0.9, 1.0});
  const std::vector<double> ds2 = {0.0, 0.17777777777777778, 0.17777777777777776, 0.0};
  for (size_t i = 0; i < ds2.size(); ++i) EXPECT_NEAR(r.slopes()[i], ds2[i], 1e-13);
  const std::vector<double> q2 = {0.0, 0.4, 0.5, 1.2, 1.9, 2.5, 3.0};
  const std::vector<double> v2 = {0.0,
                                  0.018133333333333338,
                                  0.02777777777777778,
                                  0.20026666666666662,
                                  0.8648000000000001,
                                  0.9722222222222223,
                                  1.0};
  for (size_t i = 0; i < q2.size(); ++i) EXPECT_NEAR(r(q2[i]), v2[i], 1e-13);
}
