#include "hjmcal/black.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "hjmcal/errors.hpp"
#include "oracles.hpp"

using namespace hjmcal;

TEST(Black, DeepItmLimit) {
  EXPECT_NEAR(black_call(100.0, 1e-10, 1.0, 0.2), 100.0, 1e-8);
}

TEST(Black, AtmKnownValue) {
  // F = K = 100, T = 1, sigma = 0.2 -> 100 (2 Phi(0.1) - 1).
  const double c = black_call(100.0, 100.0, 1.0, 0.2);
  EXPECT_NEAR(c, 7.965567455405804, 1e-10);
  EXPECT_NEAR(c, oracles::lognormal_call_numeric(100.0, 100.0, 1.0, 0.2), 1e-9);
}

TEST(Black, MatchesNumericIntegrationAcrossMoneyness) {
  for (double k : {0.5, 0.8, 1.0, 1.3, 2.0}) {
    for (double sigma : {0.1, 0.4, 0.9}) {
      const double c = black_call(100.0, 100.0 * k, 0.75, sigma);
      EXPECT_NEAR(c, oracles::lognormal_call_numeric(100.0, 100.0 * k, 0.75, sigma), 2e-9)
          << "k=" << k << " sigma=" << sigma;
    }
  }
}

TEST(Black, PutCallParity) {
  const double F0 = 87.0, K = 95.0, T = 0.6, sigma = 0.45;
  EXPECT_NEAR(black_call(F0, K, T, sigma) - black_put(F0, K, T, sigma), F0 - K, 1e-12);
}

TEST(Black, ImpliedVolRoundTrip) {
  for (double sigma : {0.05, 0.1, 0.3, 0.5, 1.0, 2.0}) {
    for (double k : {0.6, 0.9, 1.0, 1.2, 1.8}) {
      // At |d1| beyond ~8 the price collapses onto intrinsic in double
      // precision and no inverse can recover the volatility.
      const double d1 = std::abs(std::log(1.0 / k)) / (sigma * std::sqrt(1.3));
      if (d1 > 8.0) continue;
      const double price = black_call(50.0, 50.0 * k, 1.3, sigma);
      EXPECT_NEAR(implied_vol(price, 50.0, 50.0 * k, 1.3), sigma, 1e-10)
          << "sigma=" << sigma << " k=" << k;
    }
  }
}

TEST(Black, VegaPositiveAndMonotonePrice) {
  double prev = black_call(100.0, 90.0, 1.0, 0.01);
  for (double sigma = 0.05; sigma < 2.0; sigma += 0.05) {
    EXPECT_GT(black_vega(100.0, 90.0, 1.0, sigma), 0.0);
    const double c = black_call(100.0, 90.0, 1.0, sigma);
    EXPECT_GT(c, prev);
    prev = c;
  }
}

TEST(Black, ImpliedVolBounds) {
  EXPECT_THROW(implied_vol(101.0, 100.0, 90.0, 1.0), PriceOutOfBounds);
  EXPECT_THROW(implied_vol(5.0, 100.0, 90.0, 1.0), PriceOutOfBounds);  // below intrinsic
  EXPECT_DOUBLE_EQ(implied_vol(10.0, 100.0, 90.0, 1.0), 0.0);          // at intrinsic
}
