#include "hjmcal/black.hpp"

#include <algorithm>
#include <cmath>

#include "hjmcal/errors.hpp"
#include "hjmcal/normal.hpp"

namespace hjmcal {

double black_call(double F0, double K, double T, double sigma) {
  const double s = sigma * std::sqrt(T);
  if (s <= 0.0) return std::max(F0 - K, 0.0);
  const double d1 = std::log(F0 / K) / s + 0.5 * s;
  const double d2 = d1 - s;
  return F0 * normal_cdf(d1) - K * normal_cdf(d2);
}

double black_put(double F0, double K, double T, double sigma) {
  return black_call(F0, K, T, sigma) - F0 + K;
}

double black_vega(double F0, double K, double T, double sigma) {
  const double s = sigma * std::sqrt(T);
  const double d1 = std::log(F0 / K) / s + 0.5 * s;
  return F0 * normal_pdf(d1) * std::sqrt(T);
}

double implied_vol(double price, double F0, double K, double T) {
  const double intrinsic = std::max(F0 - K, 0.0);
  if (price < intrinsic - 1e-14 * F0 || price >= F0)
    throw PriceOutOfBounds("call price " + std::to_string(price) + " outside [" +
                           std::to_string(intrinsic) + ", " + std::to_string(F0) + ")");
  if (price <= intrinsic) return 0.0;

  double lo = 0.0, hi = 1.0;
  while (black_call(F0, K, T, hi) < price) {
    hi *= 2.0;
    if (hi > 1e4) throw PriceOutOfBounds("implied volatility above 1e4");
  }
  // Safeguarded Newton; convergence measured on the volatility bracket so tiny
  // out-of-the-money prices still resolve to full precision.
  double sigma = 0.5 * (lo + hi);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, lo); ++it) {
    const double diff = black_call(F0, K, T, sigma) - price;
    if (diff == 0.0) return sigma;
    if (diff > 0.0)
      hi = sigma;
    else
      lo = sigma;
    const double vega = black_vega(F0, K, T, sigma);
    double next = vega > 1e-300 ? sigma - diff / vega : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    sigma = next;
  }
  return 0.5 * (lo + hi);
}

}  // namespace hjmcal
