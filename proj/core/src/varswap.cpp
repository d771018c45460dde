#include "hjmcal/varswap.hpp"

#include <cmath>

#include "hjmcal/black.hpp"
#include "hjmcal/errors.hpp"
#include "hjmcal/quadrature.hpp"

namespace hjmcal {

namespace {
constexpr double kKMax = 10.0;
constexpr double kTol = 1e-9;
}  // namespace

VsQuote vs_from_smile_function(const std::function<double(double)>& sigma_of_k, double F0,
                               double T) {
  if (!(F0 > 0.0) || !(T > 0.0)) throw BadConfig("variance swap needs F0 > 0 and T > 0");

  // After K = F0 e^k the replication reads 2 int P/K dk + 2 int C/K dk.
  const auto put_leg = [&](double k) {
    const double K = F0 * std::exp(k);
    return black_put(F0, K, T, sigma_of_k(k)) / K;
  };
  const auto call_leg = [&](double k) {
    const double K = F0 * std::exp(k);
    return black_call(F0, K, T, sigma_of_k(k)) / K;
  };

  // Tail-decay check: the integrands must be negligible and still decaying at
  // the truncation boundary, otherwise the log-contract integral diverges.
  // Values below 1e-12 are rounding noise and count as decayed.
  const double tail_put = put_leg(-kKMax);
  const double tail_call = call_leg(kKMax);
  if (tail_put > 1e-6 || (tail_put > 1e-12 && tail_put > put_leg(-kKMax + 1.0)))
    throw DivergentIntegral("put wing does not decay (integrand " + std::to_string(tail_put) +
                            " at k=-10)");
  if (tail_call > 1e-6 || (tail_call > 1e-12 && tail_call > call_leg(kKMax - 1.0)))
    throw DivergentIntegral("call wing does not decay (integrand " + std::to_string(tail_call) +
                            " at k=10)");

  VsQuote out;
  out.total_variance = 2.0 * adaptive_integrate(put_leg, -kKMax, 0.0, 0.5 * kTol) +
                       2.0 * adaptive_integrate(call_leg, 0.0, kKMax, 0.5 * kTol);
  out.vol = std::sqrt(std::max(out.total_variance, 0.0) / T);
  return out;
}

VsQuote vs_from_surface(const MultiSsviParams& p, int contract, double F0, double T) {
  return vs_from_smile_function(
      [&](double k) { return std::sqrt(ssvi_total_variance(p, contract, T, k) / T); }, F0, T);
}

VsQuote vs_from_surface(const SmileQuote& smile) {
  smile.validate();
  const std::vector<double> vols = smile.ivs();  // invert premiums once
  const auto iv = [&smile, vols](double K) {
    if (K <= smile.quotes.front().K) return vols.front();
    if (K >= smile.quotes.back().K) return vols.back();
    size_t hi = 1;
    while (smile.quotes[hi].K < K) ++hi;
    const double k0 = smile.quotes[hi - 1].K, k1 = smile.quotes[hi].K;
    const double u = (K - k0) / (k1 - k0);
    return (1.0 - u) * vols[hi - 1] + u * vols[hi];
  };
  return vs_from_smile_function([&](double k) { return iv(smile.F0 * std::exp(k)); }, smile.F0,
                                smile.T);
}

}  // namespace hjmcal
