#pragma once

#include <functional>

#include "hjmcal/ssvi.hpp"

namespace hjmcal {

struct VsQuote {
  double total_variance = 0.0;  // VS_T
  double vol = 0.0;             // sqrt(VS_T / T)
};

// Log-contract replication 2 int_0^F0 P/K^2 dK + 2 int_F0^inf C/K^2 dK on the
// log-moneyness interval [-10, 10] with adaptive panels (tolerance 1e-9).
// Throws DivergentIntegral when the wings fail the tail-decay check.
VsQuote vs_from_surface(const MultiSsviParams& p, int contract, double F0, double T);

// Raw-smile variant: linear-in-strike vols, flat-extrapolated wings.
VsQuote vs_from_surface(const SmileQuote& smile);

// Shared engine for an arbitrary smile function sigma(k), k = log(K/F0).
VsQuote vs_from_smile_function(const std::function<double(double)>& sigma_of_k, double F0,
                               double T);

}  // namespace hjmcal
