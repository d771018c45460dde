#pragma once

#include <string>
#include <vector>

#include "hjmcal/dates.hpp"

namespace hjmcal {

struct OptionQuote {
  double K = 0.0;
  double value = 0.0;  // implied vol when is_iv, option premium otherwise
  bool is_call = true;
  bool is_iv = true;
};

// One quoted smile: a single contract/maturity with strictly increasing strikes.
struct SmileQuote {
  std::string contract_id;
  double F0 = 0.0;
  double T = 0.0;  // years, ACT/365
  std::vector<OptionQuote> quotes;

  void validate() const;
  // Quotes as Black implied vols (premiums inverted where needed).
  std::vector<double> ivs() const;
  // Linear-in-strike implied vol with flat wings.
  double iv_at(double K) const;
};

// ATM total-variance term structure: piecewise linear in total variance
// through (0,0) and the knots, extrapolated at the last forward-variance slope.
struct ThetaCurve {
  std::vector<double> T;
  std::vector<double> theta;

  double at(double t) const;
};

// Smile family sharing the global (eta, gamma) wing parameters with
// per-contract correlation and ATM variance curves.
struct MultiSsviParams {
  std::vector<std::string> contract_ids;
  std::vector<double> rho;
  double eta = 1.0;
  double gamma = 0.3;
  std::vector<ThetaCurve> theta;
  std::vector<double> residuals;  // per fitted smile, RMS vega-weighted

  int contract_index(const std::string& id) const;
  void validate() const;
};

double ssvi_phi(double theta, double eta, double gamma);

// w(k) = (theta/2) (1 + rho phi k + sqrt((phi k + rho)^2 + 1 - rho^2)).
double ssvi_total_variance(const MultiSsviParams& p, int contract, double T, double k);

double ssvi_iv(const MultiSsviParams& p, int contract, double T, double F0, double K);

// Least-squares fit in vega-weighted premium space, ATM-anchored thetas,
// enforcing eta (1 + max |rho_i|) <= 2. Throws InfeasibleConstraint when the
// bound is active and the unconstrained optimum violates it.
MultiSsviParams fit_multi_ssvi(const std::vector<SmileQuote>& smiles);

// CSV ingestion: columns contract_id, maturity_date, F0, strike, value, kind
// with kind in {iv_call, iv_put, call, put}; maturities in years ACT/365 from t0.
std::vector<SmileQuote> load_smiles_csv(const std::string& path, Date t0);

}  // namespace hjmcal
