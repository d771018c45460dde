#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "hjmcal/dates.hpp"

namespace hjmcal {

// Exchange-quoted futures delivering over calendar days [Ts, Te).
struct AbsoluteQuote {
  std::string id;
  Date Ts, Te;
  double price = 0.0;
  // Per-day weights over the delivery window, nonnegative, summing to 1.
  std::vector<double> daily_weights;

  static AbsoluteQuote uniform(std::string id, Date Ts, Date Te, double price);
  void validate() const;
};

// Stripped daily forward prices on calendar days [t0, t0 + values.size()).
struct DailyForwardCurve {
  Date t0;
  std::vector<double> values;

  double value_at(Date d) const;
  // Arithmetic average over calendar days [a, b).
  double average(Date a, Date b) const;
};

// Rolling contract addressed in calendar days relative to the observation date.
struct RollingSpecDays {
  int ts = 0;
  int te = 0;
};

struct CovarianceEstimate {
  Eigen::MatrixXd C_mkt;   // mean across decay spans, annualized (1/yr)
  Eigen::MatrixXd U;       // element-wise std across spans
  Eigen::MatrixXd Gamma;   // Frobenius weights, mean entry 1
};

// Minimum-sum-of-squared-increments curve reproducing every quote average.
// Throws EmptyInput without quotes, InfeasibleQuotes when the equality system
// is inconsistent, BadConfig if Tbar < max Te.
DailyForwardCurve strip_curve(const std::vector<AbsoluteQuote>& quotes, Date t0, Date Tbar);

// Average of the stripped curve over [t0 + ts, t0 + te); OutOfGrid past the horizon.
double rolling_quote(const DailyForwardCurve& curve, const RollingSpecDays& spec);

// Log returns of the rolling contract over a lag of tau_d observations, the
// delivery window held fixed across the lag: r_h = log F_h(w_h) - log F_{h-tau_d}(w_h).
std::vector<double> log_return_series(const std::vector<DailyForwardCurve>& curves,
                                      const RollingSpecDays& spec, int tau_d);

// Iterated mean +- k*std winsorization run to its fixed point (hence idempotent).
std::vector<double> clip_outliers(const std::vector<double>& series, double k = 3.0);

// Exponentially weighted covariance of tau_d-day return rows (H x P, oldest first),
// normalized by 1/(1 - sum w^2) and annualized by business_days_per_year / tau_d.
Eigen::MatrixXd ewma_covariance(const Eigen::MatrixXd& returns, double span,
                                double tau_d, double business_days_per_year = 252.0);

// Mean/dispersion/weights across a family of spans.
CovarianceEstimate averaged_covariance(const Eigen::MatrixXd& returns,
                                       const std::vector<double>& spans, double tau_d,
                                       double business_days_per_year = 252.0);

// Cumulative explained-variance ratios of the return covariance spectrum
// (nondecreasing, last entry 1).
Eigen::VectorXd pca_explained_variance(const Eigen::MatrixXd& returns);

// CSV ingestion: columns (date, contract_id, Ts, Te, price), grouped by date.
// An optional profile table (contract_id, day_index, weight) overrides the
// uniform base-load weighting.
std::map<Date, std::vector<AbsoluteQuote>> load_quotes_csv(
    const std::string& path, const std::string& profile_path = "");

}  // namespace hjmcal
