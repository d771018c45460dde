#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "hjmcal/piecewise.hpp"

namespace hjmcal {

enum class ShapeKind { L, S, C };

// Separable state variables of the L-S-C family; each C factor splits into (C1, C2).
enum class StateVar { L, S, C1, C2 };

// Absolute delivery window in year fractions from the observation date, half-open [ts, te).
struct Window {
  double ts = 0.0;
  double te = 0.0;
  double duration() const { return te - ts; }
};

// Rolling contract: constant time-to-delivery ts and duration te - ts, in year fractions.
struct RollingSpec {
  double ts = 0.0;
  double te = 0.0;
};

// Deterministic risk-factor block: level/slope/curvature amplitudes, time scales and
// factor correlation. Factor ordering is (L, S_1..S_Ns, C_1..C_Nc); state-variable
// ordering is (L, S_1..S_Ns, (C1,C2)_1..(C1,C2)_Nc).
struct LscModel {
  double sigma_l = 0.0;
  std::vector<double> sigma_s, tau_s;
  std::vector<double> sigma_c, tau_c;
  Eigen::MatrixXd R;

  int n_s() const { return static_cast<int>(sigma_s.size()); }
  int n_c() const { return static_cast<int>(sigma_c.size()); }
  int n_factors() const { return 1 + n_s() + n_c(); }
  int n_states() const { return n_factors() + n_c(); }

  struct State {
    StateVar kind;
    double tau;    // 0 for L
    int factor;    // owning factor index
  };
  std::vector<State> states() const;
  // Per-state amplitude (sigma of the owning factor).
  Eigen::VectorXd state_sigmas() const;
  // x_{p,k} = sigma_p sigma_k R_{factor(p), factor(k)} over states.
  Eigen::MatrixXd state_cov() const;
  // Lower-triangular Cholesky factor of R (R = L L^T).
  Eigen::MatrixXd chol_lower() const;

  // Throws BadConfig on invariant violation (sigma > 0, taus strictly increasing
  // per family, R a valid correlation matrix).
  void validate() const;
};

// One exponential term c * u^d * exp(rate*u - offset). Construction keeps
// rate*u <= offset over the intended evaluation domain so eval never overflows.
struct ExpTerm {
  double coef = 0.0;
  int deg = 0;
  double rate = 0.0;
  double offset = 0.0;
};
using ExpSum = std::vector<ExpTerm>;

double eval(const ExpTerm& t, double u);
double eval(const ExpSum& f, double u);
// Exact closed-form integral of the product of two terms (sums) over [t1, t2].
double integrate_product(const ExpTerm& p, const ExpTerm& k, double t1, double t2);
double integrate_product(const ExpSum& f, const ExpSum& g, double t1, double t2);

// sigma_X(t, T) for factor index fa (0 = L). Requires 0 <= t <= T.
double shape_eval(const LscModel& m, int factor, double t, double T);

// beta_X^tau(Te, Ts): delivery average of b_X over [Ts, Te].
double beta_weight(StateVar X, double tau, double Ts, double Te);

// Raw integral of a_{X_p} a_{X_k} over [t1, t2] (closed form; can overflow for
// large t/tau by design, matching the growth of the true value).
double cross_term(StateVar Xp, StateVar Xk, double tau_p, double tau_k, double t1, double t2);

// Unit-amplitude anchored term beta_X(window) * a_X(u), valid for u <= window.ts.
ExpTerm state_term(StateVar X, double tau, const Window& w);

// Per-factor KV volatility profile t -> Sigma_t(Ts,Te)[factor] with an optional
// piecewise-constant g over the delivery window; exact (no quadrature).
ExpSum factor_profile(const LscModel& m, int factor, const Window& w,
                      const PiecewiseConstant* g = nullptr);

// Sigma_t(Ts, Te) as an N-vector; g as above. Requires t <= w.ts.
Eigen::VectorXd kv_volatility(const LscModel& m, double t, const Window& w,
                              const PiecewiseConstant* g = nullptr);
// Generic g variant (quadrature over the delivery window; used by smoothed corrections).
Eigen::VectorXd kv_volatility(const LscModel& m, double t, const Window& w,
                              const std::function<double(double)>& g);

// Normalized stationary covariance of tau_d-day rolling log returns; delivery
// windows enter shifted by tau_d. All times in year fractions.
double model_covariance(const LscModel& m, const RollingSpec& si, const RollingSpec& sj,
                        double tau_d);

// Variance-swap variance level (sigma_VS^2) for an absolute window and maturity T <= ts.
double model_vs_variance(const LscModel& m, const Window& w, double T);

// Instantaneous correlation of two delivery windows at time t (g optional).
double instantaneous_correlation(const LscModel& m, double t, const Window& wi,
                                 const Window& wj, const PiecewiseConstant* g = nullptr);

}  // namespace hjmcal
