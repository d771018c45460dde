#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "hjmcal/lsc.hpp"
#include "hjmcal/pchip.hpp"
#include "hjmcal/piecewise.hpp"

namespace hjmcal {

enum class ContractKind { Month, Quarter, Calendar, Other };

// One implied-volatility smile reduced to its variance-swap level target.
// vs is the integrated variance to maturity (sigma_vs^2 * maturity).
struct SmileSpec {
  int contract = 0;       // underlying id; equal ids must share the window
  Window window;          // delivery period
  double maturity = 0.0;  // option expiry, <= window.ts
  double vs = 0.0;        // market VS price (integrated variance)
  ContractKind kind = ContractKind::Other;
  std::string label;      // reporting tag
};

// Division of the smiles (indices into the smile list): g_group smiles are
// matched through the delivery-time weight g, h_group smiles through the
// observation-time weight h.
struct SmileGrouping {
  std::vector<int> g_group;
  std::vector<int> h_group;
};

// Throws NoValidGrouping when the division breaks an admissibility rule:
// (1) at most one g smile per contract, (2) no g delivery period expressible
// as a disjoint union of other g delivery periods, (3) distinct h maturities.
void validate_grouping(const SmileGrouping& grp, const std::vector<SmileSpec>& smiles);

// Default policy: month/quarter smiles to the g group (one maturity per
// contract), calendar smiles to the h group; when the result breaks a rule, a
// bounded repair search reassigns smiles before giving up with NoValidGrouping.
SmileGrouping assign_groups(const std::vector<SmileSpec>& smiles);

// Multiplicative term-structure correction pair. g is piecewise-constant over
// the delivery breakpoints of the g-group contracts, h over the sorted h-group
// maturities; both equal 1 outside the calibrated spans. The smoothed variants
// are monotone cubics through the piece midpoints.
struct TermCorrection {
  PiecewiseConstant g, h;
  bool smoothed = false;
  Pchip g_smooth, h_smooth;

  double g_at(double T) const { return smoothed ? g_smooth(T) : g(T); }
  double h_at(double t) const { return smoothed ? h_smooth(t) : h(t); }
  // Throws BadConfig unless every piece value is strictly positive.
  void validate() const;
};

// Sigma_t(window) with the correction's g applied (h enters the dynamics
// separately as a time change of the volatility).
Eigen::VectorXd kv_volatility(const LscModel& m, const TermCorrection& corr, double t,
                              const Window& w);

// Integral over [t0, t1] of h(t)^2 Sigma_t^T R Sigma_t for a delivery window
// under piecewise-constant g and h; exact closed form. Requires t1 <= w.ts.
double vs_integral(const LscModel& m, const Window& w, const PiecewiseConstant& g,
                   const PiecewiseConstant& h, double t0, double t1);
// Same for arbitrary g and h (adaptive quadrature; smoothed corrections).
double vs_integral(const LscModel& m, const Window& w, const std::function<double(double)>& g,
                   const std::function<double(double)>& h, double t0, double t1);
// Variance-swap price (integrated variance) to maturity T under a correction.
double vs_price(const LscModel& m, const TermCorrection& corr, const Window& w, double T);

// Sets h piece values on each maturity interval so every h-group smile's VS
// target is matched exactly under the given g. Throws NegativeIncrement when a
// target implies a non-positive variance increment.
PiecewiseConstant strip_h(const PiecewiseConstant& g, const SmileGrouping& grp,
                          const std::vector<SmileSpec>& smiles, const LscModel& m);

// Sets g piece values so every g-group smile's VS target is matched exactly
// under the given h: closed-form square root for contracts without nested
// g-group deliveries, positive quadratic root for the others (processed after
// their nested members). prev supplies the continuity tie-break when two
// positive roots exist; warnings collects a note when that happens.
PiecewiseConstant solve_g(const PiecewiseConstant& h, const SmileGrouping& grp,
                          const std::vector<SmileSpec>& smiles, const LscModel& m,
                          const PiecewiseConstant* prev = nullptr,
                          std::vector<std::string>* warnings = nullptr);

struct TermFitOptions {
  double eps = 1e-10;        // sup-norm tolerance on successive g values
  int max_iter = 100;
  bool smoothing = false;    // re-solve piece values for the smoothed functions
  double smooth_tol = 1e-8;  // relative VS tolerance for the smoothed re-solve
  int smooth_max_iter = 200;
};

struct FixedPointLog {
  int iterations = 0;
  std::vector<double> g_delta;      // sup-norm change of g per iteration
  double max_rel_residual = 0.0;    // worst smile residual at exit
  bool converged = false;
  std::vector<std::string> warnings;
};

// Alternates strip_h and solve_g from (g, h) = (1, 1) until the g values
// settle, then verifies every smile's VS target. Throws NoConvergence when the
// iteration budget runs out.
TermCorrection fixed_point(const SmileGrouping& grp, const std::vector<SmileSpec>& smiles,
                           const LscModel& m, const TermFitOptions& opt = {},
                           FixedPointLog* log = nullptr);

enum class ExistenceStatus { Holds, Fails, Unknown };

struct ExistenceCheck {
  ExistenceStatus status = ExistenceStatus::Unknown;
  // Value of the contraction ratio; the fixed point exists when it is < 1.
  double margin = 0.0;
};

// Evaluates the sufficient fixed-point existence condition. Scope: every
// h-group smile on one underlying, no nested g-group deliveries, nonnegative
// pairwise instantaneous contract correlations; returns Unknown outside it.
ExistenceCheck check_existence(const SmileGrouping& grp, const std::vector<SmileSpec>& smiles,
                               const LscModel& m);

// Monotone-cubic smoothing through the piece midpoints of g and h (flat
// outside the midpoint span). Values stay positive; piece values are kept.
TermCorrection smooth(const TermCorrection& corr);

}  // namespace hjmcal
