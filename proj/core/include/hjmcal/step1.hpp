#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "hjmcal/cone.hpp"
#include "hjmcal/lsc.hpp"
#include "hjmcal/neldermead.hpp"
#include "hjmcal/philox.hpp"

namespace hjmcal {

// One variance-swap variance target: absolute delivery window, VS maturity
// T <= window.ts, and the market (sigma_VS)^2 level.
struct VsTarget {
  Window window;
  double T = 0.0;
  double sigma_vs_sq = 0.0;
};

// Joint historical-covariance / VS-variance calibration instance.
struct Step1Problem {
  Eigen::MatrixXd C_mkt;   // P_hist x P_hist annualized covariance targets
  Eigen::MatrixXd Gamma;   // Frobenius weights (mean 1)
  std::vector<RollingSpec> rolling;
  double tau_d = 1.0 / 252.0;  // return lag in years
  std::vector<VsTarget> vs;
  std::vector<double> vs_weights;  // empty -> uniform 1
  double lambda = 0.5;
  int n_s = 1;
  int n_c = 0;
  // Upper bound on sigma_L; <= 0 selects 3x the longest-delivery realized vol.
  double sigma_l_upper = 0.0;

  int n_factors() const { return 1 + n_s + n_c; }
  int n_states() const { return n_factors() + n_c; }
  void validate() const;
  // N(N+3)/2 - 1 <= P_smiles + P_hist (P_hist + 1)/2; violations warn only.
  bool underparametrization_ok() const;
};

// Quadratic-in-x loss coefficients for fixed tau. cov[i * P + j] and vs[l]
// hold the per-state-pair weight matrices.
struct Step1Weights {
  std::vector<Eigen::MatrixXd> cov;
  std::vector<Eigen::MatrixXd> vs;
  int p_hist = 0;
};

// tau = (tau_S ascending, tau_C ascending), length n_s + n_c.
Step1Weights build_weights(const std::vector<double>& tau, const Step1Problem& prob);

// Loss decomposition at a given state covariance x.
double loss_from_x(const Eigen::MatrixXd& x, const Step1Weights& w, const Step1Problem& prob,
                   double* j1 = nullptr, double* j2 = nullptr);

struct InnerSolution {
  Eigen::MatrixXd x;  // symmetric (N+Nc) x (N+Nc) state covariance
  double loss = 0.0;
  double j1 = 0.0;
  double j2 = 0.0;
  ConeSolution cone;
};

// Inner linear cone program over x for fixed tau.
InnerSolution solve_inner(const std::vector<double>& tau, const Step1Problem& prob,
                          const ConeSolverOptions& copt = {}, ConeWarmStart* warm = nullptr);

// Cumulative-exponential map: strictly positive, strictly increasing per family.
std::vector<double> tau_from_a(const Eigen::VectorXd& a, int n_s);

// Initial a from convex combinations of delivery-window midpoints with
// multiplicative lognormal noise (sigma = 0.3) when noise is set.
Eigen::VectorXd init_tau(const Step1Problem& prob, RngStream& rng, bool noise = true);

struct Step1Options {
  int restarts = 100;
  int n_workers = 0;  // 0 -> hardware concurrency (max 8)
  std::uint64_t seed = 20240101;
  NelderMeadOptions nm{400, 1e-6, 0.5};
  ConeSolverOptions cone;
  // Iteration cap for inner solves inside the outer search; the final solve
  // at the best tau always runs at full budget.
  int search_max_iter = 20000;
};

struct Step1Report {
  double loss = 0.0, j1 = 0.0, j2 = 0.0;
  std::vector<double> tau;
  Eigen::MatrixXd x;
  int best_restart = -1;
  bool underparametrized = false;
  std::vector<double> restart_losses;
};

// Outer derivative-free search over a with parallel restarts, then parameter
// extraction. Throws ExtractionDegenerate when some diagonal of the {L,S,C1}
// restriction is not positive (factor count reducible).
LscModel calibrate_step1(const Step1Problem& prob, const Step1Options& opt = {},
                         Step1Report* report = nullptr);

}  // namespace hjmcal
