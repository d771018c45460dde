#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "hjmcal/lsc.hpp"
#include "hjmcal/term.hpp"

namespace hjmcal {

// Lifted multi-factor square-root variance: V = 1 + sum_j c_j U^j with mean
// reversion speeds x_j, plus the spot/volatility correlation loading rho_hat
// expressed in the orthonormalized driver basis (rho_tilde = L rho_hat with L
// the Cholesky factor of the driver correlation R).
struct LiftedHestonParams {
  Eigen::VectorXd c;        // M weights, >= 0
  Eigen::VectorXd x;        // M speeds, 0 < x_1 < ... < x_M (1/yr)
  Eigen::VectorXd rho_hat;  // one loading per curve factor, ||rho_hat|| <= 1

  int n_vol_factors() const { return static_cast<int>(c.size()); }
  // Throws BadConfig on shape or bound violations.
  void validate(const LscModel& m) const;
  Eigen::VectorXd rho_tilde(const LscModel& m) const;
};

// Coefficients of the log-price generator along a maturity-anchored grid:
// at grid time t_k the generator reads a/2 (v^2 - v) + b v psi + psi^2/2 with
// a = h(T-t)^2 Sigma^T R Sigma and b = h(T-t) Sigma^T rho_tilde.
struct CharGrid {
  double maturity = 0.0;
  std::vector<double> t;  // uniform, t.front() = 0, t.back() = maturity
  std::vector<double> a;
  std::vector<double> b;

  double dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

// Default step count: max(500, ceil(730 T)); n_steps > 0 overrides.
CharGrid build_char_grid(const LscModel& m, const TermCorrection& corr,
                         const LiftedHestonParams& p, const Window& w, double T,
                         int n_steps = 0);

// One evaluation of the generator.
std::complex<double> g_function(std::complex<double> v, std::complex<double> psi, double a,
                                double b);

struct RiccatiSolution {
  std::vector<double> t;
  Eigen::MatrixXcd psi_j;                   // (grid points) x (vol factors)
  std::vector<std::complex<double>> psi;    // sum_j c_j psi_j
  std::vector<std::complex<double>> g;      // generator values along the grid
};

// Exponential-integrator recursion for the vol-factor Riccati system;
// requires Re(v) in [0, 1].
RiccatiSolution solve_riccati(std::complex<double> v, const CharGrid& grid,
                              const LiftedHestonParams& p);

// Characteristic function E[(F_T/F_0)^v] via trapezoidal accumulation of the
// generator along the same grid.
std::complex<double> char_function(std::complex<double> v, const CharGrid& grid,
                                   const LiftedHestonParams& p);
std::complex<double> char_function(std::complex<double> v, const LscModel& m,
                                   const TermCorrection& corr, const LiftedHestonParams& p,
                                   const Window& w, double T, int n_steps = 0);

}  // namespace hjmcal
