#include "hjmcal/riccati.hpp"

#include <cmath>

#include "hjmcal/errors.hpp"

namespace hjmcal {

void LiftedHestonParams::validate(const LscModel& m) const {
  if (c.size() != x.size()) throw BadConfig("vol factor weight/speed sizes differ");
  for (int j = 0; j < c.size(); ++j)
    if (!(c(j) >= 0.0)) throw BadConfig("vol factor weights must be non-negative");
  for (int j = 0; j < x.size(); ++j) {
    if (!(x(j) > 0.0)) throw BadConfig("vol factor speeds must be positive");
    if (j > 0 && !(x(j) > x(j - 1)))
      throw BadConfig("vol factor speeds must be strictly increasing");
  }
  if (rho_hat.size() != m.n_factors())
    throw BadConfig("spot/vol correlation loading size must match the curve factor count");
  if (rho_hat.norm() > 1.0 + 1e-12)
    throw BadConfig("spot/vol correlation loading must have norm at most 1");
}

Eigen::VectorXd LiftedHestonParams::rho_tilde(const LscModel& m) const {
  return m.chol_lower() * rho_hat;
}

CharGrid build_char_grid(const LscModel& m, const TermCorrection& corr,
                         const LiftedHestonParams& p, const Window& w, double T, int n_steps) {
  if (!(T > 0.0)) throw BadConfig("characteristic-function maturity must be positive");
  if (T > w.ts + 1e-12) throw BadConfig("characteristic-function maturity beyond delivery start");
  p.validate(m);
  const int n = n_steps > 0 ? n_steps : std::max(500, static_cast<int>(std::ceil(730.0 * T)));
  const Eigen::VectorXd rt = p.rho_tilde(m);

  CharGrid grid;
  grid.maturity = T;
  grid.t.resize(static_cast<size_t>(n) + 1);
  grid.a.resize(grid.t.size());
  grid.b.resize(grid.t.size());
  for (int k = 0; k <= n; ++k) {
    const double t = T * k / n;
    const double s = T - t;  // generator time argument
    const Eigen::VectorXd sig = kv_volatility(m, corr, s, w);
    const double h = corr.h_at(s);
    grid.t[static_cast<size_t>(k)] = t;
    grid.a[static_cast<size_t>(k)] = h * h * sig.dot(m.R * sig);
    grid.b[static_cast<size_t>(k)] = h * sig.dot(rt);
  }
  return grid;
}

std::complex<double> g_function(std::complex<double> v, std::complex<double> psi, double a,
                                double b) {
  return 0.5 * a * (v * v - v) + b * v * psi + 0.5 * psi * psi;
}

RiccatiSolution solve_riccati(std::complex<double> v, const CharGrid& grid,
                              const LiftedHestonParams& p) {
  if (v.real() < -1e-12 || v.real() > 1.0 + 1e-12)
    throw BadConfig("generator argument must have real part in [0, 1]");
  const size_t n_pts = grid.t.size();
  if (n_pts < 2) throw BadConfig("characteristic grid needs at least two points");
  const int M = p.n_vol_factors();
  const double dt = grid.dt();

  // Per-factor decay and integrated-kernel weights of one step.
  Eigen::VectorXd decay(M), weight(M);
  for (int j = 0; j < M; ++j) {
    const double xd = p.x(j) * dt;
    decay(j) = std::exp(-xd);
    weight(j) = xd < 1e-12 ? dt : (1.0 - decay(j)) / p.x(j);
  }

  RiccatiSolution sol;
  sol.t = grid.t;
  sol.psi_j = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n_pts), M);
  sol.psi.assign(n_pts, {0.0, 0.0});
  sol.g.assign(n_pts, {0.0, 0.0});

  std::complex<double> psi{0.0, 0.0};
  for (size_t k = 0; k + 1 < n_pts; ++k) {
    const std::complex<double> gk = g_function(v, psi, grid.a[k], grid.b[k]);
    sol.g[k] = gk;
    psi = {0.0, 0.0};
    for (int j = 0; j < M; ++j) {
      sol.psi_j(static_cast<Eigen::Index>(k + 1), j) =
          decay(j) * sol.psi_j(static_cast<Eigen::Index>(k), j) + weight(j) * gk;
      psi += p.c(j) * sol.psi_j(static_cast<Eigen::Index>(k + 1), j);
    }
    sol.psi[k + 1] = psi;
  }
  sol.g[n_pts - 1] = g_function(v, psi, grid.a[n_pts - 1], grid.b[n_pts - 1]);
  return sol;
}

std::complex<double> char_function(std::complex<double> v, const CharGrid& grid,
                                   const LiftedHestonParams& p) {
  const RiccatiSolution sol = solve_riccati(v, grid, p);
  const double dt = grid.dt();
  std::complex<double> acc = 0.5 * (sol.g.front() + sol.g.back());
  for (size_t k = 1; k + 1 < sol.g.size(); ++k) acc += sol.g[k];
  return std::exp(dt * acc);
}

std::complex<double> char_function(std::complex<double> v, const LscModel& m,
                                   const TermCorrection& corr, const LiftedHestonParams& p,
                                   const Window& w, double T, int n_steps) {
  return char_function(v, build_char_grid(m, corr, p, w, T, n_steps), p);
}

}  // namespace hjmcal
