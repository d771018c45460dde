#include "hjmcal/fourier.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <string>

#include "hjmcal/black.hpp"
#include "hjmcal/errors.hpp"
#include "hjmcal/quadrature.hpp"

namespace hjmcal {

namespace {

constexpr double kUMax = 400.0;
constexpr double kTailRel = 1e-12;

// Embedded GL49/GL96 panel with recursive bisection; the integrand is
// analytic, so once a sub-panel spans few enough oscillations the pair agrees
// to near machine precision.
double panel_integrate(const std::function<double(double)>& f, double lo, double hi,
                       double abs_tol, int depth) {
  const double coarse = gl_integrate(f, lo, hi, 49);
  const double fine = gl_integrate(f, lo, hi, 96);
  if (std::abs(fine - coarse) <= abs_tol) return fine;
  if (depth >= 24)
    throw QuadratureNoConvergence("transform panel did not converge on [" + std::to_string(lo) +
                                  ", " + std::to_string(hi) + "]");
  const double mid = 0.5 * (lo + hi);
  return panel_integrate(f, lo, mid, 0.5 * abs_tol, depth + 1) +
         panel_integrate(f, mid, hi, 0.5 * abs_tol, depth + 1);
}

}  // namespace

double lewis_call(double F0, double K, const CharGrid& grid, const LiftedHestonParams& p) {
  if (!(F0 > 0.0)) throw BadConfig("futures level must be positive");
  if (!(K > 0.0)) throw BadConfig("strike must be positive");
  const double log_moneyness = std::log(F0 / K);
  const auto integrand = [&](double u) {
    const std::complex<double> v(0.5, u);  // phi evaluated at u - i/2 acting on v = 1/2 + iu
    const std::complex<double> phase =
        std::exp(std::complex<double>(0.5 * log_moneyness, u * log_moneyness));
    return (phase * char_function(v, grid, p)).real() / (u * u + 0.25);
  };

  double integral = 0.0;
  double lo = 0.0, width = 2.0;
  bool tail_reached = false;
  while (lo < kUMax) {
    const double hi = std::min(lo + width, kUMax);
    const double contribution =
        panel_integrate(integrand, lo, hi, 1e-13 * std::max(1.0, std::abs(integral)), 0);
    integral += contribution;
    if (std::abs(contribution) < kTailRel * std::max(1.0, std::abs(integral))) {
      tail_reached = true;
      break;
    }
    lo = hi;
    width *= 2.0;
  }
  if (!tail_reached)
    throw QuadratureNoConvergence("transform integrand tail still significant at the cap");

  return F0 - K / M_PI * integral;
}

double lewis_call(double F0, double K, const LscModel& m, const TermCorrection& corr,
                  const LiftedHestonParams& p, const Window& w, double T, int n_steps) {
  return lewis_call(F0, K, build_char_grid(m, corr, p, w, T, n_steps), p);
}

double lewis_put(double F0, double K, const CharGrid& grid, const LiftedHestonParams& p) {
  return lewis_call(F0, K, grid, p) - F0 + K;
}

std::vector<double> model_smile(double F0, const std::vector<double>& strikes, const LscModel& m,
                                const TermCorrection& corr, const LiftedHestonParams& p,
                                const Window& w, double T, int n_steps) {
  if (strikes.empty()) throw EmptyInput("no strikes for the model smile");
  const CharGrid grid = build_char_grid(m, corr, p, w, T, n_steps);
  std::vector<double> iv;
  iv.reserve(strikes.size());
  for (double K : strikes) iv.push_back(implied_vol(lewis_call(F0, K, grid, p), F0, K, T));
  return iv;
}

}  // namespace hjmcal
