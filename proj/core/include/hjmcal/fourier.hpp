#pragma once

#include <vector>

#include "hjmcal/riccati.hpp"

namespace hjmcal {

// Undiscounted call on the delivery-averaged futures via the half-line Fourier
// representation: F0 - (K/pi) Int_0^inf Re(e^{i(u-i/2) log(F0/K)}
// phi(u - i/2)) du / (u^2 + 1/4). Quadrature: Gauss-Legendre on dyadically
// growing panels, stopping once a panel contributes less than 1e-12 of the
// accumulated integral; throws QuadratureNoConvergence at the u = 400 cap.
double lewis_call(double F0, double K, const CharGrid& grid, const LiftedHestonParams& p);
double lewis_call(double F0, double K, const LscModel& m, const TermCorrection& corr,
                  const LiftedHestonParams& p, const Window& w, double T, int n_steps = 0);

// Put via parity on the same integral: P = C - F0 + K.
double lewis_put(double F0, double K, const CharGrid& grid, const LiftedHestonParams& p);

// Black-76 implied volatilities of lewis_call prices per strike.
std::vector<double> model_smile(double F0, const std::vector<double>& strikes, const LscModel& m,
                                const TermCorrection& corr, const LiftedHestonParams& p,
                                const Window& w, double T, int n_steps = 0);

}  // namespace hjmcal
