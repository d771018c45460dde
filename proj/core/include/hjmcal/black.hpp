#pragma once

namespace hjmcal {

// Undiscounted Black-76 on a futures underlying (zero rates throughout the library).
double black_call(double F0, double K, double T, double sigma);
double black_put(double F0, double K, double T, double sigma);
double black_vega(double F0, double K, double T, double sigma);

// Inverts black_call to 1e-12 in price; throws PriceOutOfBounds outside
// [(F0-K)+, F0). A price exactly at intrinsic returns 0 volatility.
double implied_vol(double price, double F0, double K, double T);

}  // namespace hjmcal
