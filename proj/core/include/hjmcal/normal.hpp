#pragma once

namespace hjmcal {

double normal_pdf(double x);
double normal_cdf(double x);
// Inverse standard normal CDF, accurate to full double precision on (0, 1).
double normal_inv_cdf(double p);

}  // namespace hjmcal
