#pragma once

namespace adapt::num {

// Standard normal cdf/pdf, double precision (erfc-backed).
double norm_cdf(double x);
double norm_pdf(double x);

// Inverse cdf: rational seed refined by Newton steps on the erfc-backed cdf;
// absolute error well below 1e-12 over (1e-300, 1-1e-16).
double norm_quantile(double p);

// Upper-tail quantile z_p with pr{Z >= z_p} = p.
double upper_quantile(double p);

}  // namespace adapt::num
