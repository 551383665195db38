#pragma once

namespace trmpc {

/// Quantile (inverse CDF) of the standard normal distribution.
/// Rational approximation refined with one Halley step; the absolute error
/// stays below 1e-13 over [2^-52, 1 - 2^-52]. Inputs are clamped to that
/// range before inversion.
double norm_quantile(double p);

double norm_cdf(double x);
double norm_pdf(double x);

}  // namespace trmpc
