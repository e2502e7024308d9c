#pragma once

namespace varagg {

// Complementary error function for t >= 0, via erfc(t) = Q(1/2, t^2).
double erfc_reg(double t);
double log_erfc_reg(double t);

// Regularized upper incomplete gamma Q(a, t) = Gamma(a, t) / Gamma(a).
double upper_gamma_reg(double a, double t);
double log_upper_gamma_reg(double a, double t);

// Variants taking a precomputed lgamma(a); lgamma itself is not thread-safe on all libcs.
double upper_gamma_reg(double a, double t, double lgamma_a);
double log_upper_gamma_reg(double a, double t, double lgamma_a);

double lgamma_safe(double a);

}  // namespace varagg
