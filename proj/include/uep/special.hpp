#pragma once

#include <cmath>

namespace uep {

inline constexpr double kPi = 3.14159265358979323846;

// Gamma function for x > 0. Throws std::domain_error at or below zero and
// std::overflow_error past ~171.62 where the double result would be inf.
double gamma_fn(double x);

// log Gamma(x) for x > 0.
double log_gamma(double x);

// Modified Bessel function of the first kind, order nu >= -1/2, x >= 0.
// Evaluated in the log domain throughout so arguments in the hundreds
// (exponents like e^x with x ~ 700) stay finite where the density they
// appear in is finite after the surrounding exp(-...) factor.
double log_bessel_i(double nu, double x);

// exp(log_bessel_i); throws std::overflow_error when the value exceeds
// the double range.
double bessel_i(double nu, double x);

// Gaussian tail probability Q(x) = P(N(0,1) > x).
inline double q_func(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

}  // namespace uep
