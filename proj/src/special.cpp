#include "uep/special.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace uep {

namespace {

// Largest argument for which tgamma still returns a finite double.
constexpr double kGammaOverflowArg = 171.624;

// Ascending series sum(k) (x/2)^(2k+nu) / (k! Gamma(k+nu+1)), evaluated as
// log(t0) + log(sum of ratios). Every term is positive, so there is no
// cancellation; the running sum is rescaled periodically to dodge overflow.
// Converges for any x but needs O(x) terms, so it serves as the small-x
// branch and as the fallback when the asymptotic expansion cannot reach
// tolerance.
double log_series(double nu, double x) {
  const double q = 0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  double log_scale = 0.0;
  for (int k = 0; k < 100000; ++k) {
    term *= q / ((k + 1.0) * (k + nu + 1.0));
    sum += term;
    if (term < sum * 1e-18) break;
    if (sum > 1e250) {
      log_scale += std::log(sum);
      term /= sum;
      sum = 1.0;
    }
  }
  return nu * std::log(0.5 * x) - std::lgamma(nu + 1.0) + log_scale +
         std::log(sum);
}

// Large-argument expansion I_nu(x) ~ e^x / sqrt(2 pi x) * sum(k) t_k with
// t_k = t_{k-1} * -(4 nu^2 - (2k-1)^2) / (8 k x). The series is divergent;
// we stop at the smallest term and report failure if it never gets small.
double log_asymptotic(double nu, double x, bool& converged) {
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  double prev_mag = 1.0;
  converged = false;
  for (int k = 1; k <= 50; ++k) {
    term *= -(mu - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * k * x);
    const double mag = std::fabs(term);
    if (mag >= prev_mag) break;  // past the smallest term; stop adding
    sum += term;
    prev_mag = mag;
    if (mag < 1e-17 * std::fabs(sum)) {
      converged = true;
      break;
    }
  }
  if (!(sum > 0.0)) converged = false;
  return x - 0.5 * std::log(2.0 * kPi * x) + std::log(sum);
}

}  // namespace

double gamma_fn(double x) {
  if (!(x > 0.0))
    throw std::domain_error("gamma_fn requires x > 0, got " +
                            std::to_string(x));
  if (x > kGammaOverflowArg)
    throw std::overflow_error("gamma_fn(" + std::to_string(x) +
                              ") exceeds double range");
  return std::tgamma(x);
}

double log_gamma(double x) {
  if (!(x > 0.0))
    throw std::domain_error("log_gamma requires x > 0, got " +
                            std::to_string(x));
  return std::lgamma(x);
}

double log_bessel_i(double nu, double x) {
  if (!(nu >= -0.5))
    throw std::domain_error("log_bessel_i requires nu >= -1/2, got " +
                            std::to_string(nu));
  if (!(x >= 0.0))
    throw std::domain_error("log_bessel_i requires x >= 0, got " +
                            std::to_string(x));
  if (x == 0.0) {
    if (nu == 0.0) return 0.0;  // I_0(0) = 1
    return nu > 0.0 ? -std::numeric_limits<double>::infinity()
                    : std::numeric_limits<double>::infinity();
  }
  if (x > 50.0) {
    bool ok = false;
    const double v = log_asymptotic(nu, x, ok);
    if (ok) return v;
  }
  return log_series(nu, x);
}

double bessel_i(double nu, double x) {
  const double lv = log_bessel_i(nu, x);
  if (lv > 709.0)
    throw std::overflow_error("bessel_i(" + std::to_string(nu) + ", " +
                              std::to_string(x) + ") exceeds double range");
  return std::exp(lv);
}

}  // namespace uep
