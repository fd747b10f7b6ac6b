#include "uep/fading.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "uep/quadrature.hpp"
#include "uep/special.hpp"

namespace uep {

namespace {

void require(bool ok, const char* what) {
  if (!ok) throw std::domain_error(what);
}

bool is_supported_order(int m_order) {
  return m_order >= 2 && (m_order & (m_order - 1)) == 0;
}

// log of (t/(2b))^{m-1/2} * I_{m-1/2}(b t) for t > 0, b >= 0. The two
// factors separately overflow/underflow long before their product does, so
// they are combined in the log domain. b -> 0 is a removable limit:
//   (t/(2b))^nu I_nu(b t) -> (t^2/4)^nu / Gamma(nu+1),  nu = m - 1/2.
double log_scaled_bessel_kernel(double m, double b, double t) {
  const double nu = m - 0.5;
  if (b * t < 1e-290)
    return 2.0 * nu * std::log(0.5 * t) - std::lgamma(nu + 1.0);
  return nu * (std::log(t) - std::log(2.0 * b)) + log_bessel_i(nu, b * t);
}

// log density of Gamma(shape, scale) at x > 0.
double log_gamma_pdf(double shape, double scale, double x) {
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
         shape * std::log(scale);
}

}  // namespace

void FadingParams::validate() const {
  require(m >= 0.5, "fading figure m must be >= 1/2");
  require(omega1 > 0.0 && omega2 > 0.0, "branch powers must be positive");
  require(rho >= 0.0 && rho < 1.0, "power correlation must lie in [0, 1)");
}

void SnrBranchParams::validate() const {
  require(gbar1 > 0.0 && gbar2 > 0.0, "branch average SNRs must be positive");
}

void BivariateGammaParams::validate() const {
  require(alpha_shape > 0.0, "gamma shape must be positive");
  require(beta1_scale > 0.0 && beta2_scale > 0.0,
          "gamma scales must be positive");
  require(rho >= 0.0 && rho < 1.0, "correlation must lie in [0, 1)");
}

double bivariate_gamma_pdf(const BivariateGammaParams& p, double x1,
                           double x2) {
  p.validate();
  require(x1 >= 0.0 && x2 >= 0.0, "bivariate gamma support is x1, x2 >= 0");
  const double a = p.alpha_shape;

  if (x1 == 0.0 || x2 == 0.0) {
    // The (x1 x2)^{(a-1)/2} factor decides the boundary behaviour; the
    // Bessel kernel contributes the matching power so the product behaves
    // like (x1 x2)^{a-1}.
    if (a > 1.0) return 0.0;
    if (a < 1.0) return std::numeric_limits<double>::infinity();
    return std::exp(-(x1 / p.beta1_scale + x2 / p.beta2_scale) /
                    (1.0 - p.rho)) /
           ((1.0 - p.rho) * p.beta1_scale * p.beta2_scale);
  }

  if (p.rho == 0.0)
    return std::exp(log_gamma_pdf(a, p.beta1_scale, x1) +
                    log_gamma_pdf(a, p.beta2_scale, x2));

  const double one_m_rho = 1.0 - p.rho;
  const double z =
      2.0 * std::sqrt(p.rho * x1 * x2 / (p.beta1_scale * p.beta2_scale)) /
      one_m_rho;
  const double logf =
      0.5 * (a - 1.0) * (std::log(x1) + std::log(x2) - std::log(p.rho)) -
      std::log(one_m_rho) - std::lgamma(a) -
      0.5 * (a + 1.0) * (std::log(p.beta1_scale) + std::log(p.beta2_scale)) -
      (x1 / p.beta1_scale + x2 / p.beta2_scale) / one_m_rho +
      log_bessel_i(a - 1.0, z);
  return std::exp(logf);
}

double nakagami_envelope_pdf(double m, double omega, double r) {
  require(m >= 0.5, "fading figure m must be >= 1/2");
  require(omega > 0.0, "average power must be positive");
  require(r >= 0.0, "envelope support is r >= 0");
  if (r == 0.0) {
    if (m > 0.5) return 0.0;
    return std::sqrt(2.0 / (kPi * omega));  // m = 1/2: half-normal at origin
  }
  const double logp = std::log(2.0) + m * std::log(m) +
                      (2.0 * m - 1.0) * std::log(r) - std::lgamma(m) -
                      m * std::log(omega) - m * r * r / omega;
  return std::exp(logp);
}

double combined_envelope_pdf(const FadingParams& fp, double rt) {
  fp.validate();
  require(rt >= 0.0, "envelope support is rt >= 0");
  if (rt == 0.0) return 0.0;  // leading rt factor

  const double s1 = fp.sigma1();
  const double s2 = fp.sigma2();
  const double denom = 2.0 * s1 * s2 * (1.0 - fp.rho);
  const double a = (s1 + s2) / denom;
  const double b =
      std::sqrt((s1 - s2) * (s1 - s2) + 4.0 * s1 * s2 * fp.rho) / denom;
  const double u = rt * rt;

  const double logp = std::log(2.0) + 0.5 * std::log(kPi) + std::log(rt) -
                      std::lgamma(fp.m) -
                      fp.m * std::log(s1 * s2 * (1.0 - fp.rho)) +
                      log_scaled_bessel_kernel(fp.m, b, u) - a * u;
  return std::exp(logp);
}

double combined_snr_pdf(const SnrBranchParams& sp, double m, double rho,
                        double g) {
  sp.validate();
  require(m >= 0.5, "fading figure m must be >= 1/2");
  require(rho >= 0.0 && rho < 1.0, "power correlation must lie in [0, 1)");
  require(g >= 0.0, "SNR support is g >= 0");

  const double g1 = sp.gbar1;
  const double g2 = sp.gbar2;
  const double one_m_rho = 1.0 - rho;
  if (g == 0.0) {
    if (m > 0.5) return 0.0;
    return 0.5 / std::sqrt(g1 * g2 * one_m_rho);  // m = 1/2 boundary value
  }

  const double denom = 2.0 * g1 * g2 * one_m_rho;
  const double a = m * (g1 + g2) / denom;
  const double b =
      m * std::sqrt((g1 - g2) * (g1 - g2) + 4.0 * g1 * g2 * rho) / denom;

  const double logp = 0.5 * std::log(kPi) - std::lgamma(m) +
                      m * std::log(m * m / (g1 * g2 * one_m_rho)) +
                      log_scaled_bessel_kernel(m, b, g) - a * g;
  return std::exp(logp);
}

double reduced_snr_pdf_m1(double gbar, double rho, double g) {
  require(gbar > 0.0, "average SNR must be positive");
  require(rho >= 0.0 && rho < 1.0, "power correlation must lie in [0, 1)");
  require(g >= 0.0, "SNR support is g >= 0");

  const double u = g / (gbar * (1.0 - rho));
  const double eps = std::sqrt(rho);
  const double x = u * eps;
  if (x < 1e-4) {
    // sinh(x)/x series keeps the rho -> 0 limit exact: the density tends to
    // the two-branch equal-power chi-square form u e^{-u} / gbar.
    const double sinhc = 1.0 + x * x / 6.0 + x * x * x * x / 120.0;
    return std::exp(-u) * u * sinhc / gbar;
  }
  // exp(-u) sinh(x) without forming a huge sinh: x <= u, so both exponents
  // are nonpositive and the second term is negligible for large x.
  return 0.5 * (std::exp(x - u) - std::exp(-x - u)) / (eps * gbar);
}

double mgf(const SnrBranchParams& sp, double m, double rho, double s) {
  sp.validate();
  require(m >= 0.5, "fading figure m must be >= 1/2");
  require(rho >= 0.0 && rho < 1.0, "power correlation must lie in [0, 1)");

  const double bracket = 1.0 - (sp.gbar1 + sp.gbar2) / m * s +
                         (1.0 - rho) * sp.gbar1 * sp.gbar2 / (m * m) * s * s;
  if (!(bracket > 0.0))
    throw std::domain_error("MGF bracket nonpositive at s = " +
                            std::to_string(s) +
                            "; the transform only exists for s <= 0");
  return std::pow(bracket, -m);
}

double avg_error_prob_mpsk(const SnrBranchParams& sp, double m, double rho,
                           int m_order) {
  sp.validate();
  require(is_supported_order(m_order),
          "constellation order must be a power of two >= 2");
  const double gfac = std::sin(kPi / m_order) * std::sin(kPi / m_order);
  const auto integrand = [&](double theta) {
    const double s2 = std::sin(theta) * std::sin(theta);
    return mgf(sp, m, rho, -gfac / s2);
  };
  const double upper = (m_order - 1.0) * kPi / m_order;
  const QuadratureResult r = integrate(integrand, 0.0, upper, 1e-8);
  return r.value / kPi;
}

ClampedProb miyagaki_error_prob(double m, double k_corr, double gbar,
                                int m_order, double eps_m) {
  require(m >= 0.5, "fading figure m must be >= 1/2");
  require(k_corr >= 0.0 && k_corr < 1.0,
          "power correlation must lie in [0, 1)");
  require(gbar > 0.0, "average SNR must be positive");
  require(is_supported_order(m_order),
          "constellation order must be a power of two >= 2");
  require(eps_m > 0.0, "normalization eps_m must be positive");

  const double sin2 = std::sin(kPi / m_order) * std::sin(kPi / m_order);
  const double logv = log_gamma(2.0 * m + 0.5) - std::log(eps_m) -
                      0.5 * std::log(kPi) - log_gamma(2.0 * m + 1.0) -
                      m * std::log1p(-k_corr * k_corr) +
                      2.0 * m * std::log(m / (gbar * sin2));
  if (logv > 0.0) return {1.0, true};
  return {std::exp(logv), false};
}

double nakagami_integration_bound(double m, double omega) {
  // Power variable r^2 ~ Gamma(m, omega/m): mean omega, sd omega/sqrt(m).
  return std::sqrt(omega * (1.0 + 40.0 / std::sqrt(m)));
}

double envelope_integration_bound(const FadingParams& fp) {
  const double mean_u = fp.omega1 + fp.omega2;
  const double var_u = (fp.omega1 * fp.omega1 + fp.omega2 * fp.omega2 +
                        2.0 * fp.rho * fp.omega1 * fp.omega2) /
                       fp.m;
  return std::sqrt(mean_u + 40.0 * std::sqrt(var_u));
}

double snr_integration_bound(const SnrBranchParams& sp, double m, double rho) {
  const double mean = sp.gbar1 + sp.gbar2;
  const double var = (sp.gbar1 * sp.gbar1 + sp.gbar2 * sp.gbar2 +
                      2.0 * rho * sp.gbar1 * sp.gbar2) /
                     m;
  return mean + 40.0 * std::sqrt(var);
}

}  // namespace uep
