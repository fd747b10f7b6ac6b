#pragma once

namespace uep {

// Correlated two-branch Nakagami-m fading model. Both branches share the
// fading figure m; omega1/omega2 are the average powers E[r_d^2] and rho is
// the power correlation corr(r1^2, r2^2).
struct FadingParams {
  double m = 1.0;
  double omega1 = 1.0;
  double omega2 = 1.0;
  double rho = 0.0;

  void validate() const;  // throws std::domain_error on violation

  // Per-branch gamma scale of the squared envelope: E[r_d^2] / m.
  double sigma1() const { return omega1 / m; }
  double sigma2() const { return omega2 / m; }
};

// Average SNR per symbol of the two branches (linear, not dB).
struct SnrBranchParams {
  double gbar1 = 1.0;
  double gbar2 = 1.0;

  void validate() const;
};

// Correlated bivariate gamma (Kibble) with common shape and per-axis scales.
struct BivariateGammaParams {
  double alpha_shape = 1.0;
  double beta1_scale = 1.0;
  double beta2_scale = 1.0;
  double rho = 0.0;

  void validate() const;
};

// Probability that had to be clamped into [0, 1] keeps a record of the fact.
struct ClampedProb {
  double value = 0.0;
  bool clamped = false;
};

// Joint density of the correlated gamma pair at (x1, x2), x_d >= 0.
// Evaluated in the log domain; rho = 0 falls back to the exact product of
// the two marginal gamma densities (the Bessel kernel degenerates there).
double bivariate_gamma_pdf(const BivariateGammaParams& p, double x1, double x2);

// Single-branch Nakagami-m envelope density
//   2 m^m r^{2m-1} / (Gamma(m) Omega^m) * exp(-m r^2 / Omega).
double nakagami_envelope_pdf(double m, double omega, double r);

// Density of the combined envelope r_t = sqrt(r1^2 + r2^2) of the two
// correlated branches. Log-domain throughout: the Bessel factor grows like
// e^{b r^2} against the e^{-a r^2} envelope and must never be formed alone.
double combined_envelope_pdf(const FadingParams& fp, double rt);

// Density of the combined SNR per symbol, i.e. the sum of the two branch
// SNRs with averages sp.gbar1/sp.gbar2, fading figure m, power correlation
// rho. Same kernel as combined_envelope_pdf in the SNR variable.
double combined_snr_pdf(const SnrBranchParams& sp, double m, double rho,
                        double g);

// m = 1, equal-average special case of combined_snr_pdf in closed form:
//   exp(-u) * sinh(u sqrt(rho)) / (sqrt(rho) * gbar),  u = g / (gbar (1-rho)).
// This is the difference-of-exponentials form rewritten so that rho -> 0 is
// a removable limit (handled by a short series) instead of 0/0.
double reduced_snr_pdf_m1(double gbar, double rho, double g);

// Moment generating function E[e^{s*gamma_t}] of the combined SNR:
//   [1 - ((gbar1+gbar2)/m) s + ((1-rho) gbar1 gbar2 / m^2) s^2]^{-m}.
// Valid wherever the bracket is positive (always true for s <= 0); throws
// std::domain_error otherwise.
double mgf(const SnrBranchParams& sp, double m, double rho, double s);

// Average M-PSK symbol error probability over the combined-SNR fading law,
// via the single-integral MGF form:
//   (1/pi) * Int_0^{(M-1)pi/M} mgf(-sin^2(pi/M) / sin^2(theta)) dtheta.
// Adaptive quadrature to 1e-8 absolute; non-convergence propagates with the
// achieved tolerance attached.
double avg_error_prob_mpsk(const SnrBranchParams& sp, double m, double rho,
                           int m_order);

// High-SNR asymptotic error probability for the correlated pair:
//   Gamma(2m+1/2) / (eps_m sqrt(pi) Gamma(2m+1)) * (1-k^2)^{-m}
//     * [m / (gbar sin^2(pi/M))]^{2m}.
// eps_m is a caller-supplied normalization (default 1). The asymptote can
// exceed 1 at low SNR; the result is clamped with the flag set.
ClampedProb miyagaki_error_prob(double m, double k_corr, double gbar,
                                int m_order, double eps_m = 1.0);

// Truncation points for normalization/moment integrals: mean of the power
// variable plus 40 standard deviations (envelopes take the square root).
// The densities decay at least exponentially in the power variable, so the
// tail mass beyond these bounds is far below every tolerance used here.
double nakagami_integration_bound(double m, double omega);
double envelope_integration_bound(const FadingParams& fp);
double snr_integration_bound(const SnrBranchParams& sp, double m, double rho);

}  // namespace uep
