#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "uep/fading.hpp"
#include "uep/quadrature.hpp"
#include "uep/special.hpp"

namespace {

// Exact bit error probability of coherent BPSK with two-branch maximal-ratio
// combining over independent Rayleigh fading, per-branch average SNR gc.
// Standard diversity closed form, used as an independent oracle for the
// MGF-route integral at m = 1, rho = 0, equal branch averages.
double mrc2_bpsk_oracle(double gc) {
  const double mu = std::sqrt(gc / (1.0 + gc));
  const double p = 0.5 * (1.0 - mu);
  return p * p * (2.0 + mu);
}

double gamma_pdf(double shape, double scale, double x) {
  return std::pow(x, shape - 1.0) * std::exp(-x / scale) /
         (std::tgamma(shape) * std::pow(scale, shape));
}

}  // namespace

TEST_CASE("nakagami envelope density") {
  SUBCASE("m=1 reduces to Rayleigh pointwise") {
    for (double r : {0.3, 1.0, 2.0}) {
      const double rayleigh = 2.0 * r * std::exp(-r * r);
      CHECK(uep::nakagami_envelope_pdf(1.0, 1.0, r) ==
            doctest::Approx(rayleigh).epsilon(1e-10));
    }
  }
  SUBCASE("normalizes for fractional m") {
    const double hi = uep::nakagami_integration_bound(2.5, 3.0);
    auto r = uep::integrate(
        [](double x) { return uep::nakagami_envelope_pdf(2.5, 3.0, x); }, 0.0,
        hi);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("second moment equals the average power") {
    const double hi = uep::nakagami_integration_bound(1.5, 2.0);
    auto r = uep::integrate(
        [](double x) {
          return x * x * uep::nakagami_envelope_pdf(1.5, 2.0, x);
        },
        0.0, hi);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
  }
  SUBCASE("parameter validation") {
    CHECK_THROWS_AS(uep::nakagami_envelope_pdf(0.4, 1.0, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(uep::nakagami_envelope_pdf(1.0, -1.0, 1.0),
                    std::domain_error);
    CHECK_THROWS_AS(uep::nakagami_envelope_pdf(1.0, 1.0, -0.1),
                    std::domain_error);
  }
}

TEST_CASE("bivariate gamma density") {
  SUBCASE("weak correlation factorizes into the marginals") {
    uep::BivariateGammaParams p{2.0, 1.0, 1.5, 1e-8};
    const double joint = uep::bivariate_gamma_pdf(p, 1.0, 2.0);
    const double prod = gamma_pdf(2.0, 1.0, 1.0) * gamma_pdf(2.0, 1.5, 2.0);
    CHECK(joint == doctest::Approx(prod).epsilon(1e-6));
  }
  SUBCASE("rho equal to zero is the exact product") {
    uep::BivariateGammaParams p{2.0, 1.0, 1.5, 0.0};
    const double joint = uep::bivariate_gamma_pdf(p, 1.0, 2.0);
    const double prod = gamma_pdf(2.0, 1.0, 1.0) * gamma_pdf(2.0, 1.5, 2.0);
    CHECK(joint == doctest::Approx(prod).epsilon(1e-12));
  }
  SUBCASE("vanishes on the axes for shape above one") {
    uep::BivariateGammaParams p{2.0, 1.0, 1.0, 0.3};
    CHECK(uep::bivariate_gamma_pdf(p, 0.0, 1.0) == 0.0);
    CHECK(uep::bivariate_gamma_pdf(p, 1.0, 0.0) == 0.0);
  }
  SUBCASE("shape one is positive on the axes") {
    uep::BivariateGammaParams p{1.0, 1.0, 1.0, 0.3};
    CHECK(uep::bivariate_gamma_pdf(p, 0.0, 1.0) > 0.0);
  }
  SUBCASE("normalizes over the truncated quadrant") {
    uep::BivariateGammaParams p{2.0, 1.0, 1.0, 0.3};
    auto outer = uep::integrate(
        [&](double x1) {
          return uep::integrate(
                     [&](double x2) {
                       return uep::bivariate_gamma_pdf(p, x1, x2);
                     },
                     0.0, 50.0, 1e-10)
              .value;
        },
        0.0, 50.0, 1e-8);
    CHECK(outer.value == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("combined envelope density") {
  SUBCASE("vanishes at the origin") {
    uep::FadingParams fp{1.0, 1.0, 1.0, 0.5};
    CHECK(uep::combined_envelope_pdf(fp, 0.0) == 0.0);
  }
  SUBCASE("normalizes") {
    uep::FadingParams fp{1.0, 1.0, 1.0, 0.5};
    const double hi = uep::envelope_integration_bound(fp);
    auto r = uep::integrate(
        [&](double x) { return uep::combined_envelope_pdf(fp, x); }, 0.0, hi);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("no overflow far into the tail") {
    uep::FadingParams fp{4.0, 1.0, 1.0, 0.9};
    const double far = 10.0 * std::sqrt(fp.omega1 + fp.omega2);
    const double v = uep::combined_envelope_pdf(fp, far);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
  SUBCASE("mean power equals the sum of branch powers") {
    uep::FadingParams fp{2.0, 1.5, 0.5, 0.3};
    const double hi = uep::envelope_integration_bound(fp);
    auto r = uep::integrate(
        [&](double x) { return x * x * uep::combined_envelope_pdf(fp, x); },
        0.0, hi);
    CHECK(r.value == doctest::Approx(2.0).epsilon(1e-6));
  }
}

TEST_CASE("combined SNR density") {
  SUBCASE("normalizes") {
    uep::SnrBranchParams sp{2.0, 2.0};
    const double hi = uep::snr_integration_bound(sp, 1.0, 0.4);
    auto r = uep::integrate(
        [&](double g) { return uep::combined_snr_pdf(sp, 1.0, 0.4, g); }, 0.0,
        hi);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  }
  SUBCASE("mean equals the sum of branch averages") {
    uep::SnrBranchParams sp{1.0, 3.0};
    const double hi = uep::snr_integration_bound(sp, 1.0, 0.3);
    auto r = uep::integrate(
        [&](double g) { return g * uep::combined_snr_pdf(sp, 1.0, 0.3, g); },
        0.0, hi);
    CHECK(r.value == doctest::Approx(4.0).epsilon(1e-5));
  }
  SUBCASE("matches the m=1 equal-average closed form pointwise") {
    uep::SnrBranchParams sp{2.0, 2.0};
    for (double g : {0.1, 0.5, 1.0, 2.0, 5.0, 10.0}) {
      const double full = uep::combined_snr_pdf(sp, 1.0, 0.4, g);
      const double reduced = uep::reduced_snr_pdf_m1(2.0, 0.4, g);
      CHECK(full == doctest::Approx(reduced).epsilon(1e-8));
    }
  }
}

TEST_CASE("reduced m=1 SNR density") {
  SUBCASE("normalizes") {
    const double hi =
        uep::snr_integration_bound(uep::SnrBranchParams{1.0, 1.0}, 1.0, 0.25);
    auto r = uep::integrate(
        [](double g) { return uep::reduced_snr_pdf_m1(1.0, 0.25, g); }, 0.0,
        hi);
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
  }
  SUBCASE("vanishing correlation tends to the two-branch chi-square form") {
    const double got = uep::reduced_snr_pdf_m1(1.0, 1e-6, 1.0);
    const double want = 1.0 * std::exp(-1.0);  // (g/gbar^2) e^{-g/gbar}
    CHECK(std::fabs(got - want) < 1e-4);
    // rho = 0 exactly is the removable limit, handled by the series branch
    CHECK(uep::reduced_snr_pdf_m1(1.0, 0.0, 1.0) ==
          doctest::Approx(want).epsilon(1e-12));
  }
  SUBCASE("zero at the origin") {
    CHECK(uep::reduced_snr_pdf_m1(1.0, 0.25, 0.0) == 0.0);
  }
  SUBCASE("stable deep in the tail") {
    const double v = uep::reduced_snr_pdf_m1(1.0, 0.99, 500.0);
    CHECK(std::isfinite(v));
    CHECK(v >= 0.0);
  }
}

TEST_CASE("moment generating function") {
  SUBCASE("unity at s = 0") {
    CHECK(uep::mgf({1.0, 1.0}, 1.0, 0.0, 0.0) == 1.0);
    CHECK(uep::mgf({3.0, 0.5}, 2.5, 0.7, 0.0) == 1.0);
  }
  SUBCASE("hand value at s = -1") {
    // m=1, both averages 1, rho=0: [1 + 2 + 1]^-1
    CHECK(uep::mgf({1.0, 1.0}, 1.0, 0.0, -1.0) == doctest::Approx(0.25));
  }
  SUBCASE("rejects arguments where the bracket closes") {
    // m=1, gbar=1,1, rho=0: bracket (1-s)^2 hits zero at s = 1
    CHECK_THROWS_AS(uep::mgf({1.0, 1.0}, 1.0, 0.0, 1.0), std::domain_error);
  }
  SUBCASE("equals the integrated transform of the density") {
    struct Tuple {
      double m, rho, g1, g2;
    };
    const Tuple tuples[] = {{1.0, 0.3, 2.0, 2.0}, {2.0, 0.5, 1.0, 3.0}};
    for (const auto& t : tuples) {
      uep::SnrBranchParams sp{t.g1, t.g2};
      const double hi = uep::snr_integration_bound(sp, t.m, t.rho);
      for (double s : {-0.5, -1.0, -2.0}) {
        const double closed = uep::mgf(sp, t.m, t.rho, s);
        auto integ = uep::integrate(
            [&](double g) {
              return std::exp(s * g) * uep::combined_snr_pdf(sp, t.m, t.rho, g);
            },
            0.0, hi);
        CHECK(std::fabs(closed - integ.value) < 1e-5);
      }
    }
  }
}

TEST_CASE("average error probability over fading") {
  SUBCASE("matches two-branch MRC BPSK closed form") {
    for (double gc : {1.0, 5.0, 20.0}) {
      const double got = uep::avg_error_prob_mpsk({gc, gc}, 1.0, 0.0, 2);
      CHECK(got == doctest::Approx(mrc2_bpsk_oracle(gc)).epsilon(1e-6));
    }
  }
  SUBCASE("monotone decreasing in average SNR") {
    double prev = 1.0;
    for (int i = 0; i <= 20; ++i) {
      const double snr_db = 1.5 * i;  // 0 to 30 dB
      const double g = std::pow(10.0, snr_db / 10.0);
      const double pe = uep::avg_error_prob_mpsk({g, g}, 1.0, 0.3, 4);
      CHECK(pe < prev);
      CHECK(pe > 0.0);
      CHECK(pe < 1.0);
      prev = pe;
    }
  }
  SUBCASE("monotone increasing in branch correlation") {
    const double lo = uep::avg_error_prob_mpsk({10.0, 10.0}, 1.0, 0.1, 4);
    const double hi = uep::avg_error_prob_mpsk({10.0, 10.0}, 1.0, 0.8, 4);
    CHECK(hi > lo);
  }
  SUBCASE("order validation") {
    CHECK_THROWS_AS(uep::avg_error_prob_mpsk({1.0, 1.0}, 1.0, 0.0, 3),
                    std::domain_error);
    CHECK_THROWS_AS(uep::avg_error_prob_mpsk({1.0, 1.0}, 1.0, 0.0, 1),
                    std::domain_error);
  }
}

TEST_CASE("asymptotic error probability") {
  SUBCASE("doubling the SNR scales by 2^(-2m) exactly") {
    for (double m : {0.5, 1.0, 2.0}) {
      const double p1 = uep::miyagaki_error_prob(m, 0.3, 50.0, 4).value;
      const double p2 = uep::miyagaki_error_prob(m, 0.3, 100.0, 4).value;
      CHECK(p2 == doctest::Approx(p1 * std::pow(2.0, -2.0 * m))
                      .epsilon(1e-12));
    }
  }
  SUBCASE("zero correlation drops the correlation factor") {
    const double with = uep::miyagaki_error_prob(1.0, 0.0, 50.0, 4).value;
    const double factor_free =
        uep::gamma_fn(2.5) / (std::sqrt(uep::kPi) * uep::gamma_fn(3.0)) *
        std::pow(1.0 / (50.0 * std::pow(std::sin(uep::kPi / 4.0), 2.0)), 2.0);
    CHECK(with == doctest::Approx(factor_free).epsilon(1e-12));
  }
  SUBCASE("clamps at low SNR") {
    const auto r = uep::miyagaki_error_prob(1.0, 0.3, 0.01, 4);
    CHECK(r.clamped);
    CHECK(r.value == 1.0);
  }
  SUBCASE("high-SNR ratio against the exact integral (logged only)") {
    const double exact = uep::avg_error_prob_mpsk({1000.0, 1000.0}, 1.0, 0.3, 4);
    const double asym = uep::miyagaki_error_prob(1.0, 0.3, 1000.0, 4).value;
    MESSAGE("asymptote/exact ratio at 30 dB: ", asym / exact);
    CHECK(asym > 0.0);  // the ratio itself is informational, not asserted
  }
}

TEST_CASE("density evaluation is deterministic") {
  uep::SnrBranchParams sp{1.7, 2.9};
  const double a = uep::combined_snr_pdf(sp, 2.0, 0.6, 3.14);
  const double b = uep::combined_snr_pdf(sp, 2.0, 0.6, 3.14);
  CHECK(a == b);
}
