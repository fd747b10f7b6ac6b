#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "uep/fading.hpp"
#include "uep/phy.hpp"
#include "uep/rng.hpp"
#include "uep/special.hpp"

using namespace uep;

namespace {

// Exact bit error rate of Gray-labelled L-PAM per axis, with u the ratio of
// the half level spacing to the per-axis noise standard deviation. Closed
// form below is the standard exact expression for reflected-Gray labelling;
// the 2-PAM and 4-PAM specializations are re-derived by hand in the tests to
// guard against transcription mistakes.
double pam_gray_ber(int levels, double u) {
  int k = 0;
  while ((1 << k) < levels) ++k;
  double sum = 0.0;
  for (int i = 1; i <= k; ++i) {
    const int terms = ((levels - (levels >> i)) - 1);
    double pi_sum = 0.0;
    for (int j = 0; j <= terms; ++j) {
      const int step = j * (1 << (i - 1));
      const int sign = (step / levels) % 2 == 0 ? 1 : -1;
      const int weight = (1 << (i - 1)) - (2 * step + levels) / (2 * levels);
      pi_sum += sign * weight * q_func((2.0 * j + 1.0) * u);
    }
    sum += 2.0 * pi_sum / levels;
  }
  return sum / k;
}

// Per-bit AWGN error rate for unit-energy square QAM at linear symbol SNR.
double qam_awgn_ber(int order, double snr_lin) {
  int levels = 2;
  while (levels * levels < order) levels <<= 1;
  const double scale =
      std::sqrt(3.0 / (2.0 * (static_cast<double>(levels) * levels - 1.0)));
  return pam_gray_ber(levels, scale * std::sqrt(2.0 * snr_lin));
}

std::vector<uint8_t> random_bits(std::uint64_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<uint8_t> bits;
  rng.next_bits(bits, n);
  return bits;
}

double ks_statistic_exp1(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = 1.0 - std::exp(-samples[i]);
    d = std::max(d, std::abs((i + 1) / n - cdf));
    d = std::max(d, std::abs(i / n - cdf));
  }
  return d;
}

double pearson_corr(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, syy = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / std::sqrt(sxx * syy);
}

McsProfile make_profile(const char* name, int order) {
  McsProfile p;
  p.name = name;
  p.modulation_order = order;
  p.bits_per_symbol = order == 4 ? 2 : (order == 16 ? 4 : 6);
  p.code_rate = {1, 2};
  p.beta = 1.0;
  return p;
}

BlockPartition contiguous_partition(const OfdmConfig& cfg, int audio_order,
                                    int video_order) {
  BlockPartition part;
  for (int i = 0; i < cfg.n_audio_subcarriers; ++i)
    part.audio_indices.push_back(i);
  for (int i = cfg.n_audio_subcarriers; i < cfg.n_data_subcarriers(); ++i)
    part.video_indices.push_back(i);
  part.audio_mcs = make_profile("audio", audio_order);
  part.video_mcs = make_profile("video", video_order);
  return part;
}

}  // namespace

TEST_CASE("gray qam mapping basics") {
  SUBCASE("closed-form pam ber matches hand-derived specials") {
    for (double g : {1.0, 3.1622776601683795, 10.0, 31.622776601683793}) {
      // 2-PAM per axis at half spacing u: plain threshold error Q(u).
      const double u2 = std::sqrt(g);
      CHECK(pam_gray_ber(2, u2) == doctest::Approx(q_func(u2)).epsilon(1e-12));
      // 4-PAM with Gray labels, averaged over both bits.
      const double u4 = std::sqrt(g / 5.0);
      const double hand = 0.75 * q_func(u4) + 0.5 * q_func(3.0 * u4) -
                          0.25 * q_func(5.0 * u4);
      CHECK(pam_gray_ber(4, u4) == doctest::Approx(hand).epsilon(1e-12));
    }
  }

  SUBCASE("unit average energy for every order") {
    for (int order : {4, 16, 64}) {
      const int bps = order == 4 ? 2 : (order == 16 ? 4 : 6);
      std::vector<uint8_t> bits;
      for (int word = 0; word < order; ++word)
        for (int b = bps - 1; b >= 0; --b)
          bits.push_back(static_cast<uint8_t>((word >> b) & 1));
      const auto syms = map_symbols(bits, order);
      REQUIRE(syms.size() == static_cast<std::size_t>(order));
      double energy = 0.0;
      for (const auto& s : syms) energy += std::norm(s);
      CHECK(energy / order == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("qpsk anchor point") {
    const auto syms = map_symbols({0, 0}, 4);
    REQUIRE(syms.size() == 1);
    CHECK(syms[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(syms[0].imag() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  }

  SUBCASE("noiseless round trip") {
    for (int order : {4, 16, 64}) {
      const int bps = order == 4 ? 2 : (order == 16 ? 4 : 6);
      const auto bits = random_bits(static_cast<std::uint64_t>(bps) * 1500, 11);
      const auto hat = demap_symbols(map_symbols(bits, order), order);
      CHECK(hat == bits);
    }
  }

  SUBCASE("midpoint ties resolve to the smaller gray label") {
    // QPSK at exactly zero: levels are +/-scale, the tie picks index 0
    // (gray 0), which carries bit 0 on each axis.
    CHECK(demap_symbols({{0.0, 0.0}}, 4) == std::vector<uint8_t>{0, 0});
    // 16QAM: levels sit at {3,1,-1,-3}*scale. 2*scale is halfway between
    // the two positive levels (gray labels 00 and 01 -> 00 wins); 0 is
    // halfway between +/-scale (gray labels 01 and 11 -> 01 wins).
    const double scale = std::sqrt(3.0 / 30.0);
    CHECK(demap_symbols({{2.0 * scale, 2.0 * scale}}, 16) ==
          std::vector<uint8_t>{0, 0, 0, 0});
    CHECK(demap_symbols({{0.0, 0.0}}, 16) == std::vector<uint8_t>{0, 1, 0, 1});
  }

  SUBCASE("input validation") {
    CHECK_THROWS_AS(map_symbols({0, 0}, 8), std::domain_error);
    CHECK_THROWS_AS(map_symbols({0, 0, 0}, 4), std::domain_error);
    CHECK_THROWS_AS(demap_symbols({{0.0, 0.0}}, 32), std::domain_error);
  }
}

TEST_CASE("awgn reference generation matches exact qam analysis") {
  const std::vector<double> grid{4.0, 8.0, 12.0};
  for (int order : {4, 16}) {
    const auto mcs = make_profile(order == 4 ? "qpsk" : "16qam", order);
    const auto table = generate_awgn_ref(mcs, grid, 400000, 77);
    REQUIRE(table.points.size() == grid.size());
    for (const auto& point : table.points) {
      const double expected =
          qam_awgn_ber(order, std::pow(10.0, point.snr_db / 10.0));
      const double sigma = std::sqrt(expected * (1.0 - expected) / 400000.0);
      CHECK(point.floored == false);
      CHECK(std::abs(point.ber - expected) < 4.0 * sigma);
    }
  }

  SUBCASE("zero-error points are floored and flagged") {
    const auto mcs = make_profile("qpsk", 4);
    // 20 dB QPSK has BER ~ 7.7e-24; 10k bits cannot see an error.
    const auto table = generate_awgn_ref(mcs, {0.0, 20.0}, 10000, 5);
    CHECK(table.points[1].floored);
    CHECK(table.points[1].ber == doctest::Approx(0.5 / 10000.0));
    CHECK_FALSE(table.points[0].floored);
  }

  SUBCASE("serial and parallel kernels agree exactly") {
    const auto mcs = make_profile("16qam", 16);
    const auto a = generate_awgn_ref(mcs, grid, 60000, 9);
    const auto b = generate_awgn_ref_serial(mcs, grid, 60000, 9);
    REQUIRE(a.points.size() == b.points.size());
    for (std::size_t i = 0; i < a.points.size(); ++i) {
      CHECK(a.points[i].ber == b.points[i].ber);
      CHECK(a.points[i].floored == b.points[i].floored);
    }
  }
}

TEST_CASE("rayleigh channel statistics") {
  OfdmConfig cfg;
  cfg.validate();

  SUBCASE("single tap is flat and unit power on average") {
    Rng rng(21);
    double mean_power = 0.0;
    double max_ripple = 0.0;
    const int reps = 20000;
    for (int r = 0; r < reps; ++r) {
      const auto ch = rayleigh_channel(cfg, 1, rng);
      for (std::size_t i = 1; i < ch.gains.size(); ++i)
        max_ripple = std::max(max_ripple, std::abs(ch.gains[i] - ch.gains[0]));
      mean_power += std::norm(ch.gains[0]);
    }
    CHECK(max_ripple < 1e-12);
    CHECK(mean_power / reps == doctest::Approx(1.0).epsilon(0.02));
  }

  SUBCASE("block-average gain power is unit within 0.1 dB") {
    Rng rng(22);
    const int reps = 5000;
    double mean_block = 0.0;
    for (int r = 0; r < reps; ++r) {
      const auto ch = rayleigh_channel(cfg, 8, rng);
      double block = 0.0;
      for (const auto& g : ch.gains) block += std::norm(g);
      mean_block += block / static_cast<double>(ch.gains.size());
    }
    mean_block /= reps;
    CHECK(std::abs(10.0 * std::log10(mean_block)) < 0.1);
  }

  SUBCASE("per-subcarrier power is exponential with unit mean") {
    Rng rng(23);
    std::vector<double> samples;
    samples.reserve(10000);
    for (int r = 0; r < 10000; ++r) {
      const auto ch = rayleigh_channel(cfg, 8, rng);
      samples.push_back(std::norm(ch.gains[0]));
    }
    CHECK(ks_statistic_exp1(std::move(samples)) < 0.02);
  }

  SUBCASE("tap count validation") {
    Rng rng(24);
    CHECK_THROWS_AS(rayleigh_channel(cfg, 0, rng), std::domain_error);
  }
}

TEST_CASE("correlated nakagami pair sampling") {
  SUBCASE("marginal moments and power correlation") {
    FadingParams fp;
    fp.m = 1.5;
    fp.omega1 = 2.0;
    fp.omega2 = 0.5;
    fp.rho = 0.5;
    Rng rng(31);
    const std::uint64_t n = 200000;
    const auto pairs = correlated_nakagami_pair(fp, n, rng);
    REQUIRE(pairs.size() == n);
    std::vector<double> p1(n), p2(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      p1[i] = pairs[i].first * pairs[i].first;
      p2[i] = pairs[i].second * pairs[i].second;
    }
    double m1 = 0.0, m2 = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      m1 += p1[i];
      m2 += p2[i];
    }
    CHECK(m1 / n == doctest::Approx(fp.omega1).epsilon(0.02));
    CHECK(m2 / n == doctest::Approx(fp.omega2).epsilon(0.02));
    CHECK(std::abs(pearson_corr(p1, p2) - fp.rho) < 0.02);
  }

  SUBCASE("independent branches when rho is zero") {
    FadingParams fp;
    fp.m = 1.0;
    fp.rho = 0.0;
    Rng rng(32);
    const auto pairs = correlated_nakagami_pair(fp, 100000, rng);
    std::vector<double> p1, p2;
    for (const auto& pr : pairs) {
      p1.push_back(pr.first * pr.first);
      p2.push_back(pr.second * pr.second);
    }
    CHECK(std::abs(pearson_corr(p1, p2)) < 0.02);
  }

  SUBCASE("combined envelope histogram follows the analytic density") {
    FadingParams fp;
    fp.m = 1.0;
    fp.omega1 = 1.0;
    fp.omega2 = 0.5;
    fp.rho = 0.3;
    Rng rng(33);
    const std::uint64_t n = 200000;
    const auto pairs = correlated_nakagami_pair(fp, n, rng);
    const int n_bins = 40;
    const double hi = 4.0;
    const double width = hi / n_bins;
    std::vector<double> hist(n_bins, 0.0);
    for (const auto& pr : pairs) {
      const double r = std::hypot(pr.first, pr.second);
      const int bin = static_cast<int>(r / width);
      if (bin >= 0 && bin < n_bins) hist[bin] += 1.0;
    }
    double sup = 0.0;
    for (int b = 0; b < n_bins; ++b) {
      const double density = hist[b] / (static_cast<double>(n) * width);
      const double center = (b + 0.5) * width;
      sup = std::max(sup, std::abs(density - combined_envelope_pdf(fp, center)));
    }
    CHECK(sup < 0.03);
  }

  SUBCASE("half-integer shape requirement") {
    FadingParams fp;
    fp.m = 1.25;
    Rng rng(34);
    CHECK_THROWS_AS(correlated_nakagami_pair(fp, 1, rng), std::domain_error);
  }
}

TEST_CASE("block ber simulation on awgn matches exact qam analysis") {
  OfdmConfig cfg;
  const auto part = contiguous_partition(cfg, 4, 16);
  ChannelModel model;
  model.kind = ChannelKind::awgn;

  const double snr_db = 10.0;
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  const auto res = simulate_block_ber(cfg, part, snr_db, 800, model, 101);

  const double exp_audio = qam_awgn_ber(4, snr_lin);
  const double exp_video = qam_awgn_ber(16, snr_lin);
  const double sig_audio =
      std::sqrt(exp_audio * (1.0 - exp_audio) / res.audio.bits_sent);
  const double sig_video =
      std::sqrt(exp_video * (1.0 - exp_video) / res.video.bits_sent);
  CHECK(res.audio.bits_sent == 800ull * 52 * 2);
  CHECK(res.video.bits_sent == 800ull * 256 * 4);
  CHECK(std::abs(res.audio.ber - exp_audio) < 4.0 * sig_audio);
  CHECK(std::abs(res.video.ber - exp_video) < 4.0 * sig_video);

  SUBCASE("per-subcarrier snr snapshot is flat at the operating point") {
    REQUIRE(res.per_subcarrier_snrs.size() ==
            static_cast<std::size_t>(cfg.n_data_subcarriers()));
    for (double s : res.per_subcarrier_snrs)
      CHECK(s == doctest::Approx(snr_lin).epsilon(1e-12));
  }

  SUBCASE("confidence interval formula") {
    const auto rec = make_ber_record(0.0, 50, 100);
    CHECK(rec.ber == doctest::Approx(0.5));
    CHECK(rec.ci95_halfwidth == doctest::Approx(1.96 * 0.05).epsilon(1e-12));
  }
}

TEST_CASE("block ber simulation kernels and channel kinds") {
  OfdmConfig cfg;
  cfg.n_audio_subcarriers = 16;
  cfg.n_video_subcarriers = 48;
  const auto part = contiguous_partition(cfg, 4, 16);

  SUBCASE("serial and parallel kernels agree exactly") {
    for (auto kind : {ChannelKind::awgn, ChannelKind::rayleigh,
                      ChannelKind::nakagami_block,
                      ChannelKind::nakagami_combined}) {
      ChannelModel model;
      model.kind = kind;
      model.fading.rho = 0.4;
      const auto a = simulate_block_ber(cfg, part, 8.0, 500, model, 202);
      const auto b = simulate_block_ber_serial(cfg, part, 8.0, 500, model, 202);
      CHECK(a.audio.bit_errors == b.audio.bit_errors);
      CHECK(a.video.bit_errors == b.video.bit_errors);
      CHECK(a.audio.bits_sent == b.audio.bits_sent);
      CHECK(a.video.bits_sent == b.video.bits_sent);
      REQUIRE(a.per_subcarrier_snrs.size() == b.per_subcarrier_snrs.size());
      for (std::size_t i = 0; i < a.per_subcarrier_snrs.size(); ++i)
        CHECK(a.per_subcarrier_snrs[i] == b.per_subcarrier_snrs[i]);
    }
  }

  SUBCASE("block fading puts one flat gain on each class") {
    ChannelModel model;
    model.kind = ChannelKind::nakagami_block;
    model.fading.m = 2.0;
    model.fading.omega2 = 0.5;
    model.fading.rho = 0.2;
    const auto res = simulate_block_ber(cfg, part, 12.0, 3, model, 203);
    const auto& snrs = res.per_subcarrier_snrs;
    for (int i = 1; i < cfg.n_audio_subcarriers; ++i)
      CHECK(snrs[i] == snrs[0]);
    for (int i = cfg.n_audio_subcarriers + 1; i < cfg.n_data_subcarriers(); ++i)
      CHECK(snrs[i] == snrs[cfg.n_audio_subcarriers]);
  }

  SUBCASE("combined fading applies one gain to the whole block") {
    ChannelModel model;
    model.kind = ChannelKind::nakagami_combined;
    model.fading.rho = 0.6;
    const auto res = simulate_block_ber(cfg, part, 12.0, 3, model, 204);
    for (double s : res.per_subcarrier_snrs) CHECK(s == res.per_subcarrier_snrs[0]);
  }

  SUBCASE("average per-subcarrier snr hits the operating point") {
    // Average the last-frame snapshot over many independent one-frame runs;
    // the block noise level is set so this converges to the requested SNR.
    ChannelModel model;
    model.kind = ChannelKind::nakagami_block;
    model.fading.m = 1.0;
    model.fading.omega1 = 2.0;
    model.fading.omega2 = 0.5;
    model.fading.rho = 0.3;
    const double target_lin = std::pow(10.0, 6.0 / 10.0);
    double acc = 0.0;
    const int reps = 4000;
    for (int r = 0; r < reps; ++r) {
      const auto res = simulate_block_ber(cfg, part, 6.0, 1, model, 9000 + r);
      double block = 0.0;
      for (double s : res.per_subcarrier_snrs) block += s;
      acc += block / res.per_subcarrier_snrs.size();
    }
    const double err_db = 10.0 * std::log10((acc / reps) / target_lin);
    CHECK(std::abs(err_db) < 0.1);
  }

  SUBCASE("input validation") {
    ChannelModel model;
    CHECK_THROWS_AS(simulate_block_ber(cfg, part, 5.0, 0, model, 1),
                    std::domain_error);
    auto bad = part;
    bad.video_indices.pop_back();
    CHECK_THROWS_AS(simulate_block_ber(cfg, bad, 5.0, 1, model, 1),
                    std::domain_error);
    bad = part;
    bad.video_indices.back() = bad.audio_indices.front();
    CHECK_THROWS_AS(simulate_block_ber(cfg, bad, 5.0, 1, model, 1),
                    std::domain_error);
    bad = part;
    bad.audio_indices.back() = cfg.n_data_subcarriers();
    CHECK_THROWS_AS(simulate_block_ber(cfg, bad, 5.0, 1, model, 1),
                    std::domain_error);
    ChannelModel frac;
    frac.kind = ChannelKind::nakagami_block;
    frac.fading.m = 1.2;
    CHECK_THROWS_AS(simulate_block_ber(cfg, part, 5.0, 1, frac, 1),
                    std::domain_error);
  }
}
