#include "uep/phy.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "uep/special.hpp"

namespace uep {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

// Square QAM axis layout: L = 2^k amplitude levels per axis at spacing
// 2*scale, chosen so the full constellation has unit average energy.
struct AxisLayout {
  int bits_per_axis;
  int levels;
  double scale;
};

AxisLayout axis_layout(int order) {
  require(order == 4 || order == 16 || order == 64,
          "modulation order must be 4, 16, or 64");
  int k = 1;
  while ((1 << (2 * k)) != order) ++k;
  const int levels = 1 << k;
  // Mean of (2i+1-L)^2 over levels is (L^2-1)/3 per axis, doubled for I+Q.
  const double scale =
      std::sqrt(3.0 / (2.0 * (static_cast<double>(levels) * levels - 1.0)));
  return {k, levels, scale};
}

std::uint32_t gray_encode(std::uint32_t idx) { return idx ^ (idx >> 1); }

std::uint32_t gray_decode(std::uint32_t g) {
  std::uint32_t idx = g;
  for (std::uint32_t shift = 1; shift < 32; shift <<= 1) idx ^= idx >> shift;
  return idx;
}

// Amplitude of level index i (0 = most positive level).
double level_amplitude(int idx, const AxisLayout& ax) {
  return (ax.levels - 1 - 2 * idx) * ax.scale;
}

// Nearest level index for one received axis value. On an exact midpoint the
// level with the smaller Gray label wins, so demapping is deterministic.
int demap_axis(double value, const AxisLayout& ax) {
  const double pos = (ax.levels - 1 - value / ax.scale) / 2.0;
  if (pos <= 0.0) return 0;
  if (pos >= ax.levels - 1) return ax.levels - 1;
  const double lo = std::floor(pos);
  const double frac = pos - lo;
  const int lo_idx = static_cast<int>(lo);
  if (frac < 0.5) return lo_idx;
  if (frac > 0.5) return lo_idx + 1;
  return gray_encode(lo_idx) < gray_encode(lo_idx + 1) ? lo_idx : lo_idx + 1;
}

// Pack `count` bits (MSB first) starting at bits[at] into an integer.
std::uint32_t pack_bits(const std::vector<uint8_t>& bits, std::size_t at,
                        int count) {
  std::uint32_t g = 0;
  for (int b = 0; b < count; ++b) g = (g << 1) | (bits[at + b] & 1u);
  return g;
}

void unpack_bits(std::uint32_t g, int count, std::vector<uint8_t>& out) {
  for (int b = count - 1; b >= 0; --b) out.push_back((g >> b) & 1u);
}

}  // namespace

void OfdmConfig::validate() const {
  require(n_audio_subcarriers > 0, "audio subcarrier count must be positive");
  require(n_video_subcarriers > 0, "video subcarrier count must be positive");
  require(n_pilots >= 0, "pilot count must be nonnegative");
  require(guard_interval_ns >= 0.0, "guard interval must be nonnegative");
  require(symbol_duration_us > 0.0, "symbol duration must be positive");
  require(guard_interval_ns < symbol_duration_us * 1000.0,
          "guard interval must be shorter than the symbol");
  require(bandwidth_mhz > 0.0, "bandwidth must be positive");
}

void ChannelModel::validate() const {
  if (kind == ChannelKind::rayleigh) {
    require(n_taps >= 1, "rayleigh channel needs at least one tap");
  }
  if (kind == ChannelKind::nakagami_block ||
      kind == ChannelKind::nakagami_combined) {
    fading.validate();
    const double two_m = 2.0 * fading.m;
    require(std::abs(two_m - std::round(two_m)) < 1e-9,
            "correlated nakagami pair needs 2m to be an integer");
  }
}

BerRecord make_ber_record(double snr_db, std::uint64_t bit_errors,
                          std::uint64_t bits_sent) {
  require(bits_sent > 0, "ber record needs at least one bit");
  BerRecord rec;
  rec.snr_db = snr_db;
  rec.bit_errors = bit_errors;
  rec.bits_sent = bits_sent;
  rec.ber = static_cast<double>(bit_errors) / static_cast<double>(bits_sent);
  rec.ci95_halfwidth =
      1.96 * std::sqrt(rec.ber * (1.0 - rec.ber) /
                       static_cast<double>(bits_sent));
  return rec;
}

std::vector<std::complex<double>> map_symbols(const std::vector<uint8_t>& bits,
                                              int order) {
  const AxisLayout ax = axis_layout(order);
  const int bps = 2 * ax.bits_per_axis;
  require(bits.size() % static_cast<std::size_t>(bps) == 0,
          "bit count must be a multiple of bits per symbol");
  std::vector<std::complex<double>> symbols;
  symbols.reserve(bits.size() / bps);
  for (std::size_t at = 0; at < bits.size(); at += bps) {
    const int i_idx = static_cast<int>(
        gray_decode(pack_bits(bits, at, ax.bits_per_axis)));
    const int q_idx = static_cast<int>(
        gray_decode(pack_bits(bits, at + ax.bits_per_axis, ax.bits_per_axis)));
    symbols.emplace_back(level_amplitude(i_idx, ax), level_amplitude(q_idx, ax));
  }
  return symbols;
}

std::vector<uint8_t> demap_symbols(
    const std::vector<std::complex<double>>& symbols, int order) {
  const AxisLayout ax = axis_layout(order);
  std::vector<uint8_t> bits;
  bits.reserve(symbols.size() * 2 * ax.bits_per_axis);
  for (const auto& s : symbols) {
    unpack_bits(gray_encode(demap_axis(s.real(), ax)), ax.bits_per_axis, bits);
    unpack_bits(gray_encode(demap_axis(s.imag(), ax)), ax.bits_per_axis, bits);
  }
  return bits;
}

ChannelRealization rayleigh_channel(const OfdmConfig& cfg, int n_taps,
                                    Rng& rng) {
  cfg.validate();
  require(n_taps >= 1, "rayleigh channel needs at least one tap");
  const int n = cfg.n_data_subcarriers();
  const double sample_ns = 1000.0 / cfg.bandwidth_mhz;
  const double decay_ns = cfg.guard_interval_ns / 4.0;

  std::vector<double> powers(n_taps, 1.0);
  if (decay_ns > 0.0) {
    for (int l = 0; l < n_taps; ++l)
      powers[l] = std::exp(-l * sample_ns / decay_ns);
  }
  double total = 0.0;
  for (double p : powers) total += p;
  std::vector<std::complex<double>> taps(n_taps);
  for (int l = 0; l < n_taps; ++l) taps[l] = rng.next_cnormal(powers[l] / total);

  ChannelRealization out;
  out.gains.resize(n);
  for (int i = 0; i < n; ++i) {
    std::complex<double> h = 0.0;
    for (int l = 0; l < n_taps; ++l)
      h += taps[l] * std::polar(1.0, -2.0 * kPi * i * l / n);
    out.gains[i] = h;
  }
  return out;
}

std::vector<std::pair<double, double>> correlated_nakagami_pair(
    const FadingParams& fp, std::uint64_t n, Rng& rng) {
  fp.validate();
  const double two_m = 2.0 * fp.m;
  require(std::abs(two_m - std::round(two_m)) < 1e-9,
          "correlated nakagami pair needs 2m to be an integer");
  const int k = static_cast<int>(std::round(two_m));
  // Gaussian correlation lambda gives squared-sum (power) correlation
  // lambda^2, so hitting power correlation rho needs lambda = sqrt(rho).
  const double lambda = std::sqrt(fp.rho);
  const double mix = std::sqrt(1.0 - fp.rho);
  const double s1 = std::sqrt(fp.omega1 / two_m);
  const double s2 = std::sqrt(fp.omega2 / two_m);

  std::vector<std::pair<double, double>> out;
  out.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    double p1 = 0.0;
    double p2 = 0.0;
    for (int j = 0; j < k; ++j) {
      const double a = rng.next_gauss();
      const double b = rng.next_gauss();
      const double x = s1 * a;
      const double y = s2 * (lambda * a + mix * b);
      p1 += x * x;
      p2 += y * y;
    }
    out.emplace_back(std::sqrt(p1), std::sqrt(p2));
  }
  return out;
}

namespace {

struct FrameCounts {
  std::uint64_t audio_errors = 0;
  std::uint64_t video_errors = 0;
};

void check_partition_covers(const OfdmConfig& cfg, const BlockPartition& part) {
  cfg.validate();
  part.audio_mcs.validate();
  part.video_mcs.validate();
  const int n = cfg.n_data_subcarriers();
  require(!part.audio_indices.empty() && !part.video_indices.empty(),
          "both traffic classes need at least one subcarrier");
  require(part.audio_indices.size() + part.video_indices.size() ==
              static_cast<std::size_t>(n),
          "partition must cover every data subcarrier");
  std::vector<char> seen(n, 0);
  for (const auto& list : {part.audio_indices, part.video_indices}) {
    for (int idx : list) {
      require(idx >= 0 && idx < n, "subcarrier index out of range");
      require(!seen[idx], "subcarrier assigned to both classes");
      seen[idx] = 1;
    }
  }
}

void check_block_inputs(const OfdmConfig& cfg, const BlockPartition& part,
                        const ChannelModel& model) {
  check_partition_covers(cfg, part);
  model.validate();
}

// Channel gains and noise power for one frame. The noise level is set so the
// average per-subcarrier SNR over the block equals snr_lin in expectation.
ChannelRealization draw_channel(const OfdmConfig& cfg,
                                const BlockPartition& part,
                                const ChannelModel& model, double snr_lin,
                                Rng& rng) {
  const int n = cfg.n_data_subcarriers();
  ChannelRealization ch;
  switch (model.kind) {
    case ChannelKind::awgn:
      ch.gains.assign(n, {1.0, 0.0});
      ch.noise_var = 1.0 / snr_lin;
      break;
    case ChannelKind::rayleigh:
      ch = rayleigh_channel(cfg, model.n_taps, rng);
      ch.noise_var = 1.0 / snr_lin;
      break;
    case ChannelKind::nakagami_block: {
      const auto pair = correlated_nakagami_pair(model.fading, 1, rng)[0];
      ch.gains.assign(n, {0.0, 0.0});
      for (int idx : part.audio_indices) ch.gains[idx] = {pair.first, 0.0};
      for (int idx : part.video_indices) ch.gains[idx] = {pair.second, 0.0};
      const double n1 = static_cast<double>(part.audio_indices.size());
      const double n2 = static_cast<double>(part.video_indices.size());
      ch.noise_var = (n1 * model.fading.omega1 + n2 * model.fading.omega2) /
                     (static_cast<double>(n) * snr_lin);
      break;
    }
    case ChannelKind::nakagami_combined: {
      const auto pair = correlated_nakagami_pair(model.fading, 1, rng)[0];
      const double r = std::hypot(pair.first, pair.second);
      ch.gains.assign(n, {r, 0.0});
      ch.noise_var = (model.fading.omega1 + model.fading.omega2) / snr_lin;
      break;
    }
  }
  return ch;
}

// Bits, noise, equalization, and demapping for one frame on a given channel
// realization; the channel draw (if any) has already consumed from rng.
FrameCounts transmit_frame(const OfdmConfig& cfg, const BlockPartition& part,
                           const ChannelRealization& ch, Rng& rng,
                           std::vector<double>* snrs_out) {
  const int n = cfg.n_data_subcarriers();
  std::vector<uint8_t> audio_bits;
  std::vector<uint8_t> video_bits;
  rng.next_bits(audio_bits,
                part.audio_indices.size() * part.audio_mcs.bits_per_symbol);
  rng.next_bits(video_bits,
                part.video_indices.size() * part.video_mcs.bits_per_symbol);
  const auto audio_syms = map_symbols(audio_bits, part.audio_mcs.modulation_order);
  const auto video_syms = map_symbols(video_bits, part.video_mcs.modulation_order);

  std::vector<std::complex<double>> tx(n);
  for (std::size_t j = 0; j < part.audio_indices.size(); ++j)
    tx[part.audio_indices[j]] = audio_syms[j];
  for (std::size_t j = 0; j < part.video_indices.size(); ++j)
    tx[part.video_indices[j]] = video_syms[j];

  // Noise is drawn in ascending subcarrier order; zero-forcing equalization
  // with the known gain.
  std::vector<std::complex<double>> rx(n);
  for (int i = 0; i < n; ++i) {
    const std::complex<double> noise = rng.next_cnormal(ch.noise_var);
    rx[i] = (ch.gains[i] * tx[i] + noise) / ch.gains[i];
  }

  std::vector<std::complex<double>> audio_rx(part.audio_indices.size());
  std::vector<std::complex<double>> video_rx(part.video_indices.size());
  for (std::size_t j = 0; j < part.audio_indices.size(); ++j)
    audio_rx[j] = rx[part.audio_indices[j]];
  for (std::size_t j = 0; j < part.video_indices.size(); ++j)
    video_rx[j] = rx[part.video_indices[j]];

  const auto audio_hat = demap_symbols(audio_rx, part.audio_mcs.modulation_order);
  const auto video_hat = demap_symbols(video_rx, part.video_mcs.modulation_order);

  FrameCounts counts;
  for (std::size_t b = 0; b < audio_bits.size(); ++b)
    counts.audio_errors += audio_bits[b] != audio_hat[b];
  for (std::size_t b = 0; b < video_bits.size(); ++b)
    counts.video_errors += video_bits[b] != video_hat[b];

  if (snrs_out) {
    snrs_out->resize(n);
    for (int i = 0; i < n; ++i)
      (*snrs_out)[i] = std::norm(ch.gains[i]) / ch.noise_var;
  }
  return counts;
}

FrameCounts run_frame(const OfdmConfig& cfg, const BlockPartition& part,
                      const ChannelModel& model, double snr_lin,
                      std::uint64_t seed, std::uint64_t frame,
                      std::vector<double>* snrs_out) {
  Rng rng = Rng::substream(seed, frame);
  const ChannelRealization ch = draw_channel(cfg, part, model, snr_lin, rng);
  return transmit_frame(cfg, part, ch, rng, snrs_out);
}

BlockBerResult finish_block_result(const BlockPartition& part, double snr_db,
                                   std::uint64_t n_frames,
                                   std::uint64_t audio_errors,
                                   std::uint64_t video_errors,
                                   std::vector<double> snrs) {
  BlockBerResult out;
  out.audio = make_ber_record(
      snr_db, audio_errors,
      n_frames * part.audio_indices.size() * part.audio_mcs.bits_per_symbol);
  out.video = make_ber_record(
      snr_db, video_errors,
      n_frames * part.video_indices.size() * part.video_mcs.bits_per_symbol);
  out.per_subcarrier_snrs = std::move(snrs);
  return out;
}

}  // namespace

BlockBerResult simulate_block_ber_serial(const OfdmConfig& cfg,
                                         const BlockPartition& part,
                                         double snr_db, std::uint64_t n_frames,
                                         const ChannelModel& model,
                                         std::uint64_t seed) {
  check_block_inputs(cfg, part, model);
  require(n_frames > 0, "frame count must be positive");
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  std::uint64_t audio_errors = 0;
  std::uint64_t video_errors = 0;
  std::vector<double> snrs;
  for (std::uint64_t f = 0; f < n_frames; ++f) {
    const FrameCounts counts =
        run_frame(cfg, part, model, snr_lin, seed, f,
                  f + 1 == n_frames ? &snrs : nullptr);
    audio_errors += counts.audio_errors;
    video_errors += counts.video_errors;
  }
  return finish_block_result(part, snr_db, n_frames, audio_errors,
                             video_errors, std::move(snrs));
}

BlockBerResult simulate_block_ber(const OfdmConfig& cfg,
                                  const BlockPartition& part, double snr_db,
                                  std::uint64_t n_frames,
                                  const ChannelModel& model,
                                  std::uint64_t seed) {
  check_block_inputs(cfg, part, model);
  require(n_frames > 0, "frame count must be positive");
  const double snr_lin = std::pow(10.0, snr_db / 10.0);
  std::uint64_t audio_errors = 0;
  std::uint64_t video_errors = 0;
  std::vector<double> snrs;
  const std::int64_t frames = static_cast<std::int64_t>(n_frames);
#ifdef _OPENMP
#pragma omp parallel for schedule(static) \
    reduction(+ : audio_errors, video_errors)
#endif
  for (std::int64_t f = 0; f < frames; ++f) {
    const FrameCounts counts =
        run_frame(cfg, part, model, snr_lin, seed,
                  static_cast<std::uint64_t>(f),
                  f + 1 == frames ? &snrs : nullptr);
    audio_errors += counts.audio_errors;
    video_errors += counts.video_errors;
  }
  return finish_block_result(part, snr_db, n_frames, audio_errors,
                             video_errors, std::move(snrs));
}

BlockBerResult simulate_fixed_realization(const OfdmConfig& cfg,
                                          const BlockPartition& part,
                                          const ChannelRealization& ch,
                                          std::uint64_t n_frames,
                                          std::uint64_t seed,
                                          std::uint64_t frame_offset) {
  check_partition_covers(cfg, part);
  require(n_frames > 0, "frame count must be positive");
  require(ch.gains.size() ==
              static_cast<std::size_t>(cfg.n_data_subcarriers()),
          "channel realization size must match the block");
  require(ch.noise_var > 0.0, "noise variance must be positive");

  double mean_snr = 0.0;
  for (const auto& g : ch.gains) mean_snr += std::norm(g) / ch.noise_var;
  mean_snr /= static_cast<double>(ch.gains.size());
  const double snr_db = 10.0 * std::log10(mean_snr);

  std::uint64_t audio_errors = 0;
  std::uint64_t video_errors = 0;
  std::vector<double> snrs;
  for (std::uint64_t f = 0; f < n_frames; ++f) {
    Rng rng = Rng::substream(seed, frame_offset + f);
    const FrameCounts counts = transmit_frame(
        cfg, part, ch, rng, f + 1 == n_frames ? &snrs : nullptr);
    audio_errors += counts.audio_errors;
    video_errors += counts.video_errors;
  }
  return finish_block_result(part, snr_db, n_frames, audio_errors,
                             video_errors, std::move(snrs));
}

namespace {

AwgnRefPoint awgn_ref_point(const McsProfile& mcs, double snr_db,
                            std::uint64_t bits_per_point, std::uint64_t seed,
                            std::uint64_t point_index) {
  Rng rng = Rng::substream(seed, point_index);
  const int bps = mcs.bits_per_symbol;
  const std::uint64_t n_syms = (bits_per_point + bps - 1) / bps;
  const std::uint64_t n_bits = n_syms * bps;
  const double noise_var = std::pow(10.0, -snr_db / 10.0);

  std::vector<uint8_t> bits;
  rng.next_bits(bits, n_bits);
  const auto syms = map_symbols(bits, mcs.modulation_order);
  std::vector<std::complex<double>> rx(syms.size());
  for (std::size_t j = 0; j < syms.size(); ++j)
    rx[j] = syms[j] + rng.next_cnormal(noise_var);
  const auto hat = demap_symbols(rx, mcs.modulation_order);

  std::uint64_t errors = 0;
  for (std::size_t b = 0; b < bits.size(); ++b) errors += bits[b] != hat[b];

  AwgnRefPoint point;
  point.snr_db = snr_db;
  if (errors == 0) {
    point.ber = 0.5 / static_cast<double>(n_bits);
    point.floored = true;
  } else {
    point.ber = static_cast<double>(errors) / static_cast<double>(n_bits);
    point.floored = false;
  }
  return point;
}

AwgnRefTable finish_ref_table(const McsProfile& mcs,
                              std::vector<AwgnRefPoint> points) {
  // Monte-Carlo jitter near the error floor can break monotonicity; clamp
  // with a running minimum so interpolation and inversion stay well posed.
  double low = 1.0;
  for (auto& p : points) {
    if (p.ber > low) {
      p.ber = low;
      p.floored = true;
    }
    low = p.ber;
  }
  AwgnRefTable table;
  table.mcs_name = mcs.name;
  table.points = std::move(points);
  table.validate();
  return table;
}

}  // namespace

AwgnRefTable generate_awgn_ref_serial(const McsProfile& mcs,
                                      const std::vector<double>& snr_grid_db,
                                      std::uint64_t bits_per_point,
                                      std::uint64_t seed) {
  mcs.validate();
  require(bits_per_point > 0, "bits per point must be positive");
  std::vector<AwgnRefPoint> points(snr_grid_db.size());
  for (std::size_t p = 0; p < snr_grid_db.size(); ++p)
    points[p] = awgn_ref_point(mcs, snr_grid_db[p], bits_per_point, seed, p);
  return finish_ref_table(mcs, std::move(points));
}

AwgnRefTable generate_awgn_ref(const McsProfile& mcs,
                               const std::vector<double>& snr_grid_db,
                               std::uint64_t bits_per_point,
                               std::uint64_t seed) {
  mcs.validate();
  require(bits_per_point > 0, "bits per point must be positive");
  std::vector<AwgnRefPoint> points(snr_grid_db.size());
  const std::int64_t count = static_cast<std::int64_t>(snr_grid_db.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
  for (std::int64_t p = 0; p < count; ++p)
    points[p] = awgn_ref_point(mcs, snr_grid_db[p], bits_per_point, seed,
                               static_cast<std::uint64_t>(p));
  return finish_ref_table(mcs, std::move(points));
}

}  // namespace uep
