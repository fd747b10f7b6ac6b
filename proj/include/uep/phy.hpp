#pragma once

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "uep/eesm.hpp"
#include "uep/fading.hpp"
#include "uep/rng.hpp"

namespace uep {

struct OfdmConfig {
  int n_audio_subcarriers = 52;
  int n_video_subcarriers = 256;
  int n_pilots = 4;
  double guard_interval_ns = 800.0;
  double symbol_duration_us = 4.0;
  double bandwidth_mhz = 20.0;

  void validate() const;
  int n_data_subcarriers() const {
    return n_audio_subcarriers + n_video_subcarriers;
  }
};

// One draw of the channel: complex gain per data subcarrier plus the
// per-subcarrier complex noise power the simulator operates it at.
struct ChannelRealization {
  std::vector<std::complex<double>> gains;
  double noise_var = 1.0;
};

struct BerRecord {
  double snr_db = 0.0;
  std::uint64_t bit_errors = 0;
  std::uint64_t bits_sent = 0;
  double ber = 0.0;
  double ci95_halfwidth = 0.0;  // normal-approximation 95% half-width
};

BerRecord make_ber_record(double snr_db, std::uint64_t bit_errors,
                          std::uint64_t bits_sent);

// Which fading law drives each frame. The two correlated-pair kinds differ
// in how the pair lands on the block: `nakagami_block` puts branch 1 flat on
// the audio set and branch 2 flat on the video set; `nakagami_combined`
// scales every subcarrier by the combined envelope sqrt(r1^2 + r2^2), the
// quantity whose analytic density the fading module provides.
enum class ChannelKind { awgn, rayleigh, nakagami_block, nakagami_combined };

struct ChannelModel {
  ChannelKind kind = ChannelKind::awgn;
  FadingParams fading;  // used by the two nakagami kinds
  int n_taps = 8;       // used by rayleigh

  void validate() const;
};

// Gray-mapped square QAM at unit average symbol energy. Bits go MSB-first
// per axis, the first log2(order)/2 bits to I, the rest to Q; QPSK bits 00
// map to (+1+j)/sqrt(2).
std::vector<std::complex<double>> map_symbols(const std::vector<uint8_t>& bits,
                                              int order);

// Nearest-point hard decision with Gray inverse mapping. A sample exactly
// halfway between two levels deterministically takes the point with the
// smaller Gray label.
std::vector<uint8_t> demap_symbols(
    const std::vector<std::complex<double>>& symbols, int order);

// Tapped-delay-line Rayleigh fading: exponential power-delay profile with
// decay constant guard_interval/4, taps normalized to unit total power,
// i.i.d. complex Gaussian tap gains, per-subcarrier gains by DFT. noise_var
// is left at 1; the simulator sets it from the SNR operating point.
ChannelRealization rayleigh_channel(const OfdmConfig& cfg, int n_taps,
                                    Rng& rng);

// n pairs of correlated Nakagami envelopes with marginals (m, omega1) and
// (m, omega2) and power correlation rho, built by summing 2m squared
// Gaussian pairs whose Gaussian correlation is sqrt(rho). Requires 2m to be
// an integer (the construction needs whole squared Gaussians).
std::vector<std::pair<double, double>> correlated_nakagami_pair(
    const FadingParams& fp, std::uint64_t n, Rng& rng);

struct BlockBerResult {
  BerRecord audio;
  BerRecord video;
  // Instantaneous per-subcarrier SNR |h_i|^2 / noise_var of the last frame,
  // in block index order — the input the effective-SNR map consumes.
  std::vector<double> per_subcarrier_snrs;
};

// Monte-Carlo BER of one partitioned OFDM block at the given average
// per-subcarrier SNR. Per frame, in fixed draw order: channel, audio bits,
// video bits, then per-subcarrier noise in ascending index order; transmit
// y = h*s + n, zero-forcing equalization with perfect channel knowledge,
// hard demap, per-class error counts. Frame k always draws from
// Rng::substream(seed, k), so the parallel kernel below is bit-identical to
// this serial reference.
//
// The partition must cover every data subcarrier exactly once; both classes
// must be nonempty. Equal modulation orders are allowed here (homogeneous
// scenarios) even though adaptation itself keeps audio strictly lower.
BlockBerResult simulate_block_ber_serial(const OfdmConfig& cfg,
                                         const BlockPartition& part,
                                         double snr_db, std::uint64_t n_frames,
                                         const ChannelModel& model,
                                         std::uint64_t seed);

// OpenMP frame-parallel kernel; reductions are integer error/bit counts, so
// the result is bit-identical to simulate_block_ber_serial for any thread
// count (falls back to the serial loop when built without OpenMP).
BlockBerResult simulate_block_ber(const OfdmConfig& cfg,
                                  const BlockPartition& part, double snr_db,
                                  std::uint64_t n_frames,
                                  const ChannelModel& model,
                                  std::uint64_t seed);

// Same transmission chain over one externally supplied channel realization
// (the adaptation loop feeds a precomputed schedule through this). Frame f
// draws bits and noise from Rng::substream(seed, frame_offset + f). The
// record's snr_db is the realization's block-average SNR in dB.
BlockBerResult simulate_fixed_realization(const OfdmConfig& cfg,
                                          const BlockPartition& part,
                                          const ChannelRealization& ch,
                                          std::uint64_t n_frames,
                                          std::uint64_t seed,
                                          std::uint64_t frame_offset = 0);

// Monte-Carlo uncoded AWGN reference curve for one scheme. Grid point p
// draws from Rng::substream(seed, p). Zero-error points are floored at half
// an error, 1/(2*bits), and flagged; any residual non-monotonicity in the
// floor region is clamped by a running minimum so the table stays
// lookup-consistent.
AwgnRefTable generate_awgn_ref_serial(const McsProfile& mcs,
                                      const std::vector<double>& snr_grid_db,
                                      std::uint64_t bits_per_point,
                                      std::uint64_t seed);

// OpenMP kernel parallel over grid points; bit-identical to the serial one.
AwgnRefTable generate_awgn_ref(const McsProfile& mcs,
                               const std::vector<double>& snr_grid_db,
                               std::uint64_t bits_per_point,
                               std::uint64_t seed);

}  // namespace uep
