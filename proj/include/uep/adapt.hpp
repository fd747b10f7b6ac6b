#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "uep/eesm.hpp"
#include "uep/phy.hpp"

namespace uep {

enum class CqiKind { full, shift_only };

// One channel-quality report from the receiver. Full reports carry both
// fitted curves; shift-only reports carry just the frame index and the
// band-average SNR, and the base station reconstructs curves by shifting
// its stored reference.
struct CqiReport {
  std::int64_t frame_index = 0;
  QuadraticCurve audio_curve;
  QuadraticCurve video_curve;
  double band_avg_snr_db = 0.0;
  CqiKind kind = CqiKind::full;
};

// Feedback payload sizes in scalars: a full report ships six quadratic
// coefficients, the two shared fit-domain bounds, and the band average;
// a shift report ships the frame index and the band average. Both are far
// below the raw per-subcarrier SNR vector, which is the point.
inline constexpr int kFullReportScalars = 9;
inline constexpr int kShiftReportScalars = 2;
int report_scalar_count(const CqiReport& report);

// Wire line: "frame,full,a1,b1,c1,a2,b2,c2,avg" or "frame,shift,avg".
std::string encode_cqi_line(const CqiReport& report);

// One rung of the scheme ladder: the scheme plus the predicted effective
// SNR it needs before the selector will engage it.
struct LadderEntry {
  McsProfile mcs;
  double threshold_snr_db = 0.0;
};

struct McsSelection {
  McsProfile audio_mcs;
  McsProfile video_mcs;
  double beta_audio = 1.0;
  double beta_video = 1.0;
  double predicted_audio_snr_db = 0.0;
  double predicted_video_snr_db = 0.0;
  bool floored = false;  // some class met no threshold; lowest rung forced
};

// Base-station side of the loop: the stored reference report, the active
// selection, and the scheme ladder. Single-writer: exactly one adaptation
// loop owns and mutates an AdaptState.
struct AdaptState {
  std::optional<CqiReport> reference_report;
  double reference_band_avg_snr_db = 0.0;
  McsSelection current_selection;
  std::vector<LadderEntry> mcs_ladder;  // ascending modulation order

  // Protocol knobs. fixed_shift_db, when set, replaces the measured
  // band-average delta with a constant shift (the literal reading of the
  // worked 3 dB example). A reference older than max_reference_age frames
  // forces the next report to be full. zero_feedback_delay applies a
  // frame's selection to that same frame instead of the next one.
  std::optional<double> fixed_shift_db;
  int max_reference_age = 64;
  bool zero_feedback_delay = false;

  void validate() const;  // throws std::domain_error
};

// Lowest-rung starting selection (what the loop transmits before any
// feedback has arrived).
McsSelection initial_selection(const std::vector<LadderEntry>& ladder);

// Receiver side: per-class effective-SNR-vs-beta curves over the standard
// beta grid, fitted quadratics, and the band-average SNR (arithmetic mean
// of the per-subcarrier SNRs in dB).
CqiReport build_full_report(const std::vector<double>& per_subcarrier_snrs,
                            const BlockPartition& part,
                            std::int64_t frame_index);

CqiReport build_shift_report(const std::vector<double>& per_subcarrier_snrs,
                             std::int64_t frame_index);

// Reconstructs (audio, video) curves from the stored reference by adding
// the band-average delta (or the fixed shift, when configured) to each
// curve's constant coefficient; slope and curvature are untouched. Throws
// std::logic_error when no reference is stored or the report is not
// shift-only: the protocol never falls back silently.
std::pair<QuadraticCurve, QuadraticCurve> apply_vertical_shift(
    const AdaptState& state, const CqiReport& report);

// Walks the ladder from the highest order down; each candidate is judged by
// evaluating the class curve at the candidate's own calibrated beta (in dB)
// and comparing against the rung threshold. Falls back to the lowest rung
// (flagged) when nothing qualifies, then caps the audio order at the video
// order so the low-order class is never the high-order one.
McsSelection select_mcs(const AdaptState& state,
                        const QuadraticCurve& audio_curve,
                        const QuadraticCurve& video_curve);

struct TraceRecord {
  std::int64_t frame = 0;
  std::string audio_mcs;
  std::string video_mcs;
  // Video-class effective SNR predicted by the report that produced the
  // active selection; NaN on frames transmitted before any feedback.
  double pred_eff_snr_db = 0.0;
  double realized_ber_audio = 0.0;
  double realized_ber_video = 0.0;
  std::uint64_t audio_bits = 0;
  std::uint64_t audio_errors = 0;
  std::uint64_t video_bits = 0;
  std::uint64_t video_errors = 0;
  CqiKind report_kind = CqiKind::full;
};

// Wire line: "frame,audio_mcs,video_mcs,pred_eff_snr_db,
// realized_ber_audio,realized_ber_video".
std::string encode_trace_line(const TraceRecord& rec);

struct AdaptTrace {
  std::vector<TraceRecord> records;
  std::uint64_t full_reports = 0;
  std::uint64_t shift_reports = 0;
  std::uint64_t feedback_scalars = 0;
};

// Closed adaptation loop over a precomputed channel schedule. Every
// period-th frame (and whenever the reference is missing or stale) the
// receiver sends a full report, otherwise shift-only; the base station
// updates state and selects schemes; the frame itself is simulated under
// the selection currently in force (one-frame feedback delay by default).
// Frame k draws bits and noise from Rng::substream(seed, k).
AdaptTrace run_adaptation_trace(const OfdmConfig& cfg,
                                const BlockPartition& part,
                                const std::vector<ChannelRealization>& schedule,
                                int full_report_period, AdaptState& state,
                                std::uint64_t seed);

// Delivered payload: bits of every (frame, class) whose realized BER is at
// or below the gate; a class that misses the gate contributes nothing for
// that frame. Uncoded frames above the gate are treated as undecodable.
std::uint64_t goodput_bits(const AdaptTrace& trace, double ber_gate);

}  // namespace uep
