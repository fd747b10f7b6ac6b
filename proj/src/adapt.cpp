#include "uep/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace uep {
namespace {

void require(bool ok, const char* msg) {
  if (!ok) throw std::domain_error(msg);
}

double beta_db_of(const McsProfile& mcs) {
  return 10.0 * std::log10(mcs.beta);
}

double mean_snr_db(const std::vector<double>& per_subcarrier_snrs) {
  double acc = 0.0;
  for (double s : per_subcarrier_snrs) acc += 10.0 * std::log10(s);
  return acc / static_cast<double>(per_subcarrier_snrs.size());
}

std::string format_line(const char* fmt, ...) {
  char buf[256];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof(buf), fmt, args);
  va_end(args);
  return buf;
}

}  // namespace

void AdaptState::validate() const {
  require(!mcs_ladder.empty(), "scheme ladder must not be empty");
  for (const auto& entry : mcs_ladder) entry.mcs.validate();
  for (std::size_t i = 1; i < mcs_ladder.size(); ++i) {
    require(mcs_ladder[i].mcs.modulation_order >
                mcs_ladder[i - 1].mcs.modulation_order,
            "ladder must be strictly ascending in modulation order");
    require(mcs_ladder[i].threshold_snr_db >
                mcs_ladder[i - 1].threshold_snr_db,
            "ladder thresholds must be strictly increasing");
  }
  require(max_reference_age >= 1, "reference max age must be at least 1");
}

int report_scalar_count(const CqiReport& report) {
  return report.kind == CqiKind::full ? kFullReportScalars
                                      : kShiftReportScalars;
}

std::string encode_cqi_line(const CqiReport& report) {
  if (report.kind == CqiKind::shift_only) {
    return format_line("%lld,shift,%.9g",
                       static_cast<long long>(report.frame_index),
                       report.band_avg_snr_db);
  }
  return format_line("%lld,full,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g",
                     static_cast<long long>(report.frame_index),
                     report.audio_curve.a, report.audio_curve.b,
                     report.audio_curve.c, report.video_curve.a,
                     report.video_curve.b, report.video_curve.c,
                     report.band_avg_snr_db);
}

McsSelection initial_selection(const std::vector<LadderEntry>& ladder) {
  require(!ladder.empty(), "scheme ladder must not be empty");
  McsSelection sel;
  sel.audio_mcs = ladder.front().mcs;
  sel.video_mcs = ladder.front().mcs;
  sel.beta_audio = ladder.front().mcs.beta;
  sel.beta_video = ladder.front().mcs.beta;
  sel.predicted_audio_snr_db = std::numeric_limits<double>::quiet_NaN();
  sel.predicted_video_snr_db = std::numeric_limits<double>::quiet_NaN();
  return sel;
}

CqiReport build_full_report(const std::vector<double>& per_subcarrier_snrs,
                            const BlockPartition& part,
                            std::int64_t frame_index) {
  require(per_subcarrier_snrs.size() ==
              part.audio_indices.size() + part.video_indices.size(),
          "snr vector size must match the partition");
  const int n = static_cast<int>(per_subcarrier_snrs.size());
  std::vector<double> gammas_audio;
  std::vector<double> gammas_video;
  gammas_audio.reserve(part.audio_indices.size());
  gammas_video.reserve(part.video_indices.size());
  for (int idx : part.audio_indices) {
    require(idx >= 0 && idx < n, "subcarrier index out of range");
    gammas_audio.push_back(per_subcarrier_snrs[idx]);
  }
  for (int idx : part.video_indices) {
    require(idx >= 0 && idx < n, "subcarrier index out of range");
    gammas_video.push_back(per_subcarrier_snrs[idx]);
  }

  const auto grid = standard_beta_grid_db();
  CqiReport report;
  report.frame_index = frame_index;
  report.kind = CqiKind::full;
  report.audio_curve = fit_quadratic(snr_eff_vs_beta_curve(
      gammas_audio, gammas_video, 1.0, BetaBranch::audio, grid));
  report.video_curve = fit_quadratic(snr_eff_vs_beta_curve(
      gammas_audio, gammas_video, 1.0, BetaBranch::video, grid));
  report.band_avg_snr_db = mean_snr_db(per_subcarrier_snrs);
  return report;
}

CqiReport build_shift_report(const std::vector<double>& per_subcarrier_snrs,
                             std::int64_t frame_index) {
  require(!per_subcarrier_snrs.empty(), "snr vector must not be empty");
  CqiReport report;
  report.frame_index = frame_index;
  report.kind = CqiKind::shift_only;
  report.band_avg_snr_db = mean_snr_db(per_subcarrier_snrs);
  return report;
}

std::pair<QuadraticCurve, QuadraticCurve> apply_vertical_shift(
    const AdaptState& state, const CqiReport& report) {
  if (!state.reference_report.has_value())
    throw std::logic_error("vertical shift needs a stored full report");
  if (state.reference_report->kind != CqiKind::full)
    throw std::logic_error("stored reference must be a full report");
  if (report.kind != CqiKind::shift_only)
    throw std::logic_error("vertical shift takes a shift-only report");

  const double delta =
      state.fixed_shift_db.has_value()
          ? *state.fixed_shift_db
          : report.band_avg_snr_db - state.reference_band_avg_snr_db;
  QuadraticCurve audio = state.reference_report->audio_curve;
  QuadraticCurve video = state.reference_report->video_curve;
  audio.a += delta;
  video.a += delta;
  return {audio, video};
}

namespace {

struct RungChoice {
  std::size_t index = 0;
  double predicted_snr_db = 0.0;
  bool floored = false;
};

RungChoice pick_rung(const std::vector<LadderEntry>& ladder,
                     const QuadraticCurve& curve) {
  for (std::size_t i = ladder.size(); i-- > 0;) {
    const double pred =
        eval_quadratic(curve, beta_db_of(ladder[i].mcs)).snr_eff_db;
    if (pred >= ladder[i].threshold_snr_db) return {i, pred, false};
  }
  return {0, eval_quadratic(curve, beta_db_of(ladder[0].mcs)).snr_eff_db,
          true};
}

}  // namespace

McsSelection select_mcs(const AdaptState& state,
                        const QuadraticCurve& audio_curve,
                        const QuadraticCurve& video_curve) {
  state.validate();
  RungChoice audio = pick_rung(state.mcs_ladder, audio_curve);
  const RungChoice video = pick_rung(state.mcs_ladder, video_curve);
  if (audio.index > video.index) {
    // Structural rule: the audio class never outruns the video class.
    audio.index = video.index;
    audio.predicted_snr_db =
        eval_quadratic(audio_curve,
                       beta_db_of(state.mcs_ladder[audio.index].mcs))
            .snr_eff_db;
  }

  McsSelection sel;
  sel.audio_mcs = state.mcs_ladder[audio.index].mcs;
  sel.video_mcs = state.mcs_ladder[video.index].mcs;
  sel.beta_audio = sel.audio_mcs.beta;
  sel.beta_video = sel.video_mcs.beta;
  sel.predicted_audio_snr_db = audio.predicted_snr_db;
  sel.predicted_video_snr_db = video.predicted_snr_db;
  sel.floored = audio.floored || video.floored;
  return sel;
}

std::string encode_trace_line(const TraceRecord& rec) {
  return format_line("%lld,%s,%s,%.4f,%.6e,%.6e",
                     static_cast<long long>(rec.frame), rec.audio_mcs.c_str(),
                     rec.video_mcs.c_str(), rec.pred_eff_snr_db,
                     rec.realized_ber_audio, rec.realized_ber_video);
}

AdaptTrace run_adaptation_trace(const OfdmConfig& cfg,
                                const BlockPartition& part,
                                const std::vector<ChannelRealization>& schedule,
                                int full_report_period, AdaptState& state,
                                std::uint64_t seed) {
  cfg.validate();
  state.validate();
  require(full_report_period >= 1, "full report period must be at least 1");
  require(!schedule.empty(), "channel schedule must not be empty");
  const int n = cfg.n_data_subcarriers();

  // A selection must always reference ladder members; a state that arrives
  // without one (fresh loop) starts from the lowest rung.
  const auto on_ladder = [&](const McsProfile& mcs) {
    return std::any_of(state.mcs_ladder.begin(), state.mcs_ladder.end(),
                       [&](const LadderEntry& e) { return e.mcs.name == mcs.name; });
  };
  if (!on_ladder(state.current_selection.audio_mcs) ||
      !on_ladder(state.current_selection.video_mcs)) {
    state.current_selection = initial_selection(state.mcs_ladder);
  }

  AdaptTrace trace;
  trace.records.reserve(schedule.size());
  for (std::size_t k = 0; k < schedule.size(); ++k) {
    const ChannelRealization& ch = schedule[k];
    require(ch.gains.size() == static_cast<std::size_t>(n),
            "schedule entry size must match the block");
    require(ch.noise_var > 0.0, "schedule entry needs positive noise power");

    // Receiver side: measure, then report (full on schedule or when the
    // stored reference is absent or stale).
    std::vector<double> snrs(n);
    for (int i = 0; i < n; ++i)
      snrs[i] = std::norm(ch.gains[i]) / ch.noise_var;
    const bool on_schedule =
        k % static_cast<std::size_t>(full_report_period) == 0;
    const bool stale =
        !state.reference_report.has_value() ||
        static_cast<std::int64_t>(k) - state.reference_report->frame_index >=
            state.max_reference_age;
    const CqiReport report =
        on_schedule || stale
            ? build_full_report(snrs, part, static_cast<std::int64_t>(k))
            : build_shift_report(snrs, static_cast<std::int64_t>(k));

    // Base-station side: update reference, reconstruct curves, select.
    std::pair<QuadraticCurve, QuadraticCurve> curves;
    if (report.kind == CqiKind::full) {
      state.reference_report = report;
      state.reference_band_avg_snr_db = report.band_avg_snr_db;
      curves = {report.audio_curve, report.video_curve};
      ++trace.full_reports;
    } else {
      curves = apply_vertical_shift(state, report);
      ++trace.shift_reports;
    }
    trace.feedback_scalars += report_scalar_count(report);
    const McsSelection selected = select_mcs(state, curves.first, curves.second);
    if (state.zero_feedback_delay) state.current_selection = selected;

    // Transmit frame k under the selection currently in force.
    BlockPartition active = part;
    active.audio_mcs = state.current_selection.audio_mcs;
    active.video_mcs = state.current_selection.video_mcs;
    const BlockBerResult res =
        simulate_fixed_realization(cfg, active, ch, 1, seed, k);

    TraceRecord rec;
    rec.frame = static_cast<std::int64_t>(k);
    rec.audio_mcs = active.audio_mcs.name;
    rec.video_mcs = active.video_mcs.name;
    rec.pred_eff_snr_db = state.current_selection.predicted_video_snr_db;
    rec.realized_ber_audio = res.audio.ber;
    rec.realized_ber_video = res.video.ber;
    rec.audio_bits = res.audio.bits_sent;
    rec.audio_errors = res.audio.bit_errors;
    rec.video_bits = res.video.bits_sent;
    rec.video_errors = res.video.bit_errors;
    rec.report_kind = report.kind;
    trace.records.push_back(rec);

    if (!state.zero_feedback_delay) state.current_selection = selected;
  }
  return trace;
}

std::uint64_t goodput_bits(const AdaptTrace& trace, double ber_gate) {
  require(ber_gate >= 0.0, "ber gate must be nonnegative");
  std::uint64_t total = 0;
  for (const auto& rec : trace.records) {
    if (rec.realized_ber_audio <= ber_gate) total += rec.audio_bits;
    if (rec.realized_ber_video <= ber_gate) total += rec.video_bits;
  }
  return total;
}

}  // namespace uep
