#include "uep/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "uep/adapt.hpp"
#include "uep/errors.hpp"
#include "uep/fading.hpp"
#include "uep/phy.hpp"
#include "uep/rng.hpp"
#include "uep/version.hpp"

namespace uep {
namespace {

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list args;
  va_start(args, f);
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open output file: " + path);
  out << content;
  out.flush();
  if (!out) throw IoError("cannot write output file: " + path);
}

// Comment block + CSV header every output starts with.
std::string header_block(const KeyValueConfig& cfg, std::uint64_t seed,
                         const std::string& columns) {
  std::string head;
  head += fmt("# tool: %s %s\n", kToolName, kToolVersion);
  head += fmt("# seed: %llu\n", static_cast<unsigned long long>(seed));
  head += fmt("# config: fnv1a64:%016llx\n",
              static_cast<unsigned long long>(cfg.content_hash()));
  head += columns;
  head += "\n";
  return head;
}

std::string sanitize_filename(std::string name) {
  for (char& c : name)
    if (c == '/' || c == '\\' || c == ' ') c = '_';
  return name;
}

std::string path_stem(const std::string& path) {
  const auto dot = path.rfind('.');
  const auto slash = path.rfind('/');
  if (dot == std::string::npos ||
      (slash != std::string::npos && dot < slash))
    return path;
  return path.substr(0, dot);
}

// Seed for an independent purpose-specific stream: remixed so it cannot
// collide with the per-frame substreams the simulators derive from the run
// seed itself.
std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t tag) {
  return Rng::substream(seed, 0x0DDC0FFEull + tag).seed();
}

OfdmConfig read_ofdm(const KeyValueConfig& cfg) {
  OfdmConfig ofdm;
  ofdm.n_audio_subcarriers = static_cast<int>(
      cfg.get_int_or("ofdm.n_audio_subcarriers", ofdm.n_audio_subcarriers));
  ofdm.n_video_subcarriers = static_cast<int>(
      cfg.get_int_or("ofdm.n_video_subcarriers", ofdm.n_video_subcarriers));
  ofdm.n_pilots = static_cast<int>(cfg.get_int_or("ofdm.n_pilots", ofdm.n_pilots));
  ofdm.guard_interval_ns =
      cfg.get_double_or("ofdm.guard_interval_ns", ofdm.guard_interval_ns);
  ofdm.symbol_duration_us =
      cfg.get_double_or("ofdm.symbol_duration_us", ofdm.symbol_duration_us);
  ofdm.bandwidth_mhz = cfg.get_double_or("ofdm.bandwidth_mhz", ofdm.bandwidth_mhz);
  try {
    ofdm.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("ofdm.*: ") + e.what());
  }
  return ofdm;
}

FadingParams read_fading(const KeyValueConfig& cfg) {
  FadingParams fp;
  fp.m = cfg.get_double_or("fading.m", fp.m);
  fp.omega1 = cfg.get_double_or("fading.omega1", fp.omega1);
  fp.omega2 = cfg.get_double_or("fading.omega2", fp.omega2);
  fp.rho = cfg.get_double_or("fading.rho", fp.rho);
  try {
    fp.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("fading.*: ") + e.what());
  }
  return fp;
}

ChannelKind parse_channel_kind(const std::string& kind) {
  if (kind == "awgn") return ChannelKind::awgn;
  if (kind == "rayleigh") return ChannelKind::rayleigh;
  if (kind == "nakagami_block") return ChannelKind::nakagami_block;
  if (kind == "nakagami_combined") return ChannelKind::nakagami_combined;
  throw ConfigError("channel.kind must be awgn, rayleigh, nakagami_block, "
                    "or nakagami_combined (got '" +
                    kind + "')");
}

ChannelModel read_channel(const KeyValueConfig& cfg,
                          const std::string& default_kind) {
  ChannelModel model;
  model.kind = parse_channel_kind(cfg.get_string_or("channel.kind", default_kind));
  model.n_taps = static_cast<int>(cfg.get_int_or("channel.n_taps", model.n_taps));
  model.fading = read_fading(cfg);
  try {
    model.validate();
  } catch (const std::exception& e) {
    throw ConfigError(std::string("channel.*: ") + e.what());
  }
  return model;
}

std::vector<double> read_snr_grid(const KeyValueConfig& cfg,
                                  const std::string& key,
                                  const char* fallback) {
  const auto grid =
      cfg.has(key)
          ? cfg.get_grid(key)
          : KeyValueConfig::parse_text(std::string("g = ") + fallback)
                .get_grid("g");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (grid[i] <= grid[i - 1])
      throw ConfigError(key + " must be strictly increasing");
  return grid;
}

std::int64_t read_positive_int(const KeyValueConfig& cfg,
                               const std::string& key, std::int64_t fallback) {
  const std::int64_t v = cfg.get_int_or(key, fallback);
  if (v <= 0) throw ConfigError(key + " must be positive");
  return v;
}

BlockPartition contiguous_partition(const OfdmConfig& ofdm,
                                    const McsProfile& audio,
                                    const McsProfile& video) {
  BlockPartition part;
  part.audio_indices.reserve(ofdm.n_audio_subcarriers);
  part.video_indices.reserve(ofdm.n_video_subcarriers);
  for (int i = 0; i < ofdm.n_audio_subcarriers; ++i)
    part.audio_indices.push_back(i);
  for (int i = ofdm.n_audio_subcarriers; i < ofdm.n_data_subcarriers(); ++i)
    part.video_indices.push_back(i);
  part.audio_mcs = audio;
  part.video_mcs = video;
  return part;
}

BerRecord merge_classes(const BlockBerResult& res) {
  return make_ber_record(res.audio.snr_db,
                         res.audio.bit_errors + res.video.bit_errors,
                         res.audio.bits_sent + res.video.bits_sent);
}

}  // namespace

const std::vector<McsProfile>& builtin_mcs() {
  static const std::vector<McsProfile> schemes = [] {
    std::vector<McsProfile> v(3);
    v[0].name = "QPSK-1/2";
    v[0].modulation_order = 4;
    v[0].bits_per_symbol = 2;
    v[0].code_rate = {1, 2};
    v[0].beta = 1.65;
    v[1].name = "16QAM-2/3";
    v[1].modulation_order = 16;
    v[1].bits_per_symbol = 4;
    v[1].code_rate = {2, 3};
    v[1].beta = 7.49;
    v[2].name = "64QAM-3/4";
    v[2].modulation_order = 64;
    v[2].bits_per_symbol = 6;
    v[2].code_rate = {3, 4};
    v[2].beta = 26.6;
    return v;
  }();
  return schemes;
}

McsProfile find_mcs(const std::string& name) {
  std::string known;
  for (const auto& mcs : builtin_mcs()) {
    if (mcs.name == name) return mcs;
    if (!known.empty()) known += ", ";
    known += mcs.name;
  }
  throw ConfigError("unknown scheme '" + name + "' (known: " + known + ")");
}

void cmd_ber_sweep(const KeyValueConfig& cfg, std::uint64_t seed,
                   const std::string& out_path) {
  const OfdmConfig ofdm = read_ofdm(cfg);
  const auto grid = read_snr_grid(cfg, "sweep.snr_grid_db", "0:2:30");
  const std::int64_t frames =
      read_positive_int(cfg, "sweep.frames_per_point", 2000);
  const McsProfile low = find_mcs(cfg.get_string_or("sweep.low_mcs", "16QAM-2/3"));
  const McsProfile high = find_mcs(cfg.get_string_or("sweep.high_mcs", "64QAM-3/4"));
  if (low.modulation_order >= high.modulation_order)
    throw ConfigError("sweep.low_mcs must have a lower order than sweep.high_mcs");
  const ChannelModel model = read_channel(cfg, "rayleigh");
  cfg.require_all_consumed();

  struct Scenario {
    const char* name;
    BlockPartition part;
  };
  const std::vector<Scenario> scenarios = {
      {"all_low", contiguous_partition(ofdm, low, low)},
      {"all_high", contiguous_partition(ofdm, high, high)},
      {"unequal", contiguous_partition(ofdm, low, high)},
  };

  std::string body;
  for (const double snr_db : grid) {
    for (const auto& scenario : scenarios) {
      // Identical seeds across scenarios: the channel is drawn before the
      // bits in every frame, so all three scenarios see the same fading and
      // the BER ordering is a paired comparison.
      const BlockBerResult res = simulate_block_ber(
          ofdm, scenario.part, snr_db, static_cast<std::uint64_t>(frames),
          model, seed);
      const auto emit = [&](const char* cls, const BerRecord& rec) {
        body += fmt("%.6g,%s,%s,%.9e,%.9e,%llu\n", snr_db, scenario.name, cls,
                    rec.ber, rec.ci95_halfwidth,
                    static_cast<unsigned long long>(rec.bits_sent));
      };
      emit("audio", res.audio);
      emit("video", res.video);
    }
  }
  write_text_file(out_path,
                  header_block(cfg, seed, "snr_db,scenario,class,ber,ci95,bits") +
                      body);
}

void cmd_rho_sweep(const KeyValueConfig& cfg, std::uint64_t seed,
                   const std::string& out_path) {
  const OfdmConfig ofdm = read_ofdm(cfg);
  const auto grid = read_snr_grid(cfg, "sweep.snr_grid_db", "0:2:20");
  const std::int64_t frames =
      read_positive_int(cfg, "sweep.frames_per_point", 3000);
  const McsProfile mcs = find_mcs(cfg.get_string_or("rho.mcs", "16QAM-2/3"));
  const std::vector<double> rhos =
      cfg.has("rho.list") ? cfg.get_grid("rho.list")
                          : std::vector<double>{0.1, 0.5, 0.8};
  FadingParams fp = read_fading(cfg);
  cfg.require_all_consumed();

  const BlockPartition part = contiguous_partition(ofdm, mcs, mcs);
  const double omega_total = fp.omega1 + fp.omega2;

  std::string body;
  for (const double snr_db : grid) {
    const double snr_lin = std::pow(10.0, snr_db / 10.0);
    for (const double rho : rhos) {
      ChannelModel model;
      model.kind = ChannelKind::nakagami_combined;
      model.fading = fp;
      model.fading.rho = rho;
      try {
        model.validate();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("rho sweep channel: ") + e.what());
      }
      const BerRecord rec = merge_classes(simulate_block_ber(
          ofdm, part, snr_db, static_cast<std::uint64_t>(frames), model, seed));
      // Analytic companion: symbol error probability of the same-order PSK
      // template over the combined-SNR law, branch averages split by the
      // branch power ratio.
      SnrBranchParams sp;
      sp.gbar1 = snr_lin * fp.omega1 / omega_total;
      sp.gbar2 = snr_lin * fp.omega2 / omega_total;
      const double pe =
          avg_error_prob_mpsk(sp, fp.m, rho, mcs.modulation_order);
      body += fmt("%.6g,%.6g,%.9e,%.9e,%llu,%.9e\n", snr_db, rho, rec.ber,
                  rec.ci95_halfwidth,
                  static_cast<unsigned long long>(rec.bits_sent), pe);
    }
  }
  write_text_file(
      out_path,
      header_block(cfg, seed, "snr_db,rho,ber,ci95,bits,pe_analytic") + body);
}

void cmd_eesm_calibrate(const KeyValueConfig& cfg, std::uint64_t seed,
                        const std::string& out_path) {
  const OfdmConfig ofdm = read_ofdm(cfg);
  std::vector<McsProfile> schemes;
  if (cfg.has("calibrate.mcs_list")) {
    for (const auto& name : cfg.get_string_list("calibrate.mcs_list"))
      schemes.push_back(find_mcs(name));
  } else {
    schemes = builtin_mcs();
  }
  const auto awgn_grid = read_snr_grid(cfg, "awgn.snr_grid_db", "-2:1:32");
  const std::int64_t awgn_bits =
      read_positive_int(cfg, "awgn.bits_per_point", 200000);
  const std::int64_t n_real =
      read_positive_int(cfg, "calibrate.realizations", 60);
  const std::int64_t frames =
      read_positive_int(cfg, "calibrate.frames_per_realization", 400);
  const auto levels = cfg.has("calibrate.snr_levels_db")
                          ? cfg.get_grid("calibrate.snr_levels_db")
                          : std::vector<double>{6, 9, 12, 15, 18, 21, 24};
  const int n_taps = static_cast<int>(cfg.get_int_or("channel.n_taps", 8));
  if (n_taps < 1) throw ConfigError("channel.n_taps must be positive");
  cfg.require_all_consumed();

  const std::string stem = path_stem(out_path);
  const auto beta_grid = standard_beta_grid_db();

  std::string curve_body;
  std::string beta_body;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    const McsProfile& mcs = schemes[s];
    const AwgnRefTable table = generate_awgn_ref(
        mcs, awgn_grid, static_cast<std::uint64_t>(awgn_bits),
        derived_seed(seed, 100 + s));
    table.save(stem + "_awgn_" + sanitize_filename(mcs.name) + ".txt");

    // Frequency-selective sample set: fixed tap profile class, average SNR
    // cycling through the configured levels.
    Rng chan_rng(derived_seed(seed, 200 + s));
    const std::uint64_t sim_seed = derived_seed(seed, 300 + s);
    const BlockPartition part = contiguous_partition(ofdm, mcs, mcs);
    std::vector<std::vector<double>> samples;
    std::vector<double> measured;
    samples.reserve(n_real);
    for (std::int64_t j = 0; j < n_real; ++j) {
      ChannelRealization ch = rayleigh_channel(ofdm, n_taps, chan_rng);
      const double level_db = levels[j % levels.size()];
      ch.noise_var = std::pow(10.0, -level_db / 10.0);
      std::vector<double> snrs(ch.gains.size());
      for (std::size_t i = 0; i < ch.gains.size(); ++i)
        snrs[i] = std::norm(ch.gains[i]) / ch.noise_var;
      const BerRecord rec = merge_classes(simulate_fixed_realization(
          ofdm, part, ch, static_cast<std::uint64_t>(frames), sim_seed,
          static_cast<std::uint64_t>(j * frames)));
      // Error-free realizations are recorded at half an error so the
      // log-domain calibration objective stays finite.
      const double ber =
          rec.bit_errors == 0
              ? 0.5 / static_cast<double>(rec.bits_sent)
              : rec.ber;
      samples.push_back(std::move(snrs));
      measured.push_back(ber);
    }
    const CalibrationResult cal = calibrate_beta(mcs, samples, measured, table);
    beta_body += fmt("%s\t%.6f\t%s\n", mcs.name.c_str(), cal.beta,
                     cal.degenerate ? "degenerate" : "ok");

    // Representative effective-SNR-vs-beta curve (first sampled
    // realization) with its quadratic fit.
    const auto curve = snr_eff_vs_beta_curve(samples.front(), {}, 1.0,
                                             BetaBranch::audio, beta_grid);
    const QuadraticCurve q = fit_quadratic(curve);
    for (const auto& pt : curve) {
      curve_body += fmt("%s,%.6g,%.9g,%.9g,%.9g\n", mcs.name.c_str(),
                        pt.beta_db, pt.snr_eff_db,
                        eval_quadratic(q, pt.beta_db).snr_eff_db,
                        q.rms_residual);
    }
  }

  write_text_file(stem + "_betas.txt",
                  header_block(cfg, seed, "# scheme\tbeta\tstatus") + beta_body);
  write_text_file(
      out_path,
      header_block(cfg, seed, "mcs,beta_db,snr_eff_db,quad_fit_db,rms_residual") +
          curve_body);
}

void cmd_analytic(const KeyValueConfig& cfg, std::uint64_t seed,
                  const std::string& out_path) {
  const std::string kind = cfg.get_string("analytic.kind");
  const auto grid = cfg.get_grid("analytic.grid");

  std::string body;
  if (kind == "nakagami_envelope_pdf") {
    const double m = cfg.get_double_or("fading.m", 1.0);
    const double omega = cfg.get_double_or("fading.omega", 1.0);
    cfg.require_all_consumed();
    for (const double x : grid)
      body += fmt("%.9g,%.9e\n", x, nakagami_envelope_pdf(m, omega, x));
  } else if (kind == "combined_envelope_pdf") {
    const FadingParams fp = read_fading(cfg);
    cfg.require_all_consumed();
    for (const double x : grid)
      body += fmt("%.9g,%.9e\n", x, combined_envelope_pdf(fp, x));
  } else if (kind == "combined_snr_pdf" || kind == "mgf") {
    SnrBranchParams sp;
    sp.gbar1 = cfg.get_double_or("snr.gbar1", 1.0);
    sp.gbar2 = cfg.get_double_or("snr.gbar2", 1.0);
    const double m = cfg.get_double_or("fading.m", 1.0);
    const double rho = cfg.get_double_or("fading.rho", 0.0);
    cfg.require_all_consumed();
    for (const double x : grid) {
      const double v = kind == "mgf" ? mgf(sp, m, rho, x)
                                     : combined_snr_pdf(sp, m, rho, x);
      body += fmt("%.9g,%.9e\n", x, v);
    }
  } else if (kind == "reduced_snr_pdf_m1") {
    const double gbar = cfg.get_double_or("snr.gbar", 1.0);
    const double rho = cfg.get_double_or("fading.rho", 0.0);
    cfg.require_all_consumed();
    for (const double x : grid)
      body += fmt("%.9g,%.9e\n", x, reduced_snr_pdf_m1(gbar, rho, x));
  } else if (kind == "pe_mpsk") {
    const int order =
        static_cast<int>(cfg.get_int_or("analytic.modulation_order", 16));
    const double m = cfg.get_double_or("fading.m", 1.0);
    const double rho = cfg.get_double_or("fading.rho", 0.0);
    const double omega1 = cfg.get_double_or("fading.omega1", 1.0);
    const double omega2 = cfg.get_double_or("fading.omega2", 1.0);
    cfg.require_all_consumed();
    for (const double snr_db : grid) {
      const double snr_lin = std::pow(10.0, snr_db / 10.0);
      SnrBranchParams sp;
      sp.gbar1 = snr_lin * omega1 / (omega1 + omega2);
      sp.gbar2 = snr_lin * omega2 / (omega1 + omega2);
      body += fmt("%.9g,%.9e\n", snr_db,
                  avg_error_prob_mpsk(sp, m, rho, order));
    }
  } else {
    throw ConfigError(
        "analytic.kind must be one of nakagami_envelope_pdf, "
        "combined_envelope_pdf, combined_snr_pdf, reduced_snr_pdf_m1, mgf, "
        "pe_mpsk (got '" +
        kind + "')");
  }
  write_text_file(out_path, header_block(cfg, seed, "x,value") + body);
}

void cmd_adapt_trace(const KeyValueConfig& cfg, std::uint64_t seed,
                     const std::string& out_path) {
  const OfdmConfig ofdm = read_ofdm(cfg);
  const std::int64_t frames = read_positive_int(cfg, "adapt.frames", 300);
  const int period = static_cast<int>(
      read_positive_int(cfg, "adapt.full_report_period", 8));
  const double target_ber = cfg.get_double_or("adapt.target_ber", 1e-3);
  if (target_ber <= 0.0 || target_ber >= 1.0)
    throw ConfigError("adapt.target_ber must lie in (0, 1)");
  const double ber_gate = cfg.get_double_or("adapt.ber_gate", 1e-2);
  if (ber_gate <= 0.0 || ber_gate >= 1.0)
    throw ConfigError("adapt.ber_gate must lie in (0, 1)");
  const std::string schedule_kind =
      cfg.get_string_or("adapt.schedule", "sweep");
  if (schedule_kind != "sweep" && schedule_kind != "scaled" &&
      schedule_kind != "static")
    throw ConfigError("adapt.schedule must be sweep, scaled, or static");
  const double snr_start = cfg.get_double_or("adapt.snr_start_db", 5.0);
  const double snr_stop = cfg.get_double_or("adapt.snr_stop_db", 25.0);
  const int n_taps = static_cast<int>(cfg.get_int_or("channel.n_taps", 8));
  if (n_taps < 1) throw ConfigError("channel.n_taps must be positive");
  const auto awgn_grid = read_snr_grid(cfg, "awgn.snr_grid_db", "-2:1:32");
  const std::int64_t awgn_bits =
      read_positive_int(cfg, "awgn.bits_per_point", 150000);

  AdaptState state;
  for (std::size_t s = 0; s < builtin_mcs().size(); ++s) {
    const McsProfile& mcs = builtin_mcs()[s];
    const AwgnRefTable table = generate_awgn_ref(
        mcs, awgn_grid, static_cast<std::uint64_t>(awgn_bits),
        derived_seed(seed, 100 + s));
    state.mcs_ladder.push_back({mcs, table.snr_at_ber(target_ber).snr_db});
  }
  state.current_selection = initial_selection(state.mcs_ladder);
  if (cfg.has("adapt.fixed_shift_db"))
    state.fixed_shift_db = cfg.get_double("adapt.fixed_shift_db");
  state.max_reference_age = static_cast<int>(
      read_positive_int(cfg, "adapt.max_reference_age", 64));
  state.zero_feedback_delay =
      cfg.get_bool_or("adapt.zero_feedback_delay", false);
  cfg.require_all_consumed();

  // Channel schedule: "sweep" redraws the tap profile each frame while the
  // average SNR ramps from start to stop; "scaled" freezes one profile and
  // only moves the average (the vertical-shift regime); "static" freezes
  // everything at the start SNR.
  std::vector<ChannelRealization> schedule;
  schedule.reserve(frames);
  Rng chan_rng(derived_seed(seed, 7));
  ChannelRealization frozen = rayleigh_channel(ofdm, n_taps, chan_rng);
  for (std::int64_t k = 0; k < frames; ++k) {
    const double ramp =
        frames > 1 ? static_cast<double>(k) / (frames - 1.0) : 0.0;
    double avg_db = snr_start + (snr_stop - snr_start) * ramp;
    ChannelRealization ch;
    if (schedule_kind == "sweep") {
      ch = rayleigh_channel(ofdm, n_taps, chan_rng);
    } else if (schedule_kind == "scaled") {
      ch = frozen;
    } else {  // static
      ch = frozen;
      avg_db = snr_start;
    }
    ch.noise_var = std::pow(10.0, -avg_db / 10.0);
    schedule.push_back(std::move(ch));
  }

  const BlockPartition part = contiguous_partition(
      ofdm, state.mcs_ladder.front().mcs, state.mcs_ladder.front().mcs);
  const AdaptTrace trace =
      run_adaptation_trace(ofdm, part, schedule, period, state, seed);

  std::string body;
  for (const auto& rec : trace.records) body += encode_trace_line(rec) + "\n";
  const std::uint64_t delivered = goodput_bits(trace, ber_gate);
  const double elapsed_us =
      static_cast<double>(frames) * ofdm.symbol_duration_us;
  body += fmt("# summary: goodput_bits=%llu goodput_mbps=%.4f ber_gate=%.3g\n",
              static_cast<unsigned long long>(delivered),
              static_cast<double>(delivered) / elapsed_us, ber_gate);
  body += fmt("# summary: full_reports=%llu shift_reports=%llu\n",
              static_cast<unsigned long long>(trace.full_reports),
              static_cast<unsigned long long>(trace.shift_reports));
  body += fmt(
      "# summary: feedback_scalars=%llu full_every_frame_scalars=%llu\n",
      static_cast<unsigned long long>(trace.feedback_scalars),
      static_cast<unsigned long long>(frames * kFullReportScalars));
  write_text_file(
      out_path,
      header_block(
          cfg, seed,
          "frame,audio_mcs,video_mcs,pred_eff_snr_db,realized_ber_audio,"
          "realized_ber_video") +
          body);
}

}  // namespace uep
