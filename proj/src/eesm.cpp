#include "uep/eesm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <stdexcept>

#include "uep/errors.hpp"

namespace uep {

namespace {

bool supported_order(int order) {
  return order == 4 || order == 16 || order == 64;
}

int log2_int(int v) {
  int b = 0;
  while (v > 1) {
    v >>= 1;
    ++b;
  }
  return b;
}

}  // namespace

void McsProfile::validate() const {
  if (!supported_order(modulation_order))
    throw std::domain_error("unsupported modulation order " +
                            std::to_string(modulation_order) +
                            " (expected 4, 16 or 64)");
  if (bits_per_symbol != log2_int(modulation_order))
    throw std::domain_error("bits_per_symbol inconsistent with order for " +
                            name);
  if (!(beta > 0.0))
    throw std::domain_error("calibration beta must be positive for " + name);
  if (code_rate.num <= 0 || code_rate.den <= 0 ||
      code_rate.num > code_rate.den)
    throw std::domain_error("code rate must be a fraction in (0, 1] for " +
                            name);
}

void BlockPartition::validate() const {
  if (audio_indices.empty() || video_indices.empty())
    throw std::domain_error("both subcarrier sets must be nonempty");
  std::set<int> audio(audio_indices.begin(), audio_indices.end());
  for (int i : video_indices)
    if (audio.count(i))
      throw std::domain_error("audio and video subcarrier sets overlap at " +
                              std::to_string(i));
  audio_mcs.validate();
  video_mcs.validate();
  if (audio_mcs.modulation_order >= video_mcs.modulation_order)
    throw std::domain_error(
        "the audio set must use a strictly lower modulation order");
}

void AwgnRefTable::validate() const {
  if (points.size() < 2)
    throw std::domain_error("reference table needs at least two points");
  for (size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].ber > 0.0) || points[i].ber > 1.0)
      throw std::domain_error("reference BER must lie in (0, 1]");
    if (i > 0) {
      if (!(points[i].snr_db > points[i - 1].snr_db))
        throw std::domain_error("reference SNRs must be strictly increasing");
      if (points[i].ber > points[i - 1].ber)
        throw std::domain_error("reference BER must be non-increasing");
    }
  }
}

AwgnRefTable::BerLookup AwgnRefTable::lookup_log10_ber(double snr_db) const {
  validate();
  if (snr_db <= points.front().snr_db)
    return {std::log10(points.front().ber), snr_db < points.front().snr_db};
  if (snr_db >= points.back().snr_db)
    return {std::log10(points.back().ber), snr_db > points.back().snr_db};
  size_t i = 1;
  while (points[i].snr_db < snr_db) ++i;
  const double x0 = points[i - 1].snr_db, x1 = points[i].snr_db;
  const double y0 = std::log10(points[i - 1].ber);
  const double y1 = std::log10(points[i].ber);
  return {y0 + (y1 - y0) * (snr_db - x0) / (x1 - x0), false};
}

AwgnRefTable::SnrLookup AwgnRefTable::snr_at_ber(double ber) const {
  validate();
  if (!(ber > 0.0)) throw std::domain_error("target BER must be positive");
  // Walk from low SNR to the first point meeting the target.
  size_t i = 0;
  while (i < points.size() && points[i].ber > ber) ++i;
  if (i == points.size()) return {points.back().snr_db, true};  // unreachable
  if (i == 0) return {points.front().snr_db, true};  // already met at entry
  const double y0 = std::log10(points[i - 1].ber);
  const double y1 = std::log10(points[i].ber);
  if (y0 == y1) return {points[i].snr_db, false};  // flat segment
  const double t = (std::log10(ber) - y0) / (y1 - y0);
  return {points[i - 1].snr_db + t * (points[i].snr_db - points[i - 1].snr_db),
          false};
}

void AwgnRefTable::save(const std::string& path) const {
  validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << "# mcs: " << mcs_name << "\n";
  out << "# snr_db\tber\n";
  char line[64];
  for (const auto& p : points) {
    std::snprintf(line, sizeof(line), "%.6f\t%.9e\n", p.snr_db, p.ber);
    out << line;
  }
  if (!out) throw IoError("write failure on " + path);
}

AwgnRefTable AwgnRefTable::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  AwgnRefTable table;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string tag = "# mcs: ";
      if (line.rfind(tag, 0) == 0) table.mcs_name = line.substr(tag.size());
      continue;
    }
    std::istringstream fields(line);
    AwgnRefPoint p;
    if (!(fields >> p.snr_db >> p.ber))
      throw IoError(path + ":" + std::to_string(lineno) +
                    ": expected 'snr_db<TAB>ber'");
    table.points.push_back(p);
  }
  try {
    table.validate();
  } catch (const std::domain_error& e) {
    throw IoError(path + ": " + e.what());
  }
  return table;
}

double effective_snr(const std::vector<double>& gammas_audio,
                     const std::vector<double>& gammas_video, double beta1,
                     double beta2, double beta_out) {
  if (!(beta1 > 0.0) || !(beta2 > 0.0) || !(beta_out > 0.0))
    throw std::domain_error("effective SNR betas must be positive");
  if (gammas_audio.empty() && gammas_video.empty())
    throw std::invalid_argument(
        "effective SNR needs at least one subcarrier SNR");

  const auto check = [](double g) {
    if (!std::isfinite(g) || g < 0.0)
      throw std::domain_error("subcarrier SNRs must be finite and >= 0");
  };

  // log-sum-exp: factor out the largest exponent so that a block holding
  // 60 dB subcarriers does not round the whole sum to zero.
  double tmax = -std::numeric_limits<double>::infinity();
  for (double g : gammas_audio) {
    check(g);
    tmax = std::max(tmax, -g / beta1);
  }
  for (double g : gammas_video) {
    check(g);
    tmax = std::max(tmax, -g / beta2);
  }

  double sum = 0.0;
  for (double g : gammas_audio) sum += std::exp(-g / beta1 - tmax);
  for (double g : gammas_video) sum += std::exp(-g / beta2 - tmax);
  const double n =
      static_cast<double>(gammas_audio.size() + gammas_video.size());
  return -beta_out * (tmax + std::log(sum / n));
}

std::vector<double> standard_beta_grid_db() {
  std::vector<double> grid(41);
  for (int i = 0; i <= 40; ++i) grid[i] = -10.0 + 0.75 * i;
  return grid;
}

std::vector<CurvePoint> snr_eff_vs_beta_curve(
    const std::vector<double>& gammas_audio,
    const std::vector<double>& gammas_video, double fixed_other_beta,
    BetaBranch which, const std::vector<double>& grid_db) {
  if (grid_db.empty()) throw std::invalid_argument("beta grid is empty");
  for (size_t i = 1; i < grid_db.size(); ++i)
    if (!(grid_db[i] > grid_db[i - 1]))
      throw std::invalid_argument("beta grid must be strictly increasing");

  // Per-class convention: the curve predicts the selected class's codeword,
  // so only that class's subcarriers enter the sum (the other class carries
  // a different codeword). The other branch's beta is forwarded into its
  // (empty) slot; a flat channel therefore maps to its own SNR at every
  // grid point, which is what the downstream quadratic CQI relies on.
  const bool audio = which == BetaBranch::audio;
  const std::vector<double>& own = audio ? gammas_audio : gammas_video;
  const std::vector<double> none;

  std::vector<CurvePoint> out;
  out.reserve(grid_db.size());
  for (double bdb : grid_db) {
    const double blin = std::pow(10.0, bdb / 10.0);
    const double eff =
        audio ? effective_snr(own, none, blin, fixed_other_beta, blin)
              : effective_snr(none, own, fixed_other_beta, blin, blin);
    out.push_back({bdb, 10.0 * std::log10(eff)});
  }
  return out;
}

QuadraticCurve fit_quadratic(const std::vector<CurvePoint>& curve) {
  const size_t n = curve.size();
  if (n < 3)
    throw std::invalid_argument("quadratic fit needs at least three points");

  double xbar = 0.0;
  for (const auto& p : curve) xbar += p.beta_db;
  xbar /= static_cast<double>(n);

  // Normal equations in the centered abscissa u = x - xbar.
  double s1 = 0, s2 = 0, s3 = 0, s4 = 0;
  double t0 = 0, t1 = 0, t2 = 0;
  for (const auto& p : curve) {
    const double u = p.beta_db - xbar;
    const double u2 = u * u;
    s1 += u;
    s2 += u2;
    s3 += u2 * u;
    s4 += u2 * u2;
    t0 += p.snr_eff_db;
    t1 += u * p.snr_eff_db;
    t2 += u2 * p.snr_eff_db;
  }

  double mat[3][4] = {{static_cast<double>(n), s1, s2, t0},
                      {s1, s2, s3, t1},
                      {s2, s3, s4, t2}};

  // Gaussian elimination with partial pivoting on the 3x3 system; a tiny
  // pivot means the abscissas do not span a quadratic (rank deficiency).
  const double scale = std::max({std::fabs(s2), std::fabs(s4), 1.0});
  for (int col = 0; col < 3; ++col) {
    int piv = col;
    for (int r = col + 1; r < 3; ++r)
      if (std::fabs(mat[r][col]) > std::fabs(mat[piv][col])) piv = r;
    if (std::fabs(mat[piv][col]) < 1e-12 * scale)
      throw std::invalid_argument(
          "quadratic fit is rank deficient (degenerate beta grid)");
    if (piv != col)
      for (int k = 0; k < 4; ++k) std::swap(mat[piv][k], mat[col][k]);
    for (int r = 0; r < 3; ++r) {
      if (r == col) continue;
      const double f = mat[r][col] / mat[col][col];
      for (int k = col; k < 4; ++k) mat[r][k] -= f * mat[col][k];
    }
  }
  const double p0 = mat[0][3] / mat[0][0];
  const double p1 = mat[1][3] / mat[1][1];
  const double p2 = mat[2][3] / mat[2][2];

  QuadraticCurve q;
  q.c = p2;
  q.b = p1 - 2.0 * p2 * xbar;
  q.a = p0 - p1 * xbar + p2 * xbar * xbar;
  q.fit_lo = curve.front().beta_db;
  q.fit_hi = curve.back().beta_db;

  double ss = 0.0;
  for (const auto& p : curve) {
    const double u = p.beta_db - xbar;
    const double fit = p0 + p1 * u + p2 * u * u;
    ss += (p.snr_eff_db - fit) * (p.snr_eff_db - fit);
  }
  q.rms_residual = std::sqrt(ss / static_cast<double>(n));
  return q;
}

QuadEval eval_quadratic(const QuadraticCurve& q, double beta_db) {
  QuadEval e;
  e.snr_eff_db = q.a + q.b * beta_db + q.c * beta_db * beta_db;
  e.extrapolated = beta_db < q.fit_lo || beta_db > q.fit_hi;
  return e;
}

std::optional<double> invert_quadratic(const QuadraticCurve& q,
                                       double target_snr_db) {
  const double c = q.c;
  const double b = q.b;
  const double a = q.a - target_snr_db;

  std::vector<double> roots;
  if (std::fabs(c) < 1e-14) {
    if (std::fabs(b) < 1e-14) return std::nullopt;  // constant curve
    roots.push_back(-a / b);
  } else {
    const double disc = b * b - 4.0 * c * a;
    if (disc < 0.0) return std::nullopt;
    const double sq = std::sqrt(disc);
    // Citardauq-style split avoids cancellation between -b and sqrt(disc).
    const double qq = -0.5 * (b + (b >= 0.0 ? sq : -sq));
    if (qq != 0.0) {
      roots.push_back(qq / c);
      roots.push_back(a / qq);
    } else {  // b == 0 and disc == -4ca
      roots.push_back(sq / (2.0 * c));
      roots.push_back(-sq / (2.0 * c));
    }
  }

  std::optional<double> best;
  for (double r : roots) {
    if (r < q.fit_lo || r > q.fit_hi) continue;
    if (!best || r < *best) best = r;
  }
  return best;
}

CalibrationResult calibrate_beta(
    const McsProfile& mcs,
    const std::vector<std::vector<double>>& channel_samples,
    const std::vector<double>& measured_bler, const AwgnRefTable& ref) {
  mcs.validate();
  ref.validate();
  if (channel_samples.size() != measured_bler.size())
    throw std::invalid_argument(
        "calibration needs one measured BLER per channel sample");
  if (channel_samples.size() < 8)
    throw std::invalid_argument("calibration needs at least 8 samples");
  for (double b : measured_bler)
    if (!(b > 0.0) || b > 1.0)
      throw std::domain_error("measured BLER must lie in (0, 1]");

  const auto objective = [&](double beta) {
    double ss = 0.0;
    for (size_t k = 0; k < channel_samples.size(); ++k) {
      const double eff =
          effective_snr(channel_samples[k], {}, beta, beta, beta);
      const double eff_db = 10.0 * std::log10(eff);
      const double pred = ref.lookup_log10_ber(eff_db).log10_ber;
      const double d = pred - std::log10(measured_bler[k]);
      ss += d * d;
    }
    return ss;
  };

  // Coarse log-spaced scan to bracket the optimum (the objective need not
  // be unimodal over three decades of beta).
  constexpr double kLo = 0.1;
  constexpr double kHi = 100.0;
  constexpr int kScan = 64;
  double best_val = std::numeric_limits<double>::infinity();
  double worst_val = -best_val;
  int best_idx = 0;
  std::vector<double> grid(kScan), vals(kScan);
  for (int i = 0; i < kScan; ++i) {
    grid[i] = kLo * std::pow(kHi / kLo, i / (kScan - 1.0));
    vals[i] = objective(grid[i]);
    if (vals[i] < best_val) {
      best_val = vals[i];
      best_idx = i;
    }
    worst_val = std::max(worst_val, vals[i]);
  }

  if (worst_val - best_val < 1e-12)
    // Flat channels: every beta maps to the same effective SNR. Report the
    // midpoint of the search range, flagged so callers do not trust it.
    return {0.5 * (kLo + kHi), true};

  if (best_idx == 0 || best_idx == kScan - 1)
    throw std::range_error(
        "beta calibration optimum pinned to the search boundary "
        "(inconsistent channel samples or reference table)");

  // Golden-section search inside the bracketing scan cells.
  double lo = grid[best_idx - 1];
  double hi = grid[best_idx + 1];
  const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - gr * (hi - lo);
  double x2 = lo + gr * (hi - lo);
  double f1 = objective(x1);
  double f2 = objective(x2);
  while (hi - lo > 1e-4) {
    if (f1 < f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = objective(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = objective(x2);
    }
  }
  return {0.5 * (lo + hi), false};
}

}  // namespace uep
