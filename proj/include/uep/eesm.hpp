#pragma once

#include <optional>
#include <string>
#include <vector>

namespace uep {

// Exact nominal code rate, carried as scheme metadata. All error-rate paths
// in this tool are uncoded; the rate only enters throughput bookkeeping.
struct CodeRate {
  int num = 1;
  int den = 1;
};

// One modulation/coding scheme: square-QAM order, its calibration parameter
// beta (linear SNR units) for the exponential effective-SNR map, and the
// nominal rate.
struct McsProfile {
  std::string name;
  int modulation_order = 4;
  int bits_per_symbol = 2;
  CodeRate code_rate;
  double beta = 1.0;

  void validate() const;  // throws std::domain_error
};

// The audio/video split of one OFDM block: two disjoint subcarrier index
// sets, each with its own scheme. The audio set must use the strictly lower
// order (the whole point of the unequal split).
struct BlockPartition {
  std::vector<int> audio_indices;
  std::vector<int> video_indices;
  McsProfile audio_mcs;
  McsProfile video_mcs;

  void validate() const;
};

// Quadratic model of effective SNR (dB) as a function of beta (dB):
// snr_eff_db(beta_db) = a + b*beta_db + c*beta_db^2, valid on
// [fit_lo, fit_hi].
struct QuadraticCurve {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
  double fit_lo = 0.0;
  double fit_hi = 0.0;
  double rms_residual = 0.0;
};

struct QuadEval {
  double snr_eff_db = 0.0;
  bool extrapolated = false;  // query fell outside the fit domain
};

// Reference AWGN performance curve of one scheme: (SNR dB, BER) samples,
// ascending in SNR, BER positive and non-increasing. Lookups interpolate
// linearly in (snr_db, log10 ber) space and clamp outside the table.
struct AwgnRefPoint {
  double snr_db = 0.0;
  double ber = 0.0;
  bool floored = false;  // zero observed errors, recorded at half an error
};

struct AwgnRefTable {
  std::string mcs_name;
  std::vector<AwgnRefPoint> points;

  void validate() const;

  struct BerLookup {
    double log10_ber = 0.0;
    bool clamped = false;
  };
  BerLookup lookup_log10_ber(double snr_db) const;

  struct SnrLookup {
    double snr_db = 0.0;
    bool clamped = false;
  };
  // Lowest SNR at which the table reaches the target BER.
  SnrLookup snr_at_ber(double ber) const;

  // Text format: '#' comment lines (the first records the scheme name),
  // then one "snr_db<TAB>ber" pair per line, ascending in SNR.
  void save(const std::string& path) const;
  static AwgnRefTable load(const std::string& path);
};

// Exponential effective-SNR map over a mixed block: the audio subcarriers
// are exponentially averaged with beta1, the video subcarriers with beta2,
// and the combined mean is pulled back through -beta_out * ln(.). Computed
// in log-sum-exp form so 60 dB subcarriers cannot underflow the sum.
// One of the two lists may be empty (homogeneous block); not both.
double effective_snr(const std::vector<double>& gammas_audio,
                     const std::vector<double>& gammas_video, double beta1,
                     double beta2, double beta_out);

enum class BetaBranch { audio, video };

struct CurvePoint {
  double beta_db = 0.0;
  double snr_eff_db = 0.0;
};

// Standard abscissa for effective-SNR-vs-beta curves: 41 uniform points
// over beta_dB in [-10, 20], wide enough to bracket calibrated betas for
// QPSK through 64QAM with margin.
std::vector<double> standard_beta_grid_db();

// Sweeps the chosen branch's beta over grid_db (the outer beta follows the
// swept branch; the other branch's beta stays fixed) and samples the
// effective SNR in dB. The prediction is per class: each class's codeword
// occupies only its own subcarriers, so only those SNRs enter its curve,
// and a flat channel yields a constant curve at the channel SNR.
std::vector<CurvePoint> snr_eff_vs_beta_curve(
    const std::vector<double>& gammas_audio,
    const std::vector<double>& gammas_video, double fixed_other_beta,
    BetaBranch which, const std::vector<double>& grid_db);

// Ordinary least squares for the quadratic model, solved via the normal
// equations with a mean-centered abscissa for conditioning.
QuadraticCurve fit_quadratic(const std::vector<CurvePoint>& curve);

QuadEval eval_quadratic(const QuadraticCurve& q, double beta_db);

// Solves a + b*beta + c*beta^2 = target_snr_db for beta_db within the fit
// domain. Two in-domain roots return the smaller (the conservative choice:
// a smaller beta maps selective channels to a lower effective SNR). No
// in-domain real root returns nullopt.
std::optional<double> invert_quadratic(const QuadraticCurve& q,
                                       double target_snr_db);

struct CalibrationResult {
  double beta = 1.0;
  bool degenerate = false;  // flat objective (e.g. all-flat channels)
};

// Fits the per-scheme beta: minimizes the squared log10-BLER error between
// the reference-table prediction at the effective SNR and the measured
// values, by golden-section search over beta in [0.1, 100]. A flat
// objective returns the midpoint flagged degenerate; an optimum pinned to
// the search boundary throws std::range_error (miscalibrated inputs).
CalibrationResult calibrate_beta(
    const McsProfile& mcs,
    const std::vector<std::vector<double>>& channel_samples,
    const std::vector<double>& measured_bler, const AwgnRefTable& ref);

}  // namespace uep
