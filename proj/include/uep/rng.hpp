#pragma once

#include <complex>
#include <cstdint>
#include <cmath>
#include <vector>

namespace uep {

// Counter-based 64-bit generator. Output word i is the SplitMix64 finalizer
// applied to key + i * 0x9E3779B97F4A7C15. The mapping (seed, stream) -> key
// is fixed below and must not change between releases: simulation results are
// contractually reproducible from the seed alone.
//
// Substreams let a frame loop run in parallel without changing results: frame
// k always draws from substream(seed, k) no matter which thread runs it.
class Rng {
 public:
  explicit Rng(uint64_t seed) : key_(mix(seed ^ kSeedSalt)), seed_(seed) {}

  static Rng substream(uint64_t seed, uint64_t stream) {
    Rng r(seed);
    r.key_ = mix(r.key_ + stream * kGolden);
    return r;
  }

  uint64_t seed() const { return seed_; }

  uint64_t next_u64() { return mix(key_ + (++counter_) * kGolden); }

  // Uniform in [0, 1), 53-bit resolution.
  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; consumes exactly two uniforms per pair.
  double next_gauss() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = 1.0 - next_unit();  // (0, 1], keeps log finite
    double u2 = next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * kPi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Circularly symmetric complex normal with E|z|^2 = total_var.
  std::complex<double> next_cnormal(double total_var) {
    double s = std::sqrt(total_var * 0.5);
    double re = next_gauss();
    double im = next_gauss();
    return {s * re, s * im};
  }

  // n random bits, one per byte (0/1), drawn LSB-first from 64-bit words.
  void next_bits(std::vector<uint8_t>& out, size_t n) {
    out.resize(n);
    size_t i = 0;
    while (i < n) {
      uint64_t w = next_u64();
      size_t take = std::min<size_t>(64, n - i);
      for (size_t j = 0; j < take; ++j) out[i + j] = static_cast<uint8_t>((w >> j) & 1u);
      i += take;
    }
  }

 private:
  static constexpr uint64_t kGolden = 0x9E3779B97F4A7C15ull;
  static constexpr uint64_t kSeedSalt = 0xA5A5B4B4C3C3D2D2ull;
  static constexpr double kPi = 3.14159265358979323846;

  static uint64_t mix(uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  uint64_t key_;
  uint64_t seed_;
  uint64_t counter_ = 0;
  bool have_cached_ = false;
  double cached_ = 0.0;
};

}  // namespace uep
