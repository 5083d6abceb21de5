#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace netfactor {

/// Deterministic random stream. Distribution sampling is implemented by hand
/// (bit-shift uniforms, Box-Muller normals) so that identical seeds give
/// identical values across standard libraries; streams for parallel restarts
/// are derived independently from (seed, stream index).
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  static RandomStream derived(std::uint64_t seed, std::uint64_t stream) {
    // splitmix64 over the pair; decorrelates consecutive stream indices.
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    z = z ^ (z >> 31);
    return RandomStream(z);
  }

  /// Uniform in [0, 1).
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * u01(); }

  /// Standard normal via Box-Muller.
  double gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * u01() - 1.0;
      v = 2.0 * u01() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    double f = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * f;
    have_spare_ = true;
    return u * f;
  }

  std::uint64_t bits() { return engine_(); }

  /// Uniform integer in [0, n); n must be small against 2^64.
  std::uint64_t below(std::uint64_t n) { return engine_() % n; }

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace netfactor
