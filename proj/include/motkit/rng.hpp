#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace motkit {

// Deterministic random numbers with identical output on every platform.
//
// std::mt19937_64 itself is fully specified by the standard, but the
// distribution adaptors (std::uniform_real_distribution,
// std::normal_distribution) are not: different standard libraries produce
// different streams from the same engine. Everything downstream of a seed
// must be bit-reproducible across toolchains, so uniforms and gaussians are
// derived here from raw engine output only.

/// splitmix64 step; used both as a seed mixer and to decorrelate derived
/// streams. Public-domain constants (Vigna).
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a base seed and one or more
/// stream indices (e.g. noise level index, trial index). Chained splitmix
/// rounds keep nearby indices statistically unrelated.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a,
                                 std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(base ^ 0x5bf03635f0935babULL);
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ (b * 0x9e3779b97f4a7c15ULL));
  return s;
}

/// Seeded generator producing portable uniforms and gaussians.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 1) with 53 random bits, the standard 2^-53 ladder.
  double next_uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [lo, hi] by rejection-free scaling; fine for the
  /// small ranges used in tests and scene synthesis.
  int next_int(int lo, int hi) {
    const double u = next_uniform();
    return lo + static_cast<int>(u * static_cast<double>(hi - lo + 1));
  }

  /// Standard normal via the Marsaglia polar method. Consumes a variable
  /// number of engine draws but is deterministic given the stream.
  double next_gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * next_uniform() - 1.0;
      v = 2.0 * next_uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace motkit
