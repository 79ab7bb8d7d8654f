#pragma once

#include <cstdint>
#include <random>

namespace exactpen {

/// Seedable, splittable generator: a 64-bit Mersenne Twister keyed by
/// (seed, stream). Normals use the Box-Muller transform, so draws are
/// reproducible within one build.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  /// Independent generator keyed by the same seed and a new stream id.
  Rng split(std::uint64_t stream) const { return Rng(seed_, stream); }

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace exactpen
