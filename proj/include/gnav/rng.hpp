#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace gnav {

/// SplitMix64 finalizer; used to derive independent stream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Combines a base seed with a list of integer keys into a new seed.
/// derive_seed(s, {a, b}) is stable across platforms and builds.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> keys);

/// Seeded random stream. Conversions to floating point and ranges are done here rather
/// than through <random> distributions so sequences are identical on every standard library.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(mix64(seed)) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, bound). bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  RngStream fork(std::uint64_t key) { return RngStream(derive_seed(next_u64(), {key})); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace gnav
