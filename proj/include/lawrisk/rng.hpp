#pragma once

#include <cstdint>
#include <random>

namespace lawrisk {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Random stream keyed by (seed, stream index).
///
/// Distinct indices give statistically independent streams, so replication r
/// of an experiment draws the same numbers no matter which thread runs it or
/// in which order. The engine (mt19937_64) and the uniform mapping below are
/// fully specified, so output is identical across standard libraries.
class stream_rng {
 public:
  stream_rng(std::uint64_t seed, std::uint64_t stream)
      : engine_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  /// Uniform on the open interval (0,1): midpoints of a 2^-53 grid.
  double uniform() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Uniform on [lo, hi].
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lawrisk
