#pragma once

#include <cstdint>

#include "qntk/circuit.hpp"

namespace qntk {

// splitmix64 step; the per-sample streams below are splitmix sequences
// whose initial states are derived from (seed, sample index), so sample j
// is a pure function of (seed, j) on every platform and thread layout.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// N i.i.d. parameter vectors over {0, pi/2, pi, 3pi/2}^L, generated lazily
/// from per-sample randomness streams.
struct SampleSet {
  std::uint64_t seed = 0;
  std::int64_t count = 0;
  std::size_t num_parameters = 0;

  /// Fills `out` with sample j (resizes if needed).
  void angles(std::int64_t j, ParameterVector& out) const {
    out.resize(num_parameters);
    std::uint64_t state = mix64(mix64(seed) + std::uint64_t(j) * 0x9e3779b97f4a7c15ULL);
    for (std::size_t i = 0; i < num_parameters; ++i) {
      out[i] = DiscreteAngle(int(splitmix64(state) >> 62));
    }
  }
};

SampleSet sample_parameters(std::size_t L, std::int64_t N, std::uint64_t seed);

}  // namespace qntk
