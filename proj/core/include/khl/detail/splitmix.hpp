#pragma once

#include <cmath>
#include <cstdint>

namespace khl::detail {

/// splitmix64 stream; hand-rolled so sampling is bit-identical across
/// standard libraries and runs.
struct SplitMix {
  std::uint64_t state;

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double exponential() {
    double u;
    do {
      u = uniform();
    } while (u <= 0.0);
    return -std::log(u);
  }
};

inline SplitMix stream_rng(std::uint64_t seed, std::uint64_t salt, long index) {
  std::uint64_t h = seed;
  h ^= (static_cast<std::uint64_t>(index) + 0x632BE59BD9B4E019ULL) * 0x9E3779B97F4A7C15ULL;
  h ^= salt * 0xFF51AFD7ED558CCDULL;
  return SplitMix{h};
}

}  // namespace khl::detail
