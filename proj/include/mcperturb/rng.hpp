#pragma once

#include <cstdint>
#include <span>

#include "mcperturb/errors.hpp"

namespace mcperturb {

// Deterministic generator with explicit stream splitting. State is seeded via
// splitmix64 over (seed, stream, substream) so distinct replicates, and the
// proposal/noise draws inside one replicate, never share state. Output is
// engine- and platform-independent: only integer ops and one fixed
// int-to-double conversion.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0, std::uint64_t substream = 0) {
    std::uint64_t x = seed;
    x = mix(x += golden());
    x ^= stream;
    x = mix(x += golden());
    x ^= substream;
    for (auto& word : state_) word = mix(x += golden());
  }

  // xoshiro256++ step.
  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform on [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Samples an index from a probability vector by inverse CDF. The vector is
  // assumed normalized; rounding slack falls on the last positive entry.
  int next_index(std::span<const double> probs) {
    if (probs.empty()) throw DimensionMismatchError("categorical draw from empty vector");
    const double u = next_double();
    double acc = 0.0;
    int last_positive = -1;
    for (int i = 0; i < static_cast<int>(probs.size()); ++i) {
      if (probs[i] > 0.0) last_positive = i;
      acc += probs[i];
      if (u < acc) return i;
    }
    if (last_positive < 0) throw ZeroMassStateError("categorical draw from zero vector");
    return last_positive;
  }

 private:
  static constexpr std::uint64_t golden() { return 0x9e3779b97f4a7c15ULL; }

  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  // splitmix64 finalizer.
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t state_[4];
};

}  // namespace mcperturb
