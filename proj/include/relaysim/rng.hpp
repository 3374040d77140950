#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>

#include "relaysim/types.hpp"

namespace relaysim {

// SplitMix64 finalizer. Also the building block of the documented
// master-seed -> cell-seed expansion used by the sweep runner.
constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combiner deriving a child seed from (seed, tag).
constexpr std::uint64_t seed_mix(std::uint64_t seed, std::uint64_t tag) {
  return splitmix64(seed ^ (splitmix64(tag) + 0x9e3779b97f4a7c15ULL +
                            (seed << 6) + (seed >> 2)));
}

struct NoiseModel {
  Scalar n0 = 1.0;  // total noise power per complex sample; n0/2 per real dimension
};

// Deterministic sample stream: identical (seed, stream_id) replays the
// identical sequence. The Gaussian mapping is hand-rolled Box-Muller so the
// stream is reproducible independent of the standard library's
// distribution internals.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : engine_(seed_mix(seed, stream_id)), seed_(seed), stream_id_(stream_id) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in (0, 1]; never 0 so log() stays finite.
  Scalar uniform_unit() {
    return static_cast<Scalar>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  int bit() { return static_cast<int>(next_u64() >> 63); }

  // Circularly symmetric complex Gaussian CN(0, variance), Box-Muller polar form.
  Complex complex_gaussian(Scalar variance) {
    const Scalar radius = std::sqrt(-variance * std::log(uniform_unit()));
    const Scalar angle = 2.0 * std::numbers::pi_v<Scalar> * uniform_unit();
    return Complex(radius * std::cos(angle), radius * std::sin(angle));
  }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

 private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  std::uint64_t stream_id_;
};

}  // namespace relaysim
