#pragma once

#include <cstdint>
#include <stdexcept>

namespace rws {

// splitmix64; used only to expand seeds into generator state.
inline std::uint64_t splitmix64(std::uint64_t& x) {
  x += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = x;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

//! Deterministic random stream (xoshiro256++), addressed by (seed, stream).
//!
//! Same (seed, stream) always yields the same sequence, on every platform;
//! distinct stream indices derived from one master seed give decorrelated
//! streams, one per chain/job. All distribution sampling is implemented
//! here (not via <random>) so that output bytes are reproducible.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) {
    std::uint64_t x = seed ^ (0xD1B54A32D192ED03ULL * (stream + 1));
    for (auto& w : state_) w = splitmix64(x);
  }

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

  // Uniform double in [0, 1), 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n), unbiased (Lemire's method).
  int uniform_int(int n) {
    if (n <= 0) throw std::invalid_argument("uniform_int: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    std::uint64_t x = next_u64();
    unsigned __int128 m = static_cast<unsigned __int128>(x) * un;
    std::uint64_t low = static_cast<std::uint64_t>(m);
    if (low < un) {
      const std::uint64_t threshold = (0 - un) % un;
      while (low < threshold) {
        x = next_u64();
        m = static_cast<unsigned __int128>(x) * un;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<int>(m >> 64);
  }

  // Index sampled from the categorical distribution given by weights[0..n-1]
  // (nonnegative, summing to ~1). Falls back to the last index if rounding
  // leaves the cumulative sum marginally below the drawn uniform.
  int categorical(const double* weights, int n) {
    const double u = uniform();
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      acc += weights[i];
      if (u < acc) return i;
    }
    return n - 1;
  }

 private:
  static std::uint64_t rotl(std::uint64_t v, int k) {
    return (v << k) | (v >> (64 - k));
  }
  std::uint64_t state_[4];
};

}  // namespace rws
