#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>

namespace armlab {

// Counter-free keyed PRNG stream (splitmix64 core). Streams are cheap value
// types; deriving a child stream from (parent key, indices...) gives
// statistically independent sequences, which keeps per-rollout randomness
// reproducible regardless of evaluation order.
class RngStream {
 public:
  explicit RngStream(uint64_t seed) : state_(mix(seed ^ kPhi)) {}

  // Child stream keyed by one or more indices.
  RngStream derive(std::initializer_list<uint64_t> keys) const {
    uint64_t h = state_;
    for (uint64_t k : keys) h = mix(h ^ mix(k + kPhi));
    return RngStream(FromState{}, h);
  }

  uint64_t next_u64() {
    state_ += kPhi;
    return mix_out(state_);
  }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform_real(double lo, double hi) { return lo + uniform01() * (hi - lo); }

  bool bernoulli(double p) { return uniform01() < p; }

  // Uniform integer in [0, n). Lemire multiply-shift; deterministic across
  // platforms (unlike std::uniform_int_distribution).
  uint64_t uniform_int(uint64_t n) {
    if (n == 0) throw std::invalid_argument("uniform_int: n must be positive");
    unsigned __int128 m = static_cast<unsigned __int128>(next_u64()) * n;
    uint64_t lo = static_cast<uint64_t>(m);
    if (lo < n) {
      uint64_t threshold = (0 - n) % n;
      while (lo < threshold) {
        m = static_cast<unsigned __int128>(next_u64()) * n;
        lo = static_cast<uint64_t>(m);
      }
    }
    return static_cast<uint64_t>(m >> 64);
  }

  // Index drawn from an (unnormalized-tolerant) probability vector by
  // inverse CDF; the final bucket absorbs rounding slack.
  int categorical(std::span<const double> probs) {
    double u = uniform01();
    double acc = 0.0;
    for (size_t i = 0; i + 1 < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  }

 private:
  struct FromState {};
  RngStream(FromState, uint64_t s) : state_(s) {}

  static constexpr uint64_t kPhi = 0x9E3779B97F4A7C15ull;

  static uint64_t mix(uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }
  static uint64_t mix_out(uint64_t z) { return mix(z); }

  uint64_t state_;
};

}  // namespace armlab
