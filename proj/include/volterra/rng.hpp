#pragma once

#include <cmath>
#include <cstdint>

namespace volterra {

// Counter-based pseudo-random stream: every (seed, stream_index) pair yields an
// independent, reproducible sequence, so Monte-Carlo sample k can be generated in
// isolation (and in any order) without sharing generator state across threads.
// Core is the splitmix64 output function, which walks a 64-bit counter by the
// golden-ratio increment and hashes it.
class GaussianStream {
 public:
  GaussianStream(std::uint64_t seed, std::uint64_t stream_index)
      : state_(mix(mix(seed + 0x9E3779B97F4A7C15ull) ^
                   mix(stream_index + 0xD1B54A32D192ED03ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform on (0,1]: never returns 0, so log() below is safe.
  double next_uniform() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; second value of each pair is cached.
  double next_normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u1 = next_uniform();
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925287 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace volterra
