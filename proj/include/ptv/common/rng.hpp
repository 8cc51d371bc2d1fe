#pragma once

#include <cstdint>

namespace ptv {

// Counter-derived splitmix64 stream. Cheap to construct, so every sample /
// epoch / record gets its own stream derived from (seed, stream index) and
// parallel generation reproduces serial generation bit for bit.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(mix(seed ^ 0xD1B54A32D192ED03ull)) {}

  static Rng derive(std::uint64_t seed, std::uint64_t stream) {
    Rng r(seed);
    r.state_ = mix(r.state_ + stream * 0x9E3779B97F4A7C15ull);
    return r;
  }

  std::uint64_t next_u64() {
    state_ += 0x9E3779B97F4A7C15ull;
    return mix(state_);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint, so the
  // result is safe to push through inverse CDFs.
  double uniform01() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double normal();  // inverse-CDF transform of uniform01()

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ull;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBull;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t state_;
};

}  // namespace ptv
