#pragma once

#include <cmath>
#include <cstdint>

namespace jacobi {

// Golden-ratio increment shared by the counter stream and seed derivation.
inline constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

/// 64-bit finalizer: z ^= z>>30; z *= 0xBF58476D1CE4E5B9; z ^= z>>27;
/// z *= 0x94D049BB133111EB; z ^= z>>31.
inline constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

/// Replica seed contract: mix(base ^ replica * golden). Bit-exact across
/// platforms and thread counts.
inline constexpr std::uint64_t derive_replica_seed(std::uint64_t base_seed,
                                                   std::uint64_t replica) noexcept {
  return mix64(base_seed ^ (replica * kGoldenGamma));
}

/// Counter-mixing generator: the state advances by the golden-ratio gamma,
/// outputs are the mixed counter. One instance per replica; never shared.
class RngState {
 public:
  explicit RngState(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept {
    state_ += kGoldenGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1); safe as a log/pow argument.
  double next_open() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal via Box-Muller (two uniforms per variate).
  double next_normal() noexcept {
    const double r = std::sqrt(-2.0 * std::log(next_open()));
    const double phi = 6.283185307179586476925286766559 * next_double();
    return r * std::cos(phi);
  }

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

}  // namespace jacobi
