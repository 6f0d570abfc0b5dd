#pragma once

// Seeded pseudo-randomness shared by every property battery.
//
// The state is seeded with one splitmix64 step of the user seed, then
// advanced by xorshift64*:
//
//   s ^= s >> 12;  s ^= s << 25;  s ^= s >> 27;  out = s * 0x2545F4914F6CDD1D
//
// uniform() maps out to [0, 1) as (out >> 11) * 2^-53.

#include <cstdint>
#include <span>
#include <vector>

#include "kinlim/fields.hpp"
#include "kinlim/grid.hpp"

namespace kinlim {

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

class Xorshift64Star {
 public:
  explicit Xorshift64Star(std::uint64_t seed) noexcept : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ull;
  }

  std::uint64_t next() noexcept {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1Dull;
  }

  double uniform() noexcept { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
  /// Integer in [lo, hi].
  int integer(int lo, int hi) noexcept { return lo + int(next() % std::uint64_t(hi - lo + 1)); }

 private:
  std::uint64_t state_;
};

/// Mixture of 1-3 Gaussian bumps in v sampled on `vg` (hence clipped at the
/// grid boundary) and rescaled so its midpoint mass equals `mass`.
void random_velocity_profile(Xorshift64Star& rng, const VelocityGrid& vg, double mass,
                             std::span<double> out);

/// Mixture of 1-3 Gaussian bumps in x on the periodic grid, rescaled to
/// total mass `mass`.
DensityField random_density(Xorshift64Star& rng, const SpatialGrid& grid, double mass);

}  // namespace kinlim
