#pragma once

#include <cstdint>
#include <vector>

namespace opd {

/// Seeded, splittable generator with platform-independent output.
///
/// Uses xoshiro256** seeded through SplitMix64. Floating-point draws are built
/// from the raw bits directly rather than through <random> distributions, whose
/// outputs differ between standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Exp(1) variate.
  double exponential();
  /// Symmetric Dirichlet(1) draw of the given length.
  std::vector<double> dirichlet_flat(std::size_t n);
  /// Independent child stream; `stream` selects which one.
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t state_[4];
  std::uint64_t seed_;
};

std::uint64_t splitmix64(std::uint64_t& x);

}  // namespace opd
