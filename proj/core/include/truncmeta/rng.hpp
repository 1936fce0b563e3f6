#pragma once

#include <array>
#include <cstdint>

namespace truncmeta {

/// xoshiro256++ seeded through splitmix64. The draw sequence is a pure
/// function of the seed, identical across runs and platforms. split()
/// derives an independent stream without advancing the parent, so
/// per-feature / per-replicate work is order-independent.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform draw strictly inside (0,1).
  double uniform();
  /// Uniform draw in (lo,hi).
  double uniform(double lo, double hi);
  /// Standard normal via the inverse CDF.
  double normal();
  /// Gamma(shape, 1), shape >= 1 (Marsaglia-Tsang).
  double gamma(double shape);
  /// Chi-square draw with integer df >= 2.
  double chi_square(int df);

  /// Child stream keyed by `stream`; pure function of (parent seed, stream).
  Rng split(std::uint64_t stream) const;

 private:
  Rng() = default;
  std::array<std::uint64_t, 4> state_{};
  std::uint64_t key_ = 0;
};

}  // namespace truncmeta
