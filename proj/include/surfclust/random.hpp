#pragma once

#include <cstdint>
#include <random>

namespace surfclust {

/// Seeded generator whose output is identical on every platform.
///
/// std::mt19937_64's sequence is fixed by the standard, but the standard
/// distributions are not, so the transforms to uniform and normal variates
/// live here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Standard normal by the Box-Muller transform; caches the second variate.
  double normal();

  /// Uniform integer in [0, bound) by rejection.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Sub-seed for stream `stream`, item `index` of a master seed. Pure arithmetic,
/// so serial and parallel runs draw identical streams.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

}  // namespace surfclust
