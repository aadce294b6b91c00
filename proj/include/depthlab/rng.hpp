#pragma once

#include <cstdint>
#include <random>

#include "depthlab/core.hpp"

namespace depthlab {

/// Identifies one reproducible random sequence. Identical (seed, stream)
/// pairs give identical draws on every platform and thread count.
struct RngStream {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  /// Derived stream for sub-task `index`; children of distinct indices (and
  /// of distinct parents) do not collide in practice.
  RngStream child(std::uint64_t index) const;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// Generator bound to a stream. Distributions are implemented here rather
/// than with <random>'s distribution classes, whose output is not specified
/// across standard library implementations.
class Rng {
 public:
  explicit Rng(RngStream stream);

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on the open interval (0, 1).
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  /// Exp(1).
  double exponential();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// +1 or -1 with equal probability.
  double sign();

  Vector normal_vector(int n);
  Vector unit_vector(int n);

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace depthlab
