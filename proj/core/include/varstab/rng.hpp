#pragma once

#include "varstab/types.hpp"

#include <cstdint>

namespace varstab {

// Deterministic, platform-independent generator (xoshiro256** seeded by
// splitmix64). std::random distributions are implementation-defined, which
// would break the byte-for-byte report reproducibility contract, so the
// few distributions we need are written out here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  // Substream for sample index i. Prefix property: sample i is the same for
  // every total count and every worker partition.
  static Rng substream(std::uint64_t seed, std::uint64_t index);

  std::uint64_t next_u64();
  double uniform();                       // [0, 1)
  double uniform(double lo, double hi);
  double normal();                        // standard normal, Box-Muller
  int uniform_int(int lo, int hi);        // inclusive bounds

  Vector normal_vector(int n);
  Vector ball(int n, double radius);      // uniform in the Euclidean ball
  Vector on_simplex(int n);               // uniform on the standard simplex

 private:
  std::uint64_t s_[4];
  bool have_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace varstab
