#pragma once

#include <cstdint>

namespace dynsc {

// Deterministic, platform-independent RNG (xoshiro256** seeded via splitmix64).
// All sampling helpers are hand-rolled so that byte-identical reproducibility
// does not depend on libstdc++ distribution internals.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next();

  // [0, 1)
  double u01();
  double uniform(double lo, double hi);
  // Box-Muller, one value per call (no cached spare, keeps state minimal).
  double gaussian(double mean, double sigma);
  // Unbiased integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  // Beta(2,2) via the median of three uniforms.
  double beta22();

  // Derive an independent stream seed from a base seed and an index.
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t index);

 private:
  std::uint64_t s_[4];
};

}  // namespace dynsc
