#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace phjb {

/// Seeded generator used by every randomized suite.
///
/// The bit source is std::mt19937_64, whose output sequence is fixed by the
/// standard. The mappings to doubles are defined here rather than through
/// <random> distributions (whose algorithms are implementation-defined):
///   uniform()  = (next() >> 11) * 2^-53
///   normal()   = Box-Muller on two uniforms, cosine branch only
///   index(n)   = floor(uniform() * n)
/// so reports reproduce across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal();
  std::size_t index(std::size_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace phjb
