#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <vector>

namespace sparsereg {

/// Fixed constants xor-ed into a seed to derive independent sub-streams.
enum class StreamRole : std::uint64_t {
  design = 0x9e3779b97f4a7c15ULL,
  support = 0xbf58476d1ce4e5b9ULL,
  magnitudes = 0x94d049bb133111ebULL,
  signs = 0x2545f4914f6cdd1dULL,
  noise = 0xd6e8feb86659fd93ULL,
  probe = 0xa0761d6478bd642fULL,
  kappa = 0xe7037ed1a0b428dbULL,
};

std::uint64_t splitmix64(std::uint64_t x);

/// Seeded generator on top of mt19937_64. The distributions are written out
/// here rather than taken from <random> so that draws are identical across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}
  Rng(std::uint64_t seed, StreamRole role)
      : Rng(seed ^ static_cast<std::uint64_t>(role)) {}

  std::uint64_t next() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer on [0, bound).
  std::size_t below(std::size_t bound);
  /// +1 or -1 with equal probability.
  double sign() { return (engine_() >> 63) ? 1.0 : -1.0; }
  /// Standard normal via the Marsaglia polar method.
  double normal();
  /// Exponential(1) by inversion.
  double exponential();

  /// k distinct indices drawn uniformly from [0, n), returned sorted.
  std::vector<std::size_t> subset(std::size_t n, std::size_t k);
  /// Uniform random permutation of [0, n).
  std::vector<std::size_t> permutation(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sparsereg
