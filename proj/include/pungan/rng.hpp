#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace pungan {

// Seeded random source. All randomness in the project flows through this
// class so that identical seeds give identical runs; the uniform mapping is
// written out explicitly instead of relying on std distributions, whose
// output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // [0, 1)
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // [0, n); n must be > 0.
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(next_u64() % n);
  }

  // Independent stream keyed by (seed, stream id); used for per-epoch,
  // per-round, and per-sample streams so resume points re-derive identically.
  Rng derive(std::uint64_t stream) const;

  // Sample an index from an (unnormalized) nonnegative weight vector.
  std::size_t sample_weighted(const std::vector<double>& weights);

  // Fisher-Yates over indices 0..n-1.
  std::vector<std::size_t> permutation(std::size_t n);

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

struct Matrix;

// Fresh matrix with entries uniform in [-range, range].
Matrix uniform_init(std::size_t rows, std::size_t cols, Rng& rng, double range);

}  // namespace pungan
