#pragma once

#include <cstdint>
#include <random>

#include "symplat/int_mat.hpp"

namespace symplat {

/// Seeded deterministic generator threaded explicitly through everything
/// that samples.  Identical seeds give identical streams on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform integer in [lo, hi], inclusive.
  long uniform(long lo, long hi) {
    return lo + static_cast<long>(next_u64() % static_cast<std::uint64_t>(hi - lo + 1));
  }

  std::size_t index(std::size_t size) { return static_cast<std::size_t>(next_u64() % size); }

  /// Fork a child stream; decorrelated from the parent but reproducible.
  Rng fork() { return Rng(next_u64() ^ 0x9e3779b97f4a7c15ULL); }

 private:
  std::mt19937_64 gen_;
};

/// Random element of SL_n(Z) built from elementary column operations,
/// entries kept desk-scale.  det is exactly +1.
inline ZMat random_unimodular(Rng& rng, std::size_t n, int steps = 8, long bound = 3) {
  ZMat u = ZMat::identity(n);
  for (int s = 0; s < steps; ++s) {
    std::size_t i = rng.index(n), j = rng.index(n);
    if (i == j) continue;
    long t = rng.uniform(-bound, bound);
    u.col_sub(i, j, Int(-t));  // col_i += t col_j
  }
  return u;
}

}  // namespace symplat
