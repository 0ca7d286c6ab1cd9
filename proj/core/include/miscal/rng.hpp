// Counter-based deterministic random number generation (Philox4x32-10).
//
// Every consumer derives its own substream from (master seed, stream id,
// purpose tag), so evaluation order and parallel scheduling cannot change
// the values anything draws.
#pragma once

#include <array>
#include <cstdint>

namespace miscal {

/// Raw Philox4x32-10 block function: 4x32-bit counter, 2x32-bit key.
std::array<uint32_t, 4> philox4x32(const std::array<uint32_t, 4>& counter,
                                   const std::array<uint32_t, 2>& key);

/// Stateless seed derivation: an independent 64-bit seed for (seed, a, b).
uint64_t derive_seed(uint64_t seed, uint64_t a, uint64_t b = 0);

/// Value-type generator over a Philox stream. Copyable; a copy continues
/// the same stream, substream() forks an independent one.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0);

  /// Independent generator for (this seed, child id); used for per-snippet
  /// and per-frame streams.
  Rng substream(uint64_t child) const;

  uint32_t next_u32();
  uint64_t next_u64();

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();
  /// Uniform double in [lo, hi).
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  uint64_t uniform_index(uint64_t n);

  /// Standard normal deviate (Box-Muller; second value cached).
  double gaussian();
  double gaussian(double mean, double stddev) { return mean + stddev * gaussian(); }

  uint64_t seed() const { return seed_; }
  uint64_t stream() const { return stream_; }

 private:
  uint64_t seed_ = 0;
  uint64_t stream_ = 0;
  std::array<uint32_t, 2> key_{};
  uint64_t counter_ = 0;      // block index
  std::array<uint32_t, 4> block_{};
  int block_pos_ = 4;         // consumed words in block_
  double cached_gauss_ = 0.0;
  bool has_cached_gauss_ = false;
};

}  // namespace miscal
