#pragma once

// Counter-based random numbers for reproducible parallel Monte Carlo.
//
// The generator is Philox4x32-10 (Salmon, Moraes, Dror, Shaw, SC'11):
// ten rounds of the Philox S-box over a 128-bit counter with a 64-bit key.
// A stream is identified by (seed, stream index): the seed is the key, the
// stream index occupies counter words 2-3 and the block index counter words
// 0-1. Every sample of a simulation draws from its own stream, so results do
// not depend on how samples are scheduled across threads.
//
// Derived variates are produced by fixed formulas (no std:: distributions,
// whose algorithms are implementation-defined):
//   uniform()      = (u64 >> 11) * 2^-53              in [0, 1)
//   exponential()  = -log1p(-uniform())                rate 1

#include <array>
#include <cstdint>

namespace crsm {

/// The Philox4x32-10 bijection.
class Philox4x32 {
 public:
  using counter_type = std::array<std::uint32_t, 4>;
  using key_type = std::array<std::uint32_t, 2>;

  static counter_type block(counter_type ctr, key_type key);
};

/// Sequential view of one Philox stream. Copyable value type; two copies
/// with the same state produce the same numbers.
class PhiloxStream {
 public:
  using result_type = std::uint32_t;

  PhiloxStream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return 0xFFFFFFFFu; }

  result_type operator()() { return next_u32(); }
  std::uint32_t next_u32();
  std::uint64_t next_u64();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unit-rate exponential.
  double exponential();
  /// Uniform integer in [0, n), unbiased (rejection on 64-bit draws).
  std::uint64_t below(std::uint64_t n);
  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill();

  Philox4x32::key_type key_;
  Philox4x32::counter_type counter_;
  Philox4x32::counter_type buffer_{};
  int used_ = 4;
};

}  // namespace crsm
