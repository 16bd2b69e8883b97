#pragma once

#include <cstddef>
#include <cstdint>
#include <string_view>
#include <vector>

namespace evokg {

/// SplitMix64 with per-stream gamma, bit-compatible with java.util.SplittableRandom.
///
/// Every random draw in benchmark construction goes through this generator so
/// that artifacts are reproducible from an integer seed in any language that
/// implements the same algorithm. `split()` derives an independent child stream.
class SplitMix64 {
 public:
  static constexpr std::string_view kAlgorithm = "splitmix64";

  explicit SplitMix64(std::uint64_t seed);

  std::uint64_t next_u64();

  /// Uniform in [0, 1) with 53 bits of precision.
  double next_double();

  /// Uniform in [0, bound) for 0 < bound < 2^63, as SplittableRandom.nextLong(bound).
  std::uint64_t next_below(std::uint64_t bound);

  SplitMix64 split();

 private:
  SplitMix64(std::uint64_t seed, std::uint64_t gamma) : seed_(seed), gamma_(gamma) {}
  std::uint64_t next_seed() { return seed_ += gamma_; }

  std::uint64_t seed_;
  std::uint64_t gamma_;
};

/// Draws `k` distinct indices from [0, n) by partial Fisher-Yates, in draw order.
std::vector<std::size_t> sample_indices(SplitMix64& rng, std::size_t n, std::size_t k);

}  // namespace evokg
