#include "evokg/rng.hpp"

#include <bit>
#include <cstdint>
#include <numeric>
#include <stdexcept>

namespace evokg {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9e3779b97f4a7c15ULL;

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_gamma(std::uint64_t z) {
  z = (z ^ (z >> 33)) * 0xff51afd7ed558ccdULL;
  z = (z ^ (z >> 33)) * 0xc4ceb9fe1a85ec53ULL;
  z = (z ^ (z >> 33)) | 1ULL;
  const int n = std::popcount(z ^ (z >> 1));
  return n < 24 ? z ^ 0xaaaaaaaaaaaaaaaaULL : z;
}

}  // namespace

SplitMix64::SplitMix64(std::uint64_t seed) : seed_(seed), gamma_(kGoldenGamma) {}

std::uint64_t SplitMix64::next_u64() { return mix64(next_seed()); }

double SplitMix64::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::uint64_t SplitMix64::next_below(std::uint64_t bound) {
  if (bound == 0 || bound > static_cast<std::uint64_t>(INT64_MAX)) {
    throw std::invalid_argument("next_below: bound must be in [1, 2^63)");
  }
  // Same rejection loop as SplittableRandom.nextLong(bound), signed overflow
  // test included, so bounded draws agree with the Java generator too.
  std::uint64_t r = next_u64();
  const std::uint64_t m = bound - 1;
  if ((bound & m) == 0) return r & m;
  for (std::uint64_t u = r >> 1;; u = next_u64() >> 1) {
    r = u % bound;
    if (((u + m - r) >> 63) == 0) return r;
  }
}

SplitMix64 SplitMix64::split() {
  const std::uint64_t child_seed = next_u64();
  return SplitMix64(child_seed, mix_gamma(next_seed()));
}

std::vector<std::size_t> sample_indices(SplitMix64& rng, std::size_t n, std::size_t k) {
  if (k > n) throw std::invalid_argument("sample_indices: k exceeds n");
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.next_below(n - i));
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace evokg
