#pragma once

#include <cstdint>
#include <limits>

namespace bandit_subspace {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Order-sensitive combination of several words into one seed.
constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(mix64(a) ^ (b + 0x632be59bd9b4e019ULL + (a << 6) + (a >> 2)));
}

constexpr std::uint64_t mix64(std::uint64_t a, std::uint64_t b, std::uint64_t c) noexcept {
  return mix64(mix64(a, b), c);
}

/// Counter-based generator: the n-th output is mix64(key, n), so a stream is
/// fully described by (key, counter) and child streams are split off by
/// hashing a stream id into a fresh key.
///
/// Satisfies UniformRandomBitGenerator, but the library only draws through
/// `uniform01` and `uniform_index`, whose outputs are platform-independent.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr CounterRng(std::uint64_t seed) noexcept : key_(mix64(seed)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  constexpr result_type operator()() noexcept { return mix64(key_, counter_++); }

  /// Independent stream derived from this stream's key; does not advance this stream.
  constexpr CounterRng split(std::uint64_t stream_id) const noexcept {
    CounterRng child(0);
    child.key_ = mix64(key_ ^ 0xd1b54a32d192ed03ULL, stream_id);
    return child;
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  constexpr double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

  /// Uniform on {0, ..., n-1}; rejection sampling keeps it exactly unbiased.
  constexpr std::uint64_t uniform_index(std::uint64_t n) noexcept {
    if (n <= 1) return 0;
    const std::uint64_t limit = max() - max() % n;
    std::uint64_t v = (*this)();
    while (v >= limit) v = (*this)();
    return v % n;
  }

  constexpr std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace bandit_subspace
