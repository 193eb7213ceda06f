#pragma once

#include <cstdint>
#include <limits>

namespace hypercolor {

/// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Counter-based generator: the stream for (seed, domain, index) is a pure
/// function of those three values, so draws do not depend on traversal order
/// or on how work is split between threads.
///
/// Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t seed, std::uint64_t domain, std::uint64_t index) noexcept
      : state_(mix64(mix64(seed ^ mix64(domain)) ^ index)) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ull;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>((*this)() >> 11) + 0.5) * 0x1.0p-53;
  }

 private:
  std::uint64_t state_;
};

/// Exact Poisson variate: sequential inversion below mean 10, Hormann's
/// transformed rejection (PTRS) above. Returns an integer-valued double.
double sample_poisson(double mean, CounterRng& rng);

/// Standard normal via Box-Muller (one variate per call, no caching).
double sample_standard_normal(CounterRng& rng);

}  // namespace hypercolor
