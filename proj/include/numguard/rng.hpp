#pragma once

#include <cstdint>

namespace numguard {

/// SplitMix64 (Steele, Lea, Flood 2014). Every randomized search derives an
/// independent stream per iteration index via SplitMix64::stream, so results do
/// not depend on how iterations are partitioned across workers.
class SplitMix64 {
public:
  static constexpr const char* kName = "splitmix64";

  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  /// Stream for one iteration: seeded with mix(seed ^ mix(index)).
  static constexpr SplitMix64 stream(std::uint64_t seed, std::uint64_t index) noexcept {
    return SplitMix64(mix(seed ^ mix(index + 0x9e3779b97f4a7c15ULL)));
  }

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  constexpr std::uint64_t next() noexcept {
    state_ += 0x9e3779b97f4a7c15ULL;
    return mix(state_);
  }

  /// Uniform in [0, bound) by multiply-shift with rejection (Lemire 2019).
  constexpr std::uint64_t below(std::uint64_t bound) noexcept {
    if (bound == 0) return 0;
    __extension__ using U128 = unsigned __int128;
    U128 m = U128{next()} * bound;
    auto low = static_cast<std::uint64_t>(m);
    if (low < bound) {
      const std::uint64_t threshold = (0 - bound) % bound;
      while (low < threshold) {
        m = U128{next()} * bound;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

  /// Uniform in [lo, hi], requires lo <= hi.
  constexpr std::int64_t uniform(std::int64_t lo, std::int64_t hi) noexcept {
    const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == ~std::uint64_t{0}) return static_cast<std::int64_t>(next());
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + below(span + 1));
  }

  constexpr bool coin() noexcept { return (next() >> 63) != 0; }

private:
  std::uint64_t state_;
};

}  // namespace numguard
