#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>

namespace signnet {

/// Counter-based generator: draw k of a stream keyed by `seed` is
/// splitmix64(seed + k * golden), so streams are identical on every platform
/// and `split` derives independent child streams without shared state.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) noexcept : key_(seed) {}

  std::uint64_t seed() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  std::uint64_t next_u64() noexcept {
    ++counter_;
    return mix(key_ + counter_ * kGolden);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform01(); }

  /// Uniform integer on [0, n); n must be positive.
  std::size_t index(std::size_t n) noexcept {
    const auto wide = static_cast<unsigned __int128>(next_u64()) * n;
    return static_cast<std::size_t>(wide >> 64);
  }

  /// Independent child stream; the parent is not advanced.
  Rng split(std::uint64_t stream) const noexcept {
    return Rng(mix(key_ ^ mix(stream + 0x632BE59BD9B4E019ULL)));
  }

  template <typename T>
  void shuffle(std::span<T> xs) noexcept {
    for (std::size_t i = xs.size(); i > 1; --i) std::swap(xs[i - 1], xs[index(i)]);
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace signnet
