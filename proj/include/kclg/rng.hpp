#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace kclg {

/// Philox4x32-10 counter-based generator. A stream is fixed by a 64-bit key
/// and a 64-bit stream id; the remaining 64 counter bits enumerate blocks.
class Philox {
 public:
  using result_type = std::uint64_t;
  using Block = std::array<std::uint32_t, 4>;

  Philox(std::uint64_t key, std::uint64_t stream) : key_(key), stream_(stream) {}

  /// Keyed stream for one replica and one purpose, so independent uses of the
  /// same seed never share random numbers.
  static Philox for_replica(std::uint64_t seed, std::uint32_t replica, std::uint32_t purpose) {
    return Philox(seed, (std::uint64_t{purpose} << 32) | replica);
  }

  static Block block(Block counter, std::array<std::uint32_t, 2> key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    if (have_ == 0) refill();
    --have_;
    return buffer_[have_];
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  /// Uniform on (0, 1].
  double uniform_open_zero() { return 1.0 - uniform(); }
  double exponential();
  bool bernoulli(double p) { return uniform() < p; }

 private:
  void refill();

  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  int have_ = 0;
};

namespace purpose {
inline constexpr std::uint32_t initial = 1;
inline constexpr std::uint32_t dynamics = 2;
inline constexpr std::uint32_t test_vectors = 3;
}  // namespace purpose

}  // namespace kclg
