#pragma once

#include <cstdint>
#include <vector>

#include "kclg/lattice.hpp"

namespace kclg {

inline constexpr std::size_t kDefaultStateBudget = 5'000'000;

/// Σ_{N,k}: all configurations with k particles, ranked in lexicographic
/// order of their bit strings. A state is a 64-bit key in which site i is bit
/// V-1-i, so numeric order of keys is lexicographic order of bit strings.
class Hyperplane {
 public:
  Hyperplane(const Geometry& g, int k, std::size_t budget = kDefaultStateBudget);

  const Geometry& geometry() const { return geometry_; }
  int particles() const { return k_; }
  std::size_t size() const { return size_; }

  std::uint64_t unrank(std::size_t rank) const;
  std::size_t rank(std::uint64_t key) const;
  Configuration configuration(std::size_t rank) const { return from_key(unrank(rank)); }

  std::uint64_t key_of(const Configuration& eta) const;
  Configuration from_key(std::uint64_t key) const;
  /// Site-indexed occupancy of a key, with one trailing empty sentinel.
  void fill(std::uint64_t key, std::uint8_t* occ) const;
  std::uint64_t swap_key(std::uint64_t key, std::size_t i, std::size_t j) const;

  /// Calls f(rank, key) for every state in increasing rank.
  template <class F>
  void for_each(F&& f) const {
    if (k_ == 0) {
      f(std::size_t{0}, std::uint64_t{0});
      return;
    }
    std::uint64_t key = (k_ == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << k_) - 1);
    for (std::size_t r = 0; r < size_; ++r) {
      f(r, key);
      if (r + 1 == size_) break;
      // Next key with the same popcount (Gosper).
      const std::uint64_t c = key & (~key + 1);
      const std::uint64_t s = key + c;
      key = (((s ^ key) >> 2) / c) | s;
    }
  }

 private:
  Geometry geometry_;
  int k_;
  std::size_t size_;
  int volume_;
};

/// Binomial coefficient; throws if the result does not fit in 64 bits.
std::uint64_t binomial(int n, int k);

/// Every configuration with k particles in lexicographic bit order.
std::vector<Configuration> enumerate_hyperplane(const Geometry& g, int k,
                                                std::size_t budget = kDefaultStateBudget);

}  // namespace kclg
