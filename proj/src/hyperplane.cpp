#include "kclg/hyperplane.hpp"

#include <bit>
#include <limits>

namespace kclg {

namespace {

// C(n, j) for n < 64 from a table built once.
struct PascalTable {
  std::uint64_t c[65][65] = {};
  PascalTable() {
    for (int n = 0; n <= 64; ++n) {
      c[n][0] = 1;
      for (int j = 1; j <= n; ++j) {
        const std::uint64_t a = c[n - 1][j - 1];
        const std::uint64_t b = c[n - 1][j];
        c[n][j] = (a > std::numeric_limits<std::uint64_t>::max() - b) ? std::numeric_limits<std::uint64_t>::max()
                                                                        : a + b;
      }
    }
  }
};

const PascalTable& pascal() {
  static const PascalTable t;
  return t;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || n < 0 || k > n) return 0;
  if (n > 64) throw PreconditionError("binomial argument too large");
  const std::uint64_t v = pascal().c[n][k];
  if (v == std::numeric_limits<std::uint64_t>::max()) throw PreconditionError("binomial overflows 64 bits");
  return v;
}

Hyperplane::Hyperplane(const Geometry& g, int k, std::size_t budget) : geometry_(g), k_(k) {
  if (g.volume() > 64) throw PreconditionError("hyperplane enumeration supports at most 64 sites");
  volume_ = static_cast<int>(g.volume());
  if (k < 0 || k > volume_) throw PreconditionError("particle number out of range");
  const std::uint64_t n = binomial(volume_, k);
  if (n > budget) {
    throw PreconditionError("hyperplane has " + std::to_string(n) + " states, above the budget of " +
                            std::to_string(budget));
  }
  size_ = static_cast<std::size_t>(n);
}

std::uint64_t Hyperplane::unrank(std::size_t rank) const {
  if (rank >= size_) throw PreconditionError("rank out of range");
  // Colex unranking: the j-th highest set bit is the largest p with C(p, j) <= rank.
  std::uint64_t key = 0;
  std::uint64_t r = rank;
  int p = volume_ - 1;
  for (int j = k_; j >= 1; --j) {
    while (pascal().c[p][j] > r) --p;
    key |= std::uint64_t{1} << p;
    r -= pascal().c[p][j];
    --p;
  }
  return key;
}

std::size_t Hyperplane::rank(std::uint64_t key) const {
  std::uint64_t r = 0;
  int j = 0;
  while (key != 0) {
    const int p = std::countr_zero(key);
    ++j;
    r += pascal().c[p][j];
    key &= key - 1;
  }
  return static_cast<std::size_t>(r);
}

std::uint64_t Hyperplane::key_of(const Configuration& eta) const {
  if (!(eta.geometry() == geometry_)) throw PreconditionError("configuration has a different geometry");
  if (static_cast<int>(eta.count()) != k_) throw PreconditionError("configuration has the wrong particle number");
  std::uint64_t key = 0;
  for (int i = 0; i < volume_; ++i) {
    if (eta.at(static_cast<std::size_t>(i))) key |= std::uint64_t{1} << (volume_ - 1 - i);
  }
  return key;
}

Configuration Hyperplane::from_key(std::uint64_t key) const {
  Configuration eta(geometry_);
  for (int i = 0; i < volume_; ++i) {
    if ((key >> (volume_ - 1 - i)) & 1u) eta.set(static_cast<std::size_t>(i), true);
  }
  return eta;
}

void Hyperplane::fill(std::uint64_t key, std::uint8_t* occ) const {
  for (int i = 0; i < volume_; ++i) occ[i] = static_cast<std::uint8_t>((key >> (volume_ - 1 - i)) & 1u);
  occ[volume_] = 0;
}

std::uint64_t Hyperplane::swap_key(std::uint64_t key, std::size_t i, std::size_t j) const {
  const int bi = volume_ - 1 - static_cast<int>(i);
  const int bj = volume_ - 1 - static_cast<int>(j);
  if (((key >> bi) & 1u) == ((key >> bj) & 1u)) return key;
  return key ^ ((std::uint64_t{1} << bi) | (std::uint64_t{1} << bj));
}

std::vector<Configuration> enumerate_hyperplane(const Geometry& g, int k, std::size_t budget) {
  const Hyperplane h(g, k, budget);
  std::vector<Configuration> out;
  out.reserve(h.size());
  h.for_each([&](std::size_t, std::uint64_t key) { out.push_back(h.from_key(key)); });
  return out;
}

}  // namespace kclg
