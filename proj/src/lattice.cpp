#include "kclg/lattice.hpp"

#include <algorithm>
#include <bit>
#include <sstream>

namespace kclg {

Site::Site(std::initializer_list<int> coords) {
  if (coords.size() == 0 || coords.size() > static_cast<std::size_t>(kMaxDim)) {
    throw PreconditionError("site dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  std::copy(coords.begin(), coords.end(), coords_.begin());
  dim_ = static_cast<int>(coords.size());
}

Site Site::of_dim(int dim) {
  if (dim < 1 || dim > kMaxDim) throw PreconditionError("site dimension out of range");
  Site s;
  s.dim_ = dim;
  return s;
}

std::string to_string(const Site& s) {
  std::string out = "(";
  for (int a = 0; a < s.dim(); ++a) {
    if (a) out += ",";
    out += std::to_string(s[a]);
  }
  return out + ")";
}

// ---------------------------------------------------------------------------

Geometry::Geometry(GeometryKind kind, int dim, int side) : kind_(kind), dim_(dim), side_(side) {
  if (dim < 1 || dim > kMaxDim) {
    throw PreconditionError("dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  }
  if (side < 1) throw PreconditionError("side must be positive");
  if (kind == GeometryKind::box && dim != 1) {
    throw PreconditionError("box geometry is one-dimensional");
  }
  volume_ = 1;
  for (int a = dim - 1; a >= 0; --a) {
    stride_[static_cast<std::size_t>(a)] = volume_;
    volume_ *= static_cast<std::size_t>(side);
  }
}

Geometry Geometry::torus(int dim, int side) { return Geometry(GeometryKind::torus, dim, side); }
Geometry Geometry::box(int side) { return Geometry(GeometryKind::box, 1, side); }

std::string_view Geometry::kind_name() const { return is_torus() ? "torus" : "box"; }

bool Geometry::contains(const Site& s) const {
  if (s.dim() != dim_) return false;
  const int lo = is_torus() ? 0 : 1;
  const int hi = is_torus() ? side_ - 1 : side_;
  for (int a = 0; a < dim_; ++a) {
    if (s[a] < lo || s[a] > hi) return false;
  }
  return true;
}

std::size_t Geometry::index(const Site& s) const {
  if (!contains(s)) throw PreconditionError("site " + to_string(s) + " outside geometry");
  const int offset = is_torus() ? 0 : 1;
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) {
    idx += static_cast<std::size_t>(s[a] - offset) * stride_[static_cast<std::size_t>(a)];
  }
  return idx;
}

Site Geometry::site(std::size_t index) const {
  if (index >= volume_) throw PreconditionError("site index out of range");
  Site s = Site::of_dim(dim_);
  const int offset = is_torus() ? 0 : 1;
  for (int a = 0; a < dim_; ++a) {
    const auto stride = stride_[static_cast<std::size_t>(a)];
    s[a] = static_cast<int>(index / stride) + offset;
    index %= stride;
  }
  return s;
}

Site Geometry::shift(const Site& s, int axis, int steps) const {
  if (axis < 0 || axis >= dim_) throw PreconditionError("axis out of range");
  Site out = s;
  if (is_torus()) {
    out[axis] = ((s[axis] + steps) % side_ + side_) % side_;
  } else {
    out[axis] = s[axis] + steps;
  }
  return out;
}

std::size_t Geometry::shift_index(std::size_t index, int axis, int steps) const {
  const auto stride = stride_[static_cast<std::size_t>(axis)];
  const auto coord = static_cast<long long>((index / stride) % static_cast<std::size_t>(side_));
  long long moved = coord + steps;
  if (is_torus()) {
    moved = ((moved % side_) + side_) % side_;
  } else if (moved < 0 || moved >= side_) {
    return volume_;
  }
  return index + static_cast<std::size_t>(moved) * stride - static_cast<std::size_t>(coord) * stride;
}

// ---------------------------------------------------------------------------

Configuration::Configuration(Geometry geometry)
    : geometry_(geometry), words_((geometry.volume() + 63) / 64, 0) {}

Configuration Configuration::from_bits(Geometry geometry, std::string_view bits) {
  if (bits.size() != geometry.volume()) {
    throw PreconditionError("expected " + std::to_string(geometry.volume()) + " occupancy bits, got " +
                            std::to_string(bits.size()));
  }
  Configuration c(geometry);
  for (std::size_t i = 0; i < bits.size(); ++i) {
    if (bits[i] != '0' && bits[i] != '1') throw PreconditionError("occupancy bits must be 0 or 1");
    if (bits[i] == '1') c.set(i, true);
  }
  return c;
}

Configuration Configuration::filled(Geometry geometry) {
  Configuration c(geometry);
  for (std::size_t i = 0; i < geometry.volume(); ++i) c.set(i, true);
  return c;
}

Configuration Configuration::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  int dim = 0;
  int side = 0;
  std::string rest;
  if (!(in >> dim >> side >> rest)) throw PreconditionError("malformed configuration text");
  const auto colon = rest.find(':');
  if (colon == std::string::npos) throw PreconditionError("missing ':' in configuration text");
  const auto kind = rest.substr(0, colon);
  Geometry g = kind == "torus" ? Geometry::torus(dim, side)
               : kind == "box"  ? Geometry::box(side)
                                : throw PreconditionError("unknown geometry kind '" + kind + "'");
  if (g.dim() != dim) throw PreconditionError("box geometry is one-dimensional");
  return from_bits(g, std::string_view(rest).substr(colon + 1));
}

int Configuration::operator()(const Site& s) const {
  if (!geometry_.contains(s)) {
    if (geometry_.is_torus()) throw PreconditionError("site outside torus");
    return 0;
  }
  return at(geometry_.index(s)) ? 1 : 0;
}

void Configuration::set(std::size_t index, bool occupied) {
  if (index >= size()) throw PreconditionError("site index out of range");
  const std::uint64_t mask = std::uint64_t{1} << (index & 63);
  auto& w = words_[index >> 6];
  const bool was = (w & mask) != 0;
  if (was == occupied) return;
  w ^= mask;
  if (occupied) {
    ++count_;
  } else {
    --count_;
  }
}

void Configuration::swap_in_place(std::size_t i, std::size_t j) {
  const bool a = at(i);
  const bool b = at(j);
  if (a == b) return;
  words_[i >> 6] ^= std::uint64_t{1} << (i & 63);
  words_[j >> 6] ^= std::uint64_t{1} << (j & 63);
}

Configuration Configuration::swapped(const Site& x, const Site& y) const {
  return swap(*this, x, y);
}

std::string Configuration::bits() const {
  std::string out(size(), '0');
  for (std::size_t i = 0; i < size(); ++i) {
    if (at(i)) out[i] = '1';
  }
  return out;
}

std::string Configuration::to_string() const {
  return std::to_string(geometry_.dim()) + " " + std::to_string(geometry_.side()) + " " +
         std::string(geometry_.kind_name()) + ":" + bits();
}

Configuration swap(const Configuration& eta, const Site& x, const Site& y) {
  const auto& g = eta.geometry();
  if (!g.contains(x) || !g.contains(y)) throw PreconditionError("swap requires interior sites");
  if (x == y) throw PreconditionError("swap requires distinct sites");
  Configuration out = eta;
  out.swap_in_place(g.index(x), g.index(y));
  return out;
}

Configuration translate(const Configuration& eta, const Site& z) {
  const auto& g = eta.geometry();
  if (!g.is_torus()) throw PreconditionError("translation is defined on the torus only");
  if (z.dim() != g.dim()) throw PreconditionError("translation dimension mismatch");
  Configuration out(g);
  for (std::size_t i = 0; i < g.volume(); ++i) {
    std::size_t j = i;
    for (int a = 0; a < g.dim(); ++a) j = g.shift_index(j, a, z[a]);
    if (eta.at(j)) out.set(i, true);
  }
  return out;
}

double block_average(const Configuration& eta, const Site& x, int radius) {
  const auto& g = eta.geometry();
  if (!g.is_torus()) throw PreconditionError("block average is defined on the torus only");
  if (radius < 0 || 2 * radius + 1 > g.side()) {
    throw PreconditionError("block of radius " + std::to_string(radius) + " does not fit the torus");
  }
  const std::size_t centre = g.index(x);
  const int width = 2 * radius + 1;
  std::size_t cells = 1;
  for (int a = 0; a < g.dim(); ++a) cells *= static_cast<std::size_t>(width);

  std::size_t occupied = 0;
  std::array<int, kMaxDim> offset{};
  for (std::size_t n = 0; n < cells; ++n) {
    std::size_t rem = n;
    std::size_t idx = centre;
    for (int a = 0; a < g.dim(); ++a) {
      offset[static_cast<std::size_t>(a)] = static_cast<int>(rem % static_cast<std::size_t>(width)) - radius;
      rem /= static_cast<std::size_t>(width);
      idx = g.shift_index(idx, a, offset[static_cast<std::size_t>(a)]);
    }
    occupied += eta.at(idx) ? 1u : 0u;
  }
  return static_cast<double>(occupied) / static_cast<double>(cells);
}

std::vector<double> periodic_box_sum(std::span<const double> values, int dim, int side, int radius) {
  const Geometry g = Geometry::torus(dim, side);
  if (values.size() != g.volume()) throw PreconditionError("field size does not match grid");
  if (radius < 0 || 2 * radius + 1 > side) throw PreconditionError("block does not fit the grid");
  std::vector<double> cur(values.begin(), values.end());
  std::vector<double> next(cur.size());
  // Separable: a running window sum along each axis in turn.
  for (int a = 0; a < dim; ++a) {
    for (std::size_t i = 0; i < g.volume(); ++i) {
      double s = 0.0;
      for (int o = -radius; o <= radius; ++o) s += cur[g.shift_index(i, a, o)];
      next[i] = s;
    }
    std::swap(cur, next);
  }
  return cur;
}

}  // namespace kclg
