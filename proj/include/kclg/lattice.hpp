#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kclg {

/// Thrown when an operation is called outside its documented domain.
class PreconditionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr int kMaxDim = 4;

enum class GeometryKind { torus, box };

/// A lattice site. Torus coordinates live in [0, N), box coordinates in [1, N].
/// Box sites produced by `Geometry::shift` may fall outside that range; such a
/// site is a boundary site and always reads as empty.
class Site {
 public:
  Site() = default;
  Site(std::initializer_list<int> coords);
  static Site of_dim(int dim);

  int dim() const { return dim_; }
  int operator[](int axis) const { return coords_[static_cast<std::size_t>(axis)]; }
  int& operator[](int axis) { return coords_[static_cast<std::size_t>(axis)]; }

  friend bool operator==(const Site&, const Site&) = default;

 private:
  std::array<int, kMaxDim> coords_{};
  int dim_ = 0;
};

std::string to_string(const Site& s);

/// Discrete torus T_N^d, or the d=1 box {1..N} whose exterior is frozen empty.
class Geometry {
 public:
  static Geometry torus(int dim, int side);
  static Geometry box(int side);

  GeometryKind kind() const { return kind_; }
  bool is_torus() const { return kind_ == GeometryKind::torus; }
  int dim() const { return dim_; }
  int side() const { return side_; }
  std::size_t volume() const { return volume_; }
  std::string_view kind_name() const;

  bool contains(const Site& s) const;
  /// Row-major index of an interior site (first coordinate most significant).
  std::size_t index(const Site& s) const;
  Site site(std::size_t index) const;
  /// Advances coordinate `axis` (0-based) by `steps`. Wraps on the torus; on the
  /// box the result may be a boundary site.
  Site shift(const Site& s, int axis, int steps) const;
  /// Index-level shift; returns `volume()` for boundary sites of the box.
  std::size_t shift_index(std::size_t index, int axis, int steps) const;

  friend bool operator==(const Geometry&, const Geometry&) = default;

 private:
  Geometry(GeometryKind kind, int dim, int side);

  GeometryKind kind_ = GeometryKind::torus;
  int dim_ = 1;
  int side_ = 1;
  std::size_t volume_ = 1;
  std::array<std::size_t, kMaxDim> stride_{};
};

/// Occupancy of every site, packed one bit per site in row-major order.
class Configuration {
 public:
  explicit Configuration(Geometry geometry);
  static Configuration from_bits(Geometry geometry, std::string_view bits);
  static Configuration filled(Geometry geometry);
  /// Parses the compact text form "d N kind:bits", e.g. "1 5 torus:10100".
  static Configuration parse(std::string_view text);

  const Geometry& geometry() const { return geometry_; }
  std::size_t count() const { return count_; }
  std::size_t size() const { return geometry_.volume(); }

  bool at(std::size_t index) const {
    return ((words_[index >> 6] >> (index & 63)) & 1u) != 0;
  }
  /// Occupancy of a site; boundary sites of the box read 0.
  int operator()(const Site& s) const;

  void set(std::size_t index, bool occupied);
  /// η^{x,y}: occupancies of x and y exchanged.
  Configuration swapped(const Site& x, const Site& y) const;
  void swap_in_place(std::size_t i, std::size_t j);

  std::string bits() const;
  std::string to_string() const;
  std::span<const std::uint64_t> words() const { return words_; }

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.geometry_ == b.geometry_ && a.words_ == b.words_;
  }

 private:
  Geometry geometry_;
  std::vector<std::uint64_t> words_;
  std::size_t count_ = 0;
};

/// η^{x,y}; rejects x == y and boundary sites.
Configuration swap(const Configuration& eta, const Site& x, const Site& y);

/// τ_z η, defined by (τ_z η)(x) = η(x + z). Torus only.
Configuration translate(const Configuration& eta, const Site& z);

/// η^l(x): density in the cube of half-width l around x (periodic wrap).
double block_average(const Configuration& eta, const Site& x, int radius);

/// Block sums of `values` over cubes of half-width `radius` on the periodic
/// grid of side `side` in `dim` dimensions (row-major), one entry per cube centre.
std::vector<double> periodic_box_sum(std::span<const double> values, int dim, int side,
                                     int radius);

}  // namespace kclg
