#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace kclg {

/// Real values on the periodic grid of side M in d dimensions; cell i sits at
/// u = i/M along each axis, stored row-major.
class DensityField {
 public:
  DensityField(int dim, int side, std::vector<double> values);
  static DensityField constant(int dim, int side, double value);
  /// Samples f at the grid nodes; f receives the d macroscopic coordinates.
  static DensityField sample(int dim, int side, const std::function<double(std::span<const double>)>& f);

  int dim() const { return dim_; }
  int side() const { return side_; }
  std::size_t size() const { return values_.size(); }
  double cell_volume() const;
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> values() const { return values_; }
  std::vector<double>& mutable_values() { return values_; }

  /// Macroscopic coordinate of node i along the given axis.
  double coordinate(std::size_t i, int axis) const;
  /// Value at the grid node nearest to u, with periodic wrap.
  double nearest(std::span<const double> u) const;
  double mass() const;
  double max_abs_difference(const DensityField& other) const;

  void write_csv(std::ostream& out) const;

 private:
  int dim_;
  int side_;
  std::vector<double> values_;
};

/// Σ |a - b| Δu^d on a's grid; b is read by nearest-node lookup when the grids differ.
double l1_distance(const DensityField& a, const DensityField& b);

}  // namespace kclg
