#include "kclg/field.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <ostream>

#include "kclg/lattice.hpp"

namespace kclg {

namespace {

std::size_t grid_size(int dim, int side) {
  if (dim < 1 || dim > kMaxDim) throw PreconditionError("field dimension out of range");
  if (side < 1) throw PreconditionError("field side must be positive");
  std::size_t n = 1;
  for (int a = 0; a < dim; ++a) n *= static_cast<std::size_t>(side);
  return n;
}

}  // namespace

DensityField::DensityField(int dim, int side, std::vector<double> values)
    : dim_(dim), side_(side), values_(std::move(values)) {
  if (values_.size() != grid_size(dim, side)) throw PreconditionError("field size does not match grid");
}

DensityField DensityField::constant(int dim, int side, double value) {
  return DensityField(dim, side, std::vector<double>(grid_size(dim, side), value));
}

DensityField DensityField::sample(int dim, int side, const std::function<double(std::span<const double>)>& f) {
  DensityField out = constant(dim, side, 0.0);
  std::array<double, kMaxDim> u{};
  for (std::size_t i = 0; i < out.size(); ++i) {
    for (int a = 0; a < dim; ++a) u[static_cast<std::size_t>(a)] = out.coordinate(i, a);
    out.values_[i] = f(std::span<const double>(u.data(), static_cast<std::size_t>(dim)));
  }
  return out;
}

double DensityField::cell_volume() const { return std::pow(1.0 / side_, dim_); }

double DensityField::coordinate(std::size_t i, int axis) const {
  std::size_t stride = 1;
  for (int a = dim_ - 1; a > axis; --a) stride *= static_cast<std::size_t>(side_);
  return static_cast<double>((i / stride) % static_cast<std::size_t>(side_)) / side_;
}

double DensityField::nearest(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim_) throw PreconditionError("point dimension mismatch");
  std::size_t idx = 0;
  for (int a = 0; a < dim_; ++a) {
    double x = u[static_cast<std::size_t>(a)] - std::floor(u[static_cast<std::size_t>(a)]);
    auto cell = static_cast<long long>(std::llround(x * side_)) % side_;
    idx = idx * static_cast<std::size_t>(side_) + static_cast<std::size_t>(cell);
  }
  return values_[idx];
}

double DensityField::mass() const {
  double s = 0.0;
  for (double v : values_) s += v;
  return s * cell_volume();
}

double DensityField::max_abs_difference(const DensityField& other) const {
  if (other.dim_ != dim_ || other.side_ != side_) throw PreconditionError("grids differ");
  double worst = 0.0;
  for (std::size_t i = 0; i < values_.size(); ++i) worst = std::max(worst, std::abs(values_[i] - other.values_[i]));
  return worst;
}

void DensityField::write_csv(std::ostream& out) const {
  out << (dim_ == 1 ? "u,value\n" : "index,value\n");
  out.precision(17);
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (dim_ == 1) {
      out << coordinate(i, 0) << ',' << values_[i] << '\n';
    } else {
      out << i << ',' << values_[i] << '\n';
    }
  }
}

double l1_distance(const DensityField& a, const DensityField& b) {
  if (a.dim() != b.dim()) throw PreconditionError("fields have different dimensions");
  double s = 0.0;
  if (a.side() == b.side()) {
    for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  } else {
    std::array<double, kMaxDim> u{};
    for (std::size_t i = 0; i < a.size(); ++i) {
      for (int ax = 0; ax < a.dim(); ++ax) u[static_cast<std::size_t>(ax)] = a.coordinate(i, ax);
      s += std::abs(a[i] - b.nearest(std::span<const double>(u.data(), static_cast<std::size_t>(a.dim()))));
    }
  }
  return s * a.cell_volume();
}

}  // namespace kclg
