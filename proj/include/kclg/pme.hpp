#pragma once

#include <functional>
#include <vector>

#include "kclg/field.hpp"

namespace kclg {

struct PmeOptions {
  double safety = 0.4;
  double floor = 1e-12;
  /// Extra output times (each ≤ horizon); the solver lands on them exactly.
  std::vector<double> record_times;
};

struct PmeResult {
  DensityField final;
  /// Fields at the requested record times, in order.
  std::vector<DensityField> recorded;
  std::size_t steps = 0;
};

/// Explicit conservative scheme for ∂tρ = Δρ^m on the periodic grid.
PmeResult solve_pme(const DensityField& rho0, int m, double horizon, const PmeOptions& options);
DensityField solve_pme(const DensityField& rho0, int m, double horizon, double safety = 0.4);

/// Smooth test function H(t, u) with the derivatives the weak form needs.
struct TestFunction {
  std::function<double(double, double)> value;
  std::function<double(double, double)> dt;
  std::function<double(double, double)> laplacian;

  static TestFunction spatial_cosine(int frequency);
  static TestFunction constant(double c);
};

/// |∫∫ (ρ ∂tH + ρ^m ΔH) + ∫ρ_0 H(0) - ∫ρ_T H(T)| by trapezoid in time and the
/// grid sum in space. `fields[i]` is the d=1 solution at `times[i]`.
double weak_residual(const std::vector<DensityField>& fields, const std::vector<double>& times,
                     const TestFunction& h, int m);

}  // namespace kclg
