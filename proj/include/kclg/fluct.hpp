#pragma once

#include <functional>
#include <span>
#include <vector>

#include "kclg/kmc.hpp"
#include "kclg/lattice.hpp"

namespace kclg {

/// h_z on T^d: √2 cos(2π z·u) for z > 0, √2 sin(2π z·u) for z < 0, h_0 = 1,
/// where the sign of z is that of its first nonzero entry.
class FourierMode {
 public:
  explicit FourierMode(std::vector<int> z);
  static FourierMode one_d(int z) { return FourierMode({z}); }

  const std::vector<int>& frequency() const { return z_; }
  int dim() const { return static_cast<int>(z_.size()); }
  int sign() const;
  double norm_squared() const;
  double operator()(std::span<const double> u) const;
  /// Eigenvalue of 1 - Δ on h_z.
  double gamma() const;

 private:
  std::vector<int> z_;
};

using TestFn = std::function<double(std::span<const double>)>;
TestFn as_test_function(const FourierMode& h);

/// Y(H) = N^{-d/2} Σ_x H(x/N)(η(x) - ρ).
double field_value(const Configuration& eta, const TestFn& h, double rho);

/// Predicted E[Y_t(H) Y_{t+lag}(G)] = χ(ρ)⟨H, S_lag G⟩ with the heat kernel of
/// variance 4ρ·lag, by periodized-kernel quadrature on `grid` points (d=1).
double ou_covariance(const TestFn& h, const TestFn& g, double lag, double rho, int grid = 512);
/// Closed form on Fourier modes: χ(ρ) δ_{zz'} exp(-2ρ·lag·4π²|z|²).
double ou_covariance(const FourierMode& h, const FourierMode& g, double lag, double rho);

/// Exact E_{ν_ρ}[Y(H)²] = ρ(1-ρ) N^{-d} Σ_x H(x/N)² by summing covariances.
double static_variance(const TestFn& h, int dim, int side, double rho);

/// Exact E_{ν_ρ}-level Dirichlet form of L_P (m=2, torus, d=1) evaluated on
/// Y(H): ½ Σ_x E[c (η(x)-η(x+1))²] (Y(η^{x,x+1}) - Y(η))², with the local
/// expectation summed over all window configurations.
double dirichlet_of_field(const TestFn& h, int side, double rho);

struct CovarianceEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t batches = 0;
  std::size_t pairs = 0;
};

/// Mean of Y_t(H)Y_{t+lag}(G) over all recorded time pairs and replicas, with
/// the standard error of batch means. Each replica is cut into
/// `batches_per_replica` contiguous batches of time origins.
CovarianceEstimate estimate_time_covariance(const std::vector<Trajectory>& runs, const TestFn& h,
                                            const TestFn& g, double lag, double rho,
                                            std::size_t batches_per_replica = 1);

/// Same estimator on precomputed field series: series[r][i] = (Y_{t_i}(H), Y_{t_i}(G))
/// for replica r on a common uniform time grid with spacing `dt`.
CovarianceEstimate estimate_time_covariance(const std::vector<std::vector<std::pair<double, double>>>& series,
                                            double dt, double lag, std::size_t batches_per_replica = 1);

}  // namespace kclg
