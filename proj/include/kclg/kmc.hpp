#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "kclg/field.hpp"
#include "kclg/lattice.hpp"
#include "kclg/rates.hpp"
#include "kclg/rng.hpp"

namespace kclg {

/// Macroscopic initial density ρ0 on the continuum torus.
struct InitialProfile {
  std::function<double(std::span<const double>)> rho0;
  /// When set, ρ0 must stay within [δ0, 1-δ0].
  std::optional<double> delta0;

  static InitialProfile constant(double rho);
  /// ρ0(u) = mean + amplitude·cos(2π u_1).
  static InitialProfile cosine(double mean, double amplitude);
};

/// Product measure with slowly varying parameter: η(x) ~ Bernoulli(ρ0(x/N)).
Configuration sample_initial(const InitialProfile& profile, const Geometry& g, Philox& rng);

struct SimConfig {
  RateModel model;
  Geometry geometry;
  double horizon = 0.0;
  std::vector<double> snapshot_times;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
};

struct Snapshot {
  double time;
  Configuration eta;
};

struct Trajectory {
  Geometry geometry;
  RateModel model;
  std::uint64_t seed = 0;
  std::uint32_t replica = 0;
  std::vector<Snapshot> snapshots;
  std::uint64_t events = 0;
  /// Total rate reached zero before the horizon.
  bool froze = false;

  const Configuration& at(double t) const;
};

/// Samples the chain with bond rates N²·bond_exchange_rate; times are macroscopic.
Trajectory simulate(const Configuration& initial, const SimConfig& cfg);

/// Evenly spaced times 0, dt, 2dt, ... up to and including the horizon.
std::vector<double> uniform_times(double horizon, std::size_t intervals);

/// u = x/N ↦ η^l(x) for the snapshot recorded at time t.
DensityField empirical_profile(const Trajectory& traj, double t, int radius);
DensityField empirical_profile(const Configuration& eta, int radius);

/// N^{-d} Σ_x |(2l+1)^{-d} Σ_{|y-x|≤l} ψ(τ_y η) - ψ̃(η^l(x))| for ψ = h or g
/// along the first axis (m=2 functions).
double replacement_diagnostic(const Configuration& eta, int radius, LocalName psi);
double replacement_diagnostic(const Trajectory& traj, double t, int radius, LocalName psi);

}  // namespace kclg
