#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "kclg/field.hpp"
#include "kclg/fluct.hpp"
#include "kclg/kmc.hpp"
#include "kclg/rates.hpp"

namespace kclg {

// ---------------------------------------------------------------------------
// Hydrodynamic comparison

struct HydroParams {
  std::vector<int> sides{128, 256, 512};
  /// Model names as accepted by parse_model.
  std::vector<std::string> models{"pm2"};
  double theta = 1.0;
  double mean = 0.5;
  double amplitude = 0.25;
  double time = 0.05;
  /// Block radius is side / radius_divisor.
  int radius_divisor = 32;
  int replicas = 30;
  int pde_grid = 1024;
  double pde_safety = 0.4;
  std::uint64_t seed = 1;
};

struct HydroRow {
  std::string model;
  int side = 0;
  double l1 = 0.0;
  std::uint64_t events = 0;
  int froze = 0;
  DensityField empirical = DensityField::constant(1, 1, 0.0);
  DensityField pde = DensityField::constant(1, 1, 0.0);
};

/// Replica-averaged empirical profiles at `time` against the PDE solution,
/// one row per (model, side). Perturbed models take their scale N from the side.
std::vector<HydroRow> run_hydro(const HydroParams& p, unsigned jobs);

// ---------------------------------------------------------------------------
// Equilibrium fluctuations

struct FluctParams {
  int side = 512;
  double rho = 0.5;
  std::vector<std::string> models{"pm2"};
  double theta = 1.0;
  std::vector<int> modes{1};
  std::vector<double> lags{0.1};
  int replicas = 32;
  double horizon = 1.0;
  double spacing = 0.005;
  std::size_t batches_per_replica = 1;
  std::uint64_t seed = 7;
};

struct FluctRow {
  std::string model;
  int mode = 0;
  double lag = 0.0;
  double predicted = 0.0;
  CovarianceEstimate estimate;
  std::uint64_t events = 0;
};

std::vector<FluctRow> run_fluct(const FluctParams& p, unsigned jobs);

// ---------------------------------------------------------------------------
// Command-line runner

struct RunOptions {
  std::optional<std::filesystem::path> spec;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;  // 0: machine parallelism
};

/// Runs one subcommand (hydro, gap, ergodic, fluct, check) and writes its CSV
/// files and run-summary JSON into `opts.out`. Returns the process exit status.
int run_command(const std::string& kind, const RunOptions& opts, std::ostream& log);

/// Parses a rate model name: pm2, pm3, ssep, or pm2+ssep / pm3+ssep (θ from
/// `theta`, N from `side`).
RateModel parse_model(const std::string& name, double theta, int side);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);

}  // namespace kclg
