#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <optional>
#include <string>

#include "kclg/hyperplane.hpp"
#include "kclg/rates.hpp"

namespace kclg {

inline constexpr std::size_t kGeneratorBudget = 100'000;
inline constexpr std::size_t kDenseLimit = 4000;

/// Dynamics a generator is built for: a local rate model, or the long-range
/// exclusion with rate 1/N for every particle-vacancy pair.
struct GeneratorKind {
  bool long_range = false;
  RateModel model;

  static GeneratorKind local(const RateModel& m) { return {false, m}; }
  static GeneratorKind long_range_exclusion() { return {true, RateModel::ssep()}; }
  std::string name() const { return long_range ? "long-range" : model.name(); }
};

/// Generator of the chain restricted to Σ_{N,k}; states are hyperplane ranks.
struct SparseGenerator {
  Hyperplane space;
  GeneratorKind kind;
  Eigen::SparseMatrix<double> matrix;  // L(η, ξ) = rate(η → ξ), diagonal = -row sum
  /// k ∈ {0, N^d}: a single state and no moves.
  bool degenerate = false;

  std::size_t size() const { return space.size(); }
};

SparseGenerator build_generator(const Geometry& g, int k, const GeneratorKind& kind,
                                std::size_t budget = kGeneratorBudget);

/// Exact checks: off-diagonals ≥ 0, zero row sums, L = L^T.
bool is_symmetric(const SparseGenerator& gen);
double max_row_sum(const SparseGenerator& gen);

struct GapResult {
  double gap = 0.0;
  /// Number of closed classes, i.e. the multiplicity of the eigenvalue 0.
  std::size_t zero_multiplicity = 1;
  std::string method;
  bool degenerate = false;
};

struct GapOptions {
  std::size_t dense_limit = kDenseLimit;
  double tolerance = 1e-10;
  std::size_t max_iterations = 20000;
};

/// Second-smallest eigenvalue of -L; 0 for reducible chains.
GapResult spectral_gap(const SparseGenerator& gen, const GapOptions& options = {});

/// Number of connected components of the transition graph.
std::size_t count_components(const SparseGenerator& gen);

/// All eigenvalues of -L in increasing order (dense; small instances).
Eigen::VectorXd dense_spectrum(const SparseGenerator& gen);

/// D(f) = -⟨f, Lf⟩ under the uniform measure.
double dirichlet_form(const SparseGenerator& gen, const Eigen::VectorXd& f);
/// (1/N) Σ over ordered pairs (x, y) of E[(f(η^{x,y}) - f(η))²], with no
/// occupancy factor; equals four times the long-range generator's form.
double long_range_pair_sum(const Hyperplane& space, const Eigen::VectorXd& f);
/// Variance under the uniform measure.
double variance(const Eigen::VectorXd& f);

/// Smallest c with D_LR(f) ≤ c·D_other(f) for all f; +infinity when the
/// denominator dynamics is reducible.
double comparison_constant(const Geometry& g, int k, const GeneratorKind& other);

/// Rayleigh quotient D(f)/Var(f) of f(η) = Σ_x H(x/N)η(x) on the hyperplane,
/// with H(u) = √2 cos(2πu) evaluated at the box sites x = 1..N.
double fluctuation_rayleigh_quotient(const SparseGenerator& gen);

}  // namespace kclg
