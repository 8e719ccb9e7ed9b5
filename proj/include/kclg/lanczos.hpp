#pragma once

#include <Eigen/SparseCore>

#include <cstddef>

namespace kclg {

struct LanczosResult {
  double value = 0.0;
  double residual = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Smallest eigenvalue of the symmetric positive semidefinite matrix `a` on
/// the orthogonal complement of the constant vector. Explicitly restarted
/// Lanczos with full reorthogonalization inside each cycle.
LanczosResult smallest_on_complement(const Eigen::SparseMatrix<double>& a, double tolerance,
                                     std::size_t max_iterations, std::size_t cycle = 120);

}  // namespace kclg
