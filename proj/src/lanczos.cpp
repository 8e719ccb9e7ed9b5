#include "kclg/lanczos.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

#include "kclg/lattice.hpp"
#include "kclg/rng.hpp"

namespace kclg {

namespace {

void remove_mean(Eigen::VectorXd& v) { v.array() -= v.mean(); }

}  // namespace

LanczosResult smallest_on_complement(const Eigen::SparseMatrix<double>& a, double tolerance,
                                     std::size_t max_iterations, std::size_t cycle) {
  const auto n = static_cast<std::size_t>(a.rows());
  if (n < 2) throw PreconditionError("complement of constants is empty");
  const std::size_t m = std::min(cycle, n - 1);

  Philox rng(0x5eed, 0);
  Eigen::VectorXd start(static_cast<Eigen::Index>(n));
  for (auto& x : start) x = rng.uniform() - 0.5;
  remove_mean(start);
  start.normalize();

  LanczosResult result;
  Eigen::MatrixXd basis(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(m));
  while (result.iterations < max_iterations) {
    std::vector<double> alpha;
    std::vector<double> beta;
    basis.col(0) = start;
    double last_beta = 0.0;
    std::size_t steps = 0;
    for (std::size_t j = 0; j < m; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      Eigen::VectorXd w = a * basis.col(jj);
      alpha.push_back(basis.col(jj).dot(w));
      // Full reorthogonalization, twice for stability.
      for (int pass = 0; pass < 2; ++pass) {
        const Eigen::VectorXd coeff = basis.leftCols(jj + 1).transpose() * w;
        w -= basis.leftCols(jj + 1) * coeff;
        remove_mean(w);
      }
      ++steps;
      ++result.iterations;
      last_beta = w.norm();
      if (j + 1 == m || last_beta < 1e-14) break;
      beta.push_back(last_beta);
      basis.col(jj + 1) = w / last_beta;
    }
    const auto k = static_cast<Eigen::Index>(steps);
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      t(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) t(i, i + 1) = t(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(t);
    const double theta = es.eigenvalues()(0);
    const Eigen::VectorXd y = es.eigenvectors().col(0);
    result.value = theta;
    result.residual = std::abs(last_beta * y(k - 1));
    if (result.residual <= tolerance * std::max(1.0, std::abs(theta)) || last_beta < 1e-14) {
      result.converged = true;
      break;
    }
    start = basis.leftCols(k) * y;
    remove_mean(start);
    start.normalize();
  }
  return result;
}

}  // namespace kclg
