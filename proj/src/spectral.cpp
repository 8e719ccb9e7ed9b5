#include "kclg/spectral.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "kclg/lanczos.hpp"

namespace kclg {

SparseGenerator build_generator(const Geometry& g, int k, const GeneratorKind& kind, std::size_t budget) {
  Hyperplane space(g, k, budget);
  const auto n = static_cast<Eigen::Index>(space.size());
  SparseGenerator gen{space, kind, Eigen::SparseMatrix<double>(n, n), false};
  gen.degenerate = k == 0 || k == static_cast<int>(g.volume());

  std::vector<Eigen::Triplet<double>> entries;
  std::vector<double> diag(space.size(), 0.0);
  std::vector<std::uint8_t> occ(g.volume() + 1);
  const std::size_t v = g.volume();

  if (kind.long_range) {
    const double rate = 1.0 / static_cast<double>(v);
    space.for_each([&](std::size_t r, std::uint64_t key) {
      space.fill(key, occ.data());
      for (std::size_t x = 0; x < v; ++x) {
        if (!occ[x]) continue;
        for (std::size_t y = 0; y < v; ++y) {
          if (occ[y]) continue;
          const std::size_t r2 = space.rank(space.swap_key(key, x, y));
          entries.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r2), rate);
          diag[r] -= rate;
        }
      }
    });
  } else {
    kind.model.validate_for(g);
    const BondSystem bonds(g, kind.model.reach());
    const RateTable table(kind.model, g);
    space.for_each([&](std::size_t r, std::uint64_t key) {
      space.fill(key, occ.data());
      for (std::size_t b = 0; b < bonds.bond_count(); ++b) {
        const double rate = table[bonds.pack(b, occ.data())];
        if (rate <= 0.0) continue;
        const std::size_t r2 = space.rank(space.swap_key(key, bonds.left(b), bonds.right(b)));
        entries.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r2), rate);
        diag[r] -= rate;
      }
    });
  }
  for (std::size_t r = 0; r < diag.size(); ++r) {
    entries.emplace_back(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(r), diag[r]);
  }
  gen.matrix.setFromTriplets(entries.begin(), entries.end());
  gen.matrix.makeCompressed();
  return gen;
}

bool is_symmetric(const SparseGenerator& gen) {
  const Eigen::SparseMatrix<double> t = gen.matrix.transpose();
  for (Eigen::Index c = 0; c < gen.matrix.outerSize(); ++c) {
    Eigen::SparseMatrix<double>::InnerIterator a(gen.matrix, c);
    Eigen::SparseMatrix<double>::InnerIterator b(t, c);
    for (; a && b; ++a, ++b) {
      if (a.row() != b.row() || a.value() != b.value()) return false;
      if (a.row() != a.col() && a.value() < 0.0) return false;
    }
    if (a || b) return false;
  }
  return true;
}

double max_row_sum(const SparseGenerator& gen) {
  Eigen::VectorXd sums = gen.matrix * Eigen::VectorXd::Ones(gen.matrix.cols());
  return sums.cwiseAbs().maxCoeff();
}

std::size_t count_components(const SparseGenerator& gen) {
  const auto n = static_cast<std::size_t>(gen.matrix.rows());
  std::vector<std::uint32_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0u);
  auto find = [&](std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  std::size_t count = n;
  for (Eigen::Index c = 0; c < gen.matrix.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(gen.matrix, c); it; ++it) {
      if (it.row() == it.col() || it.value() == 0.0) continue;
      const auto a = find(static_cast<std::uint32_t>(it.row()));
      const auto b = find(static_cast<std::uint32_t>(it.col()));
      if (a != b) {
        parent[std::max(a, b)] = std::min(a, b);
        --count;
      }
    }
  }
  return count;
}

Eigen::VectorXd dense_spectrum(const SparseGenerator& gen) {
  const Eigen::MatrixXd a = -Eigen::MatrixXd(gen.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("dense eigensolver did not converge");
  return es.eigenvalues();
}

GapResult spectral_gap(const SparseGenerator& gen, const GapOptions& options) {
  GapResult out;
  if (gen.size() < 2) {
    out.degenerate = true;
    out.method = "degenerate";
    return out;
  }
  out.zero_multiplicity = count_components(gen);
  if (out.zero_multiplicity > 1) {
    out.method = "reducible";
    return out;
  }
  if (gen.size() <= options.dense_limit) {
    out.gap = dense_spectrum(gen)(1);
    out.method = "dense";
    return out;
  }
  const Eigen::SparseMatrix<double> a = -gen.matrix;
  const auto res = smallest_on_complement(a, options.tolerance, options.max_iterations);
  if (!res.converged) {
    throw std::runtime_error("Lanczos did not converge (residual " + std::to_string(res.residual) + ")");
  }
  out.gap = res.value;
  out.method = "lanczos";
  return out;
}

double dirichlet_form(const SparseGenerator& gen, const Eigen::VectorXd& f) {
  if (f.size() != gen.matrix.rows()) throw PreconditionError("vector length does not match the hyperplane");
  return -f.dot(gen.matrix * f) / static_cast<double>(f.size());
}

double variance(const Eigen::VectorXd& f) {
  if (f.size() == 0) throw PreconditionError("empty vector");
  const double mean = f.mean();
  return (f.array() - mean).square().mean();
}

double long_range_pair_sum(const Hyperplane& space, const Eigen::VectorXd& f) {
  if (static_cast<std::size_t>(f.size()) != space.size()) {
    throw PreconditionError("vector length does not match the hyperplane");
  }
  const std::size_t v = space.geometry().volume();
  double total = 0.0;
  space.for_each([&](std::size_t r, std::uint64_t key) {
    for (std::size_t x = 0; x < v; ++x) {
      for (std::size_t y = 0; y < v; ++y) {
        if (x == y) continue;
        const double d = f(static_cast<Eigen::Index>(space.rank(space.swap_key(key, x, y)))) -
                         f(static_cast<Eigen::Index>(r));
        total += d * d;
      }
    }
  });
  return total / static_cast<double>(v) / static_cast<double>(space.size());
}

double comparison_constant(const Geometry& g, int k, const GeneratorKind& other) {
  const auto lr = build_generator(g, k, GeneratorKind::long_range_exclusion());
  const auto den = build_generator(g, k, other);
  if (lr.size() < 2) return 0.0;
  if (count_components(den) > 1) return std::numeric_limits<double>::infinity();
  // Both forms vanish on constants: represent the quotient by fixing the last
  // coordinate to zero, which leaves a positive definite denominator.
  const auto m = static_cast<Eigen::Index>(lr.size() - 1);
  const Eigen::MatrixXd a = -Eigen::MatrixXd(lr.matrix).topLeftCorner(m, m);
  const Eigen::MatrixXd b = -Eigen::MatrixXd(den.matrix).topLeftCorner(m, m);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, b, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("generalized eigensolver failed");
  return es.eigenvalues().maxCoeff();
}

double fluctuation_rayleigh_quotient(const SparseGenerator& gen) {
  const Geometry& g = gen.space.geometry();
  if (g.dim() != 1) throw PreconditionError("the fluctuation test vector is one-dimensional");
  const int n = g.side();
  std::vector<double> h(g.volume());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const int x = g.site(i)[0];
    h[i] = std::numbers::sqrt2 * std::cos(2.0 * std::numbers::pi * x / n);
  }
  Eigen::VectorXd f(static_cast<Eigen::Index>(gen.size()));
  std::vector<std::uint8_t> occ(g.volume() + 1);
  gen.space.for_each([&](std::size_t r, std::uint64_t key) {
    gen.space.fill(key, occ.data());
    double s = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) s += occ[i] ? h[i] : 0.0;
    f(static_cast<Eigen::Index>(r)) = s;
  });
  const double var = variance(f);
  if (!(var > 0.0)) throw PreconditionError("test vector is constant on this hyperplane");
  return dirichlet_form(gen, f) / var;
}

}  // namespace kclg
