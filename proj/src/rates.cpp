#include "kclg/rates.hpp"

#include <algorithm>
#include <cmath>

namespace kclg {

RateModel RateModel::porous_medium(int m) {
  if (m != 2 && m != 3) throw PreconditionError("porous-medium order must be 2 or 3");
  return RateModel{Family::porous_medium, m, 0.0, 0};
}

RateModel RateModel::ssep() { return RateModel{Family::ssep, 1, 0.0, 0}; }

RateModel RateModel::perturbed(int m, double theta, int n) {
  if (m != 2 && m != 3) throw PreconditionError("porous-medium order must be 2 or 3");
  if (!(theta > 0.0 && theta < 2.0)) throw PreconditionError("theta must lie in (0, 2)");
  if (n < 1) throw PreconditionError("perturbation scale N must be positive");
  return RateModel{Family::perturbed, m, theta, n};
}

double RateModel::ssep_prefactor() const {
  switch (family) {
    case Family::porous_medium:
      return 0.0;
    case Family::ssep:
      return 1.0;
    case Family::perturbed:
      return std::pow(static_cast<double>(scale_n), theta - 2.0);
  }
  return 0.0;
}

int RateModel::min_side() const {
  if (family == Family::ssep) return 3;
  return m == 2 ? 4 : 6;
}

void RateModel::validate_for(const Geometry& g) const {
  const int need = (family == Family::ssep && !g.is_torus()) ? 2 : min_side();
  if (g.side() < need) {
    throw PreconditionError(name() + " needs side >= " + std::to_string(need) + ", got " +
                            std::to_string(g.side()));
  }
}

std::string RateModel::name() const {
  switch (family) {
    case Family::porous_medium:
      return "pm" + std::to_string(m);
    case Family::ssep:
      return "ssep";
    case Family::perturbed: {
      std::string t = std::to_string(theta);
      t.erase(t.find_last_not_of('0') + 1);
      if (t.back() == '.') t.pop_back();
      return "pm" + std::to_string(m) + "+ssep(theta=" + t + ",N=" + std::to_string(scale_n) + ")";
    }
  }
  return "?";
}

namespace {

double ssep_part(int dim, bool box) { return box ? 1.0 : 1.0 / (2.0 * dim); }

// Constraint of the porous-medium part from the occupancies at offsets
// -2 .. 3 around the left end of the bond.
int pm_constraint(int m, int em2, int em1, int e2, int e3) {
  if (m == 2) return em1 + e2;
  return em1 * e2 + em2 * em1 + e2 * e3;
}

void check_bond(const Configuration& eta, const Site& x, int axis) {
  const auto& g = eta.geometry();
  if (axis < 0 || axis >= g.dim()) throw PreconditionError("axis out of range");
  if (!g.contains(x) || !g.contains(g.shift(x, axis, 1))) {
    throw PreconditionError("bond at " + to_string(x) + " is not interior");
  }
}

}  // namespace

double kinetic_constraint(const RateModel& model, const Configuration& eta, const Site& x, int axis) {
  check_bond(eta, x, axis);
  const auto& g = eta.geometry();
  const bool box = !g.is_torus();
  if (model.family == Family::ssep) return ssep_part(g.dim(), box);
  auto at = [&](int steps) { return eta(g.shift(x, axis, steps)); };
  const int em2 = model.m == 3 ? at(-2) : 0;
  const int e3 = model.m == 3 ? at(3) : 0;
  double c = pm_constraint(model.m, em2, at(-1), at(2), e3);
  if (model.family == Family::perturbed) c += model.ssep_prefactor() * ssep_part(g.dim(), box);
  return c;
}

double bond_exchange_rate(const RateModel& model, const Configuration& eta, const Site& x, int axis) {
  const double c = kinetic_constraint(model, eta, x, axis);
  const auto& g = eta.geometry();
  return eta(x) == eta(g.shift(x, axis, 1)) ? 0.0 : c;
}

double current(const RateModel& model, const Configuration& eta, const Site& x, int axis) {
  if (model.family != Family::porous_medium) {
    throw PreconditionError("current is defined for the porous-medium family");
  }
  const auto& g = eta.geometry();
  return kinetic_constraint(model, eta, x, axis) * (eta(x) - eta(g.shift(x, axis, 1)));
}

int local_h(const Configuration& eta, const Site& x, int axis) {
  const auto& g = eta.geometry();
  const int e0 = eta(x);
  const int ep = eta(g.shift(x, axis, 1));
  const int em = eta(g.shift(x, axis, -1));
  return e0 * ep + e0 * em - em * ep;
}

int local_g(const Configuration& eta, const Site& x, int axis) {
  const auto& g = eta.geometry();
  const int c = eta(g.shift(x, axis, -1)) + eta(g.shift(x, axis, 2));
  const int d = eta(x) - eta(g.shift(x, axis, 1));
  return c * d * d;
}

double expected_local(LocalName name, double rho, int m) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw PreconditionError("density must lie in [0, 1]");
  if (m != 2 && m != 3) throw PreconditionError("porous-medium order must be 2 or 3");
  const double pm = std::pow(rho, m);
  return name == LocalName::h ? pm : 2.0 * m * pm * (1.0 - rho);
}

double window_constraint(const RateModel& model, std::uint32_t window, int dim, bool box) {
  if (model.family == Family::ssep) return ssep_part(dim, box);
  const int r = model.m;
  auto bit = [&](int offset) { return static_cast<int>((window >> (offset + r - 1)) & 1u); };
  const int em2 = r == 3 ? bit(-2) : 0;
  const int e3 = r == 3 ? bit(3) : 0;
  double c = pm_constraint(model.m, em2, bit(-1), bit(2), e3);
  if (model.family == Family::perturbed) c += model.ssep_prefactor() * ssep_part(dim, box);
  return c;
}

double window_exchange_rate(const RateModel& model, std::uint32_t window, int dim, bool box) {
  const int r = model.reach();
  const bool a = ((window >> (r - 1)) & 1u) != 0;
  const bool b = ((window >> r) & 1u) != 0;
  return a == b ? 0.0 : window_constraint(model, window, dim, box);
}

RateTable::RateTable(const RateModel& model, const Geometry& g) : reach_(model.reach()) {
  model.validate_for(g);
  rates_.resize(std::size_t{1} << (2 * reach_));
  for (std::uint32_t w = 0; w < rates_.size(); ++w) {
    rates_[w] = window_exchange_rate(model, w, g.dim(), !g.is_torus());
  }
}

BondSystem::BondSystem(const Geometry& g, int reach) : geometry_(g), reach_(reach) {
  if (reach < 1 || reach > 3) throw PreconditionError("window reach must be in [1, 3]");
  const std::size_t v = g.volume();
  const auto width = static_cast<std::size_t>(2 * reach);
  for (std::size_t i = 0; i < v; ++i) {
    for (int a = 0; a < g.dim(); ++a) {
      const std::size_t j = g.shift_index(i, a, 1);
      if (j == v) continue;
      left_.push_back(static_cast<std::uint32_t>(i));
      right_.push_back(static_cast<std::uint32_t>(j));
      axis_.push_back(a);
      for (int t = 0; t < 2 * reach; ++t) {
        windows_.push_back(static_cast<std::uint32_t>(g.shift_index(i, a, t - (reach - 1))));
      }
    }
  }
  touching_.resize(v);
  for (std::size_t b = 0; b < left_.size(); ++b) {
    for (std::size_t t = 0; t < width; ++t) {
      const std::uint32_t s = windows_[b * width + t];
      if (s == v) continue;
      auto& list = touching_[s];
      if (std::find(list.begin(), list.end(), static_cast<std::uint32_t>(b)) == list.end()) {
        list.push_back(static_cast<std::uint32_t>(b));
      }
    }
  }
}

std::uint32_t BondSystem::pack(std::size_t b, const Configuration& eta) const {
  const std::uint32_t* w = window(b);
  const std::size_t v = geometry_.volume();
  std::uint32_t bits = 0;
  for (int t = 0; t < 2 * reach_; ++t) {
    if (w[t] != v && eta.at(w[t])) bits |= 1u << t;
  }
  return bits;
}

// ---------------------------------------------------------------------------
// Gradient decomposition

namespace {

Rational window_current(const RateModel& model, std::uint32_t window) {
  const int r = model.reach();
  const int e0 = static_cast<int>((window >> (r - 1)) & 1u);
  const int e1 = static_cast<int>((window >> r) & 1u);
  if (model.family == Family::ssep) return Rational(e0 - e1);
  const auto c = static_cast<std::int64_t>(window_constraint(model, window, 1, false));
  return Rational(c * (e0 - e1));
}

// Comparisons against plain integers recurse forever in Boost 1.74 under C++20.
const Rational kZero(0);

using Matrix = std::vector<std::vector<Rational>>;

// Reduced row echelon form in place; returns the pivot column of each pivot row.
std::vector<std::size_t> rref(Matrix& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t col = 0; col < cols && row < a.size(); ++col) {
    std::size_t p = row;
    while (p < a.size() && a[p][col] == kZero) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    const Rational inv = Rational(1) / a[row][col];
    for (auto& v : a[row]) v *= inv;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (i == row || a[i][col] == kZero) continue;
      const Rational f = a[i][col];
      for (std::size_t j = col; j < a[i].size(); ++j) a[i][j] -= f * a[row][j];
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

}  // namespace

Rational GradientDecomposition::max_residual(const RateModel& model) const {
  const int r = reach;
  const std::uint32_t hmask = (1u << (2 * r - 1)) - 1;
  Rational worst(0);
  for (std::uint32_t w = 0; w < (1u << (2 * r)); ++w) {
    const Rational diff = window_current(model, w) - (values[w & hmask] - values[(w >> 1) & hmask]);
    worst = std::max(worst, diff < kZero ? -diff : diff);
  }
  return worst;
}

std::optional<GradientDecomposition> find_gradient_decomposition(const RateModel& model,
                                                                 GaugeChoice gauge) {
  if (model.family == Family::perturbed) {
    throw PreconditionError("gradient decomposition needs a single-family model");
  }
  const int r = model.reach();
  const std::size_t unknowns = std::size_t{1} << (2 * r - 1);
  const std::uint32_t hmask = static_cast<std::uint32_t>(unknowns - 1);
  const std::uint32_t windows = 1u << (2 * r);

  Matrix a;
  for (std::uint32_t w = 0; w < windows; ++w) {
    std::vector<Rational> row(unknowns + 1, Rational(0));
    row[w & hmask] += 1;
    row[(w >> 1) & hmask] -= 1;
    row[unknowns] = window_current(model, w);
    a.push_back(std::move(row));
  }
  Matrix reduced = a;
  const auto pivots = rref(reduced, unknowns);
  for (std::size_t i = pivots.size(); i < reduced.size(); ++i) {
    if (reduced[i][unknowns] != kZero) return std::nullopt;
  }

  // Particular solution with every free variable set to zero.
  std::vector<Rational> h(unknowns, Rational(0));
  for (std::size_t i = 0; i < pivots.size(); ++i) h[pivots[i]] = reduced[i][unknowns];

  // Null-space basis: one vector per free column.
  std::vector<bool> is_pivot(unknowns, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<std::vector<Rational>> null;
  for (std::size_t f = 0; f < unknowns; ++f) {
    if (is_pivot[f]) continue;
    std::vector<Rational> v(unknowns, Rational(0));
    v[f] = 1;
    for (std::size_t i = 0; i < pivots.size(); ++i) v[pivots[i]] = -reduced[i][f];
    null.push_back(std::move(v));
  }

  if (!null.empty()) {
    // Coefficients c for h + Σ c_i v_i from the normal equations G c = -V h.
    // The pin h(0) = 0 replaces one normal equation; the null space is the
    // constants, so with the pin the result is unique.
    const std::size_t k = null.size();
    Matrix sys(k, std::vector<Rational>(k + 1, Rational(0)));
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        for (std::size_t s = 0; s < unknowns; ++s) sys[i][j] += null[i][s] * null[j][s];
      }
      for (std::size_t s = 0; s < unknowns; ++s) sys[i][k] -= null[i][s] * h[s];
    }
    if (gauge == GaugeChoice::vanish_on_empty) {
      // Replace the first normal equation by the pin h(0) + Σ c_i v_i(0) = 0.
      std::size_t anchor = k;
      for (std::size_t i = 0; i < k; ++i) {
        if (null[i][0] != kZero) {
          anchor = i;
          break;
        }
      }
      if (anchor < k) {
        std::vector<Rational> pin(k + 1, Rational(0));
        for (std::size_t j = 0; j < k; ++j) pin[j] = null[j][0];
        pin[k] = -h[0];
        sys[anchor] = std::move(pin);
      }
    }
    const auto piv = rref(sys, k);
    std::vector<Rational> c(k, Rational(0));
    for (std::size_t i = 0; i < piv.size(); ++i) c[piv[i]] = sys[i][k];
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t s = 0; s < unknowns; ++s) h[s] += c[i] * null[i][s];
    }
  }

  GradientDecomposition out{r, std::move(h)};
  if (out.max_residual(model) != kZero) return std::nullopt;
  return out;
}

}  // namespace kclg
