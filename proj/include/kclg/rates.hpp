#pragma once

#include <boost/rational.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "kclg/lattice.hpp"

namespace kclg {

enum class Family { porous_medium, ssep, perturbed };

/// Which exchange dynamics is run. `m` is the porous-medium order; for the
/// perturbed mixture L_P + N^{θ-2} L_S, `theta` and `scale_n` fix the prefactor.
struct RateModel {
  Family family = Family::porous_medium;
  int m = 2;
  double theta = 1.0;
  int scale_n = 0;

  static RateModel porous_medium(int m);
  static RateModel ssep();
  static RateModel perturbed(int m, double theta, int n);

  /// N^{θ-2}; zero for the pure porous-medium family.
  double ssep_prefactor() const;
  bool has_constraint() const { return family != Family::ssep; }
  /// Constraint windows of a bond (x, x+e) cover x-(r-1) .. x+r.
  int reach() const { return family == Family::ssep ? 1 : m; }
  int min_side() const;
  void validate_for(const Geometry& g) const;
  std::string name() const;
};

/// c(x, x+e_axis, η). `axis` is 0-based.
double kinetic_constraint(const RateModel& model, const Configuration& eta, const Site& x, int axis);
/// Rate at which η(x) and η(x+e_axis) are exchanged: zero when they agree.
double bond_exchange_rate(const RateModel& model, const Configuration& eta, const Site& x, int axis);
/// W_{x,x+e}(η) = c(x,x+e,η)(η(x) - η(x+e)). Porous-medium family only.
double current(const RateModel& model, const Configuration& eta, const Site& x, int axis);

/// h_j and g_j of the m=2 gradient decomposition, translated to site x.
int local_h(const Configuration& eta, const Site& x, int axis);
int local_g(const Configuration& eta, const Site& x, int axis);

enum class LocalName { h, g };
/// E_{ν_ρ}[h] = ρ^m and E_{ν_ρ}[g] = 2mρ^m(1-ρ) (the m=2 value is 4ρ²(1-ρ)).
double expected_local(LocalName name, double rho, int m);

/// Constraint and exchange rate as a function of the packed window of one
/// bond: bit t holds the occupancy of site x-(r-1)+t, t = 0 .. 2r-1.
double window_constraint(const RateModel& model, std::uint32_t window, int dim, bool box);
double window_exchange_rate(const RateModel& model, std::uint32_t window, int dim, bool box);

/// Exchange rates of every window, indexed by the packed window.
class RateTable {
 public:
  RateTable(const RateModel& model, const Geometry& g);
  double operator[](std::uint32_t window) const { return rates_[window]; }
  int reach() const { return reach_; }
  std::size_t size() const { return rates_.size(); }

 private:
  int reach_;
  std::vector<double> rates_;
};

/// All nearest-neighbour bonds of a geometry with the site indices of their
/// constraint windows. Window entries equal to `volume()` are boundary sites.
class BondSystem {
 public:
  BondSystem(const Geometry& g, int reach);

  const Geometry& geometry() const { return geometry_; }
  int reach() const { return reach_; }
  std::size_t bond_count() const { return left_.size(); }
  std::size_t left(std::size_t b) const { return left_[b]; }
  std::size_t right(std::size_t b) const { return right_[b]; }
  int axis(std::size_t b) const { return axis_[b]; }
  const std::uint32_t* window(std::size_t b) const { return &windows_[b * 2 * static_cast<std::size_t>(reach_)]; }
  /// Bonds whose window contains the given site.
  const std::vector<std::uint32_t>& touching(std::size_t site) const { return touching_[site]; }

  /// Packs the window of bond b from an occupancy array with a trailing 0 sentinel.
  std::uint32_t pack(std::size_t b, const std::uint8_t* occ) const {
    const std::uint32_t* w = window(b);
    std::uint32_t bits = 0;
    for (int t = 0; t < 2 * reach_; ++t) bits |= static_cast<std::uint32_t>(occ[w[t]]) << t;
    return bits;
  }
  std::uint32_t pack(std::size_t b, const Configuration& eta) const;

 private:
  Geometry geometry_;
  int reach_;
  std::vector<std::uint32_t> left_;
  std::vector<std::uint32_t> right_;
  std::vector<int> axis_;
  std::vector<std::uint32_t> windows_;
  std::vector<std::vector<std::uint32_t>> touching_;
};

using Rational = boost::rational<std::int64_t>;

/// A local function h on sites -(r-1) .. r-1 whose increment h - τ_{e_1}h
/// reproduces the current W_{0,e_1}. Bit s of the argument is the occupancy
/// of site s-(r-1).
struct GradientDecomposition {
  int reach = 0;
  std::vector<Rational> values;

  Rational operator()(std::uint32_t bits) const { return values.at(bits); }
  /// Largest |W - (h - τh)| over all windows of the current.
  Rational max_residual(const RateModel& model) const;
};

enum class GaugeChoice {
  vanish_on_empty,  // h(empty window) = 0
  least_norm,       // minimum Euclidean norm over the window table
};

/// Solves W_{0,e_1} = h - τ_{e_1}h exactly over all window configurations.
/// Returns nullopt when the system has no solution.
std::optional<GradientDecomposition> find_gradient_decomposition(
    const RateModel& model, GaugeChoice gauge = GaugeChoice::vanish_on_empty);

}  // namespace kclg
