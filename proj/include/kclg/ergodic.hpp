#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "kclg/hyperplane.hpp"
#include "kclg/lattice.hpp"
#include "kclg/rates.hpp"

namespace kclg {

/// True iff no bond has a positive exchange rate (the full configuration counts).
bool is_blocked(const Configuration& eta, const RateModel& model);

/// d=1: two particles at distance ≤ 2 (cyclic on the torus). d ≥ 2: a filled
/// cube of side 2 somewhere on the torus.
bool has_mobile_cluster(const Configuration& eta);

enum class ComponentClass { mobile, blocked_singleton, full, other };
std::string_view class_name(ComponentClass c);

struct Component {
  std::size_t size = 0;
  /// Lexicographically smallest member.
  Configuration representative;
  ComponentClass cls = ComponentClass::other;
};

struct ComponentReport {
  Geometry geometry;
  int particles = 0;
  RateModel model;
  std::size_t total_states = 0;
  std::vector<Component> components;

  std::size_t count(ComponentClass c) const;
};

/// Component label of every state of a hyperplane under positive-rate moves.
struct ComponentLabels {
  std::vector<std::uint32_t> label;  // by rank; labels are 0 .. count-1 in order of first appearance
  std::size_t count = 0;
};
ComponentLabels label_components(const Hyperplane& h, const RateModel& model);

ComponentReport components(const Geometry& g, int k, const RateModel& model,
                           std::size_t budget = kDefaultStateBudget);

/// Pair counts and the bounds that rest on them, for a d=1 box configuration.
struct CoupleBounds {
  int sites = 0;
  int particles = 0;
  /// pairs[j] = Σ_z Σ_{l=1..j} η(z)η(z+l); index 0 unused.
  std::vector<long> pairs;
  /// near[j] = |B_j|, particles with another particle within distance j.
  std::vector<long> near;

  /// pairs[j] ≥ near[j]/2 ≥ (j+1)/(2j)(k - N/(j+1) - j/(j+1)), checked in integers.
  bool bound_holds(int j) const;
  /// The j=2 bound, stated for k > N/3.
  bool large_density_bound_holds() const { return bound_holds(2); }
};
CoupleBounds couple_bounds(const Configuration& eta, int max_distance = 2);

}  // namespace kclg
