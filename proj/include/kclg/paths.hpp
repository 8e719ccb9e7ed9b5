#pragma once

#include <string>
#include <vector>

#include "kclg/lattice.hpp"
#include "kclg/rates.hpp"

namespace kclg {

/// One nearest-neighbour exchange (x, x+1) in d=1, with the kinetic
/// constraint c(x, x+1, ·) of the configuration it is applied to.
struct MoveStep {
  int site = 0;
  double rate = 0.0;
};

/// A sequence of exchanges η_1 → η_2 → ... from `start` to `end`. Steps whose
/// two sites agree leave the configuration unchanged but still count.
struct MovePath {
  Configuration start;
  Configuration end;
  std::vector<MoveStep> steps;

  /// Number of configurations η_1 .. η_γ visited, i.e. steps + 1.
  std::size_t configurations() const { return steps.size() + 1; }
};

/// Replays the path with the model's own rate function; empty on success,
/// otherwise a description of the first failure.
std::string check_path(const MovePath& path, const RateModel& model);

enum class Direction { left, right };

/// Shifts the two-particle cluster whose leftmost particle is at `x` by one
/// site. The cluster is (x, x+1) or (x, x+2). d=1, m=2.
MovePath cluster_shift_path(const Configuration& eta, int x, Direction dir, const RateModel& model);

/// Realizes η → η^{x,y} with porous-medium moves, using the couple whose left
/// particle sits at z: (z, z+1) if η(z+1)=1, otherwise (z, z+2). The couple
/// must lie entirely to one side of both x and y. When the couple is adjacent
/// and to the left, n = min(x,y) - (z+1) and m = |y - x|, and the path visits
/// 5(m-1) + 4(n-1) + 2 configurations whatever the occupation in between.
MovePath exchange_path(const Configuration& eta, int x, int y, int z, const RateModel& model);

/// Same exchange for the perturbed dynamics with a pair (z, z+l), l ≥ 3: the
/// right particle is first walked to z+2 with simple-exclusion moves, the
/// porous-medium path is run, and the walk is undone.
MovePath perturbed_exchange_path(const Configuration& eta, int x, int y, int z, int l, const RateModel& model);

/// Configurations visited by the adjacent-couple construction above.
std::size_t exchange_path_length(int n, int m);

}  // namespace kclg
