#include "kclg/paths.hpp"

#include <algorithm>
#include <cstdlib>

namespace kclg {

namespace {

void require_line(const Configuration& eta) {
  if (eta.geometry().dim() != 1) throw PreconditionError("paths are built in d=1 only");
}

int wrap(const Geometry& g, int s) {
  if (!g.is_torus()) return s;
  const int n = g.side();
  return ((s % n) + n) % n;
}

bool occupied(const Configuration& eta, int s) { return eta(Site{wrap(eta.geometry(), s)}) == 1; }

// Applies bond (s, s+1) to `cur`, appending the step to `path`.
void apply(const Configuration& ref, Configuration& cur, int s, const RateModel& model,
           MovePath& path) {
  const auto& g = ref.geometry();
  const Site left{wrap(g, s)};
  const Site right = g.shift(left, 0, 1);
  if (!g.contains(left) || !g.contains(right)) {
    throw PreconditionError("path leaves the box at bond " + std::to_string(s));
  }
  const double c = kinetic_constraint(model, cur, left, 0);
  cur.swap_in_place(g.index(left), g.index(right));
  path.steps.push_back({left[0], c});
}

// Maps construction coordinates to lattice sites: the construction always
// has the couple on the left.
struct Frame {
  int origin = 0;
  bool reflect = false;
  int site(int c) const { return reflect ? origin - c : origin + c; }
  int bond(int c) const { return reflect ? origin - (c + 1) : origin + c; }
};

// Bond left ends (construction coordinates) of the porous-medium exchange of
// a and b (a < b) with the couple at (p, p+w), p+w < a. `at` reads the
// occupation of a construction coordinate in the current configuration; the
// bonds are emitted one at a time through `step`, which applies them.
template <class At, class Step>
void exchange_bonds(int p, int w, int a, int b, At at, Step step) {
  const bool closed = w == 2;
  if (closed) {
    step(p);  // (1,0,1) -> (0,1,1)
    ++p;
  }
  const int n = a - (p + 1);
  for (int i = 0; i + 1 < n; ++i) {
    step(p + i + 1);
    step(p + i);
  }
  // Three particles at (a-2, a-1, a) move right one site at a time.
  for (int q = a; q <= b - 2; ++q) {
    step(q);
    step(q - 1);
    step(q - 2);
  }
  step(b - 1);
  // The block (1,1,0) at (q, q+1, q+2) moves left over the site q-1.
  for (int q = b - 3; q >= a - 1; --q) {
    const bool occupied_before = at(q - 1);
    step(q - 1);
    step(occupied_before ? q + 1 : q);
  }
  for (int i = n - 2; i >= 0; --i) {
    step(p + i);
    step(p + i + 1);
  }
  if (closed) step(p - 1);
}

}  // namespace

std::size_t exchange_path_length(int n, int m) {
  if (n < 1 || m < 1) throw PreconditionError("n and m must be positive");
  return static_cast<std::size_t>(5 * (m - 1) + 4 * (n - 1) + 2);
}

std::string check_path(const MovePath& path, const RateModel& model) {
  const auto& g = path.start.geometry();
  if (g.dim() != 1) return "path is not one-dimensional";
  Configuration cur = path.start;
  for (std::size_t i = 0; i < path.steps.size(); ++i) {
    const Site left{path.steps[i].site};
    const Site right = g.shift(left, 0, 1);
    if (!g.contains(left) || !g.contains(right)) return "step " + std::to_string(i) + " is not an interior bond";
    const double c = kinetic_constraint(model, cur, left, 0);
    if (!(c > 0.0)) return "step " + std::to_string(i) + " at bond " + std::to_string(left[0]) + " has zero rate";
    if (c != path.steps[i].rate) return "step " + std::to_string(i) + " carries a wrong rate annotation";
    cur = cur(left) == cur(right) ? cur : swap(cur, left, right);
  }
  if (!(cur == path.end)) return "path ends at " + cur.to_string() + ", expected " + path.end.to_string();
  return {};
}

MovePath cluster_shift_path(const Configuration& eta, int x, Direction dir, const RateModel& model) {
  require_line(eta);
  if (model.family == Family::ssep || model.m != 2) throw PreconditionError("cluster shifts are built for m=2");
  if (!occupied(eta, x)) throw PreconditionError("no particle at the cluster position");
  const int w = occupied(eta, x + 1) ? 1 : (occupied(eta, x + 2) ? 2 : 0);
  if (w == 0) throw PreconditionError("no cluster at " + std::to_string(x));
  const auto& g = eta.geometry();

  // Right shift of (x, x+1): bonds x+1 then x. Right shift of (x, x+2): x then x+2.
  std::vector<int> right = w == 1 ? std::vector<int>{1, 0} : std::vector<int>{0, 2};
  Frame f;
  if (dir == Direction::right) {
    f.origin = x;
  } else {
    f.origin = x + w;
    f.reflect = true;
  }
  MovePath path{eta, eta, {}};
  Configuration cur = eta;
  for (int c : right) apply(eta, cur, f.bond(c), model, path);
  // The end state by definition of the shift, not by replay.
  Configuration end = eta;
  auto put = [&](int s, bool v) { end.set(g.index(Site{wrap(g, s)}), v); };
  auto get = [&](int s) { return occupied(eta, s); };
  const int sgn = dir == Direction::right ? 1 : -1;
  const int lead = dir == Direction::right ? x : x + w;  // particle that is left behind
  if (w == 1) {
    put(lead, get(lead + 2 * sgn));
    put(lead + sgn, true);
    put(lead + 2 * sgn, true);
  } else {
    put(lead, get(lead + sgn));
    put(lead + sgn, true);
    put(lead + 2 * sgn, get(lead + 3 * sgn));
    put(lead + 3 * sgn, true);
  }
  path.end = end;
  return path;
}

MovePath exchange_path(const Configuration& eta, int x, int y, int z, const RateModel& model) {
  require_line(eta);
  const auto& g = eta.geometry();
  if (x == y) throw PreconditionError("exchange needs two distinct sites");
  if (occupied(eta, x) == occupied(eta, y)) throw PreconditionError("exchange needs one particle and one vacancy");
  if (!occupied(eta, z)) throw PreconditionError("no couple at " + std::to_string(z));
  const int w = occupied(eta, z + 1) ? 1 : (occupied(eta, z + 2) ? 2 : 0);
  if (w == 0) throw PreconditionError("no couple at " + std::to_string(z));

  Frame f;
  int a = 0;
  int b = 0;
  if (g.is_torus()) {
    const int n = g.side();
    f.origin = z;
    const int ox = wrap(g, x - z);
    const int oy = wrap(g, y - z);
    if (std::min(ox, oy) <= w) throw PreconditionError("couple overlaps the exchanged sites");
    a = std::min(ox, oy);
    b = std::max(ox, oy);
    if (b >= n) throw PreconditionError("exchanged sites out of range");
  } else if (z + w < std::min(x, y)) {
    a = std::min(x, y);
    b = std::max(x, y);
  } else if (z > std::max(x, y)) {
    f.origin = g.side() + 1;
    f.reflect = true;
    a = f.origin - std::max(x, y);
    b = f.origin - std::min(x, y);
    z = f.origin - (z + w);
  } else {
    throw PreconditionError("couple must lie to one side of both exchanged sites");
  }
  const int p = g.is_torus() ? 0 : z;

  MovePath path{eta, swap(eta, Site{wrap(g, x)}, Site{wrap(g, y)}), {}};
  Configuration cur = eta;
  // The bonds are worked out from whichever end has the particle at a; with
  // a vacancy at a the path from the exchanged configuration is run backwards.
  const bool forward = occupied(eta, f.site(a));
  Configuration scratch = forward ? eta : path.end;
  std::vector<int> bonds;
  exchange_bonds(
      p, w, a, b, [&](int c) { return occupied(scratch, f.site(c)); },
      [&](int c) {
        const Site left{wrap(g, f.bond(c))};
        const Site right = g.shift(left, 0, 1);
        if (!g.contains(left) || !g.contains(right)) {
          throw PreconditionError("path leaves the box at bond " + std::to_string(left[0]));
        }
        scratch.swap_in_place(g.index(left), g.index(right));
        bonds.push_back(c);
      });
  if (!forward) std::reverse(bonds.begin(), bonds.end());
  for (int c : bonds) apply(eta, cur, f.bond(c), model, path);
  return path;
}

MovePath perturbed_exchange_path(const Configuration& eta, int x, int y, int z, int l, const RateModel& model) {
  require_line(eta);
  if (l <= 2) return exchange_path(eta, x, y, z, model);
  if (!occupied(eta, z) || !occupied(eta, z + l)) throw PreconditionError("no pair at (z, z+l)");
  const auto& g = eta.geometry();
  auto inside = [&](int s) {
    const int o = g.is_torus() ? wrap(g, s - z) : s - z;
    return o >= 0 && o <= l;
  };
  if (inside(x) || inside(y)) throw PreconditionError("pair overlaps the exchanged sites");

  MovePath path{eta, swap(eta, Site{wrap(g, x)}, Site{wrap(g, y)}), {}};
  Configuration cur = eta;
  // Walk the particle at z+l down to z+2.
  std::vector<int> walk;
  for (int s = z + l - 1; s >= z + 2; --s) walk.push_back(s);
  for (int s : walk) apply(eta, cur, s, model, path);
  const MovePath middle = exchange_path(cur, x, y, z, model);
  for (const auto& step : middle.steps) apply(eta, cur, step.site, model, path);
  for (auto it = walk.rbegin(); it != walk.rend(); ++it) apply(eta, cur, *it, model, path);
  return path;
}

}  // namespace kclg
