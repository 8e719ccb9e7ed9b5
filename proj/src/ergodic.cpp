#include "kclg/ergodic.hpp"

#include <numeric>

namespace kclg {

bool is_blocked(const Configuration& eta, const RateModel& model) {
  const auto& g = eta.geometry();
  model.validate_for(g);
  const BondSystem bonds(g, model.reach());
  const RateTable table(model, g);
  for (std::size_t b = 0; b < bonds.bond_count(); ++b) {
    if (table[bonds.pack(b, eta)] > 0.0) return false;
  }
  return true;
}

bool has_mobile_cluster(const Configuration& eta) {
  const auto& g = eta.geometry();
  const std::size_t v = g.volume();
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < v; ++i) {
      if (!eta.at(i)) continue;
      for (int l = 1; l <= 2; ++l) {
        const std::size_t j = g.shift_index(i, 0, l);
        if (j != v && j != i && eta.at(j)) return true;
      }
    }
    return false;
  }
  const std::size_t corners = std::size_t{1} << g.dim();
  for (std::size_t i = 0; i < v; ++i) {
    bool filled = true;
    for (std::size_t c = 0; c < corners && filled; ++c) {
      std::size_t s = i;
      for (int a = 0; a < g.dim(); ++a) {
        if ((c >> a) & 1u) s = g.shift_index(s, a, 1);
      }
      filled = s != v && eta.at(s);
    }
    if (filled) return true;
  }
  return false;
}

std::string_view class_name(ComponentClass c) {
  switch (c) {
    case ComponentClass::mobile:
      return "mobile";
    case ComponentClass::blocked_singleton:
      return "blocked-singleton";
    case ComponentClass::full:
      return "full";
    case ComponentClass::other:
      return "other";
  }
  return "?";
}

std::size_t ComponentReport::count(ComponentClass c) const {
  std::size_t n = 0;
  for (const auto& comp : components) n += comp.cls == c ? 1 : 0;
  return n;
}

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    // Keep the smaller rank as root so roots are first members.
    if (a < b) {
      parent_[b] = a;
    } else {
      parent_[a] = b;
    }
  }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace

ComponentLabels label_components(const Hyperplane& h, const RateModel& model) {
  const Geometry& g = h.geometry();
  model.validate_for(g);
  const BondSystem bonds(g, model.reach());
  const RateTable table(model, g);
  DisjointSets sets(h.size());
  std::vector<std::uint8_t> occ(g.volume() + 1);
  h.for_each([&](std::size_t r, std::uint64_t key) {
    h.fill(key, occ.data());
    for (std::size_t b = 0; b < bonds.bond_count(); ++b) {
      if (table[bonds.pack(b, occ.data())] <= 0.0) continue;
      const std::size_t other = h.rank(h.swap_key(key, bonds.left(b), bonds.right(b)));
      sets.unite(static_cast<std::uint32_t>(r), static_cast<std::uint32_t>(other));
    }
  });
  ComponentLabels out;
  out.label.resize(h.size());
  std::vector<std::uint32_t> root_label(h.size(), UINT32_MAX);
  for (std::size_t r = 0; r < h.size(); ++r) {
    const std::uint32_t root = sets.find(static_cast<std::uint32_t>(r));
    if (root_label[root] == UINT32_MAX) root_label[root] = static_cast<std::uint32_t>(out.count++);
    out.label[r] = root_label[root];
  }
  return out;
}

ComponentReport components(const Geometry& g, int k, const RateModel& model, std::size_t budget) {
  const Hyperplane h(g, k, budget);
  const auto labels = label_components(h, model);
  ComponentReport report{g, k, model, h.size(), {}};
  report.components.resize(labels.count, Component{0, Configuration(g), ComponentClass::other});
  std::vector<bool> seen(labels.count, false);
  std::vector<bool> mobile(labels.count, false);
  h.for_each([&](std::size_t r, std::uint64_t key) {
    const auto c = labels.label[r];
    auto& comp = report.components[c];
    ++comp.size;
    Configuration eta = h.from_key(key);
    if (!seen[c]) {
      seen[c] = true;
      comp.representative = eta;
    }
    if (!mobile[c] && has_mobile_cluster(eta)) mobile[c] = true;
  });
  for (std::size_t c = 0; c < labels.count; ++c) {
    auto& comp = report.components[c];
    if (k == static_cast<int>(g.volume())) {
      comp.cls = ComponentClass::full;
    } else if (mobile[c]) {
      comp.cls = ComponentClass::mobile;
    } else if (comp.size == 1 && is_blocked(comp.representative, model)) {
      comp.cls = ComponentClass::blocked_singleton;
    } else {
      comp.cls = ComponentClass::other;
    }
  }
  return report;
}

bool CoupleBounds::bound_holds(int j) const {
  if (j < 1 || j >= static_cast<int>(pairs.size())) throw PreconditionError("distance not computed");
  const long rhs = static_cast<long>(j + 1) * particles - sites - j;
  return 2 * pairs[static_cast<std::size_t>(j)] >= near[static_cast<std::size_t>(j)] &&
         static_cast<long>(j) * near[static_cast<std::size_t>(j)] >= rhs;
}

CoupleBounds couple_bounds(const Configuration& eta, int max_distance) {
  const auto& g = eta.geometry();
  if (g.is_torus() || g.dim() != 1) throw PreconditionError("couple bounds are stated on the d=1 box");
  if (max_distance < 1) throw PreconditionError("distance must be positive");
  const int n = g.side();
  CoupleBounds out;
  out.sites = n;
  out.particles = static_cast<int>(eta.count());
  out.pairs.assign(static_cast<std::size_t>(max_distance) + 1, 0);
  out.near.assign(static_cast<std::size_t>(max_distance) + 1, 0);
  auto occ = [&](int x) { return x >= 1 && x <= n && eta.at(static_cast<std::size_t>(x - 1)); };
  for (int j = 1; j <= max_distance; ++j) {
    long pairs = 0;
    long near = 0;
    for (int z = 1; z <= n; ++z) {
      if (!occ(z)) continue;
      bool close = false;
      for (int l = 1; l <= j; ++l) {
        if (occ(z + l)) {
          ++pairs;
          close = true;
        }
        if (occ(z - l)) close = true;
      }
      near += close ? 1 : 0;
    }
    out.pairs[static_cast<std::size_t>(j)] = pairs;
    out.near[static_cast<std::size_t>(j)] = near;
  }
  return out;
}

}  // namespace kclg
