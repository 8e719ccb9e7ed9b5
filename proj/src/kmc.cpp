#include "kclg/kmc.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>

namespace kclg {

InitialProfile InitialProfile::constant(double rho) {
  return InitialProfile{[rho](std::span<const double>) { return rho; }, std::nullopt};
}

InitialProfile InitialProfile::cosine(double mean, double amplitude) {
  return InitialProfile{
      [mean, amplitude](std::span<const double> u) {
        return mean + amplitude * std::cos(2.0 * std::numbers::pi * u[0]);
      },
      std::min(mean - std::abs(amplitude), 1.0 - mean - std::abs(amplitude))};
}

Configuration sample_initial(const InitialProfile& profile, const Geometry& g, Philox& rng) {
  Configuration eta(g);
  std::array<double, kMaxDim> u{};
  const int offset = g.is_torus() ? 0 : 1;
  for (std::size_t i = 0; i < g.volume(); ++i) {
    const Site s = g.site(i);
    for (int a = 0; a < g.dim(); ++a) {
      u[static_cast<std::size_t>(a)] = static_cast<double>(s[a] - offset) / g.side();
    }
    const double p = profile.rho0(std::span<const double>(u.data(), static_cast<std::size_t>(g.dim())));
    if (!(p >= 0.0 && p <= 1.0)) {
      throw PreconditionError("initial profile leaves [0, 1] at site " + to_string(s));
    }
    if (profile.delta0 && (p < *profile.delta0 || p > 1.0 - *profile.delta0)) {
      throw PreconditionError("initial profile violates its declared bounds at site " + to_string(s));
    }
    if (rng.bernoulli(p)) eta.set(i, true);
  }
  return eta;
}

const Configuration& Trajectory::at(double t) const {
  for (const auto& s : snapshots) {
    if (s.time == t) return s.eta;
  }
  throw PreconditionError("time " + std::to_string(t) + " was not recorded");
}

namespace {

// Complete binary sum tree over the bond rates; leaves start at `base`.
class SumTree {
 public:
  explicit SumTree(std::size_t leaves) : base_(std::bit_ceil(std::max<std::size_t>(leaves, 1))), node_(2 * base_, 0.0) {}

  void set_leaf(std::size_t i, double v) { node_[base_ + i] = v; }
  void rebuild() {
    for (std::size_t i = base_ - 1; i >= 1; --i) node_[i] = node_[2 * i] + node_[2 * i + 1];
  }
  void update(std::size_t i, double v) {
    std::size_t n = base_ + i;
    node_[n] = v;
    for (n >>= 1; n >= 1; n >>= 1) node_[n] = node_[2 * n] + node_[2 * n + 1];
  }
  double total() const { return node_[1]; }
  /// Leaf whose cumulative interval contains `target` in [0, total).
  std::size_t find(double target) const {
    std::size_t n = 1;
    while (n < base_) {
      const double left = node_[2 * n];
      if (target < left || node_[2 * n + 1] == 0.0) {
        n = 2 * n;
      } else {
        target -= left;
        n = 2 * n + 1;
      }
    }
    return n - base_;
  }

 private:
  std::size_t base_;
  std::vector<double> node_;
};

}  // namespace

std::vector<double> uniform_times(double horizon, std::size_t intervals) {
  if (intervals == 0) throw PreconditionError("need at least one interval");
  std::vector<double> t(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i) t[i] = horizon * static_cast<double>(i) / static_cast<double>(intervals);
  return t;
}

Trajectory simulate(const Configuration& initial, const SimConfig& cfg) {
  const Geometry& g = cfg.geometry;
  if (!(initial.geometry() == g)) throw PreconditionError("initial configuration has a different geometry");
  cfg.model.validate_for(g);
  if (!(cfg.horizon > 0.0) || !std::isfinite(cfg.horizon)) throw PreconditionError("horizon must be positive and finite");
  for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
    const double t = cfg.snapshot_times[i];
    if (t < 0.0 || t > cfg.horizon) throw PreconditionError("snapshot time outside [0, horizon]");
    if (i > 0 && !(t > cfg.snapshot_times[i - 1])) throw PreconditionError("snapshot times must increase");
  }

  const BondSystem bonds(g, cfg.model.reach());
  const RateTable table(cfg.model, g);
  const std::size_t v = g.volume();
  std::vector<std::uint8_t> occ(v + 1, 0);  // trailing sentinel reads empty
  for (std::size_t i = 0; i < v; ++i) occ[i] = initial.at(i) ? 1 : 0;

  SumTree tree(bonds.bond_count());
  for (std::size_t b = 0; b < bonds.bond_count(); ++b) tree.set_leaf(b, table[bonds.pack(b, occ.data())]);
  tree.rebuild();

  Trajectory traj{g, cfg.model, cfg.seed, cfg.replica, {}, 0, false};
  traj.snapshots.reserve(cfg.snapshot_times.size());
  auto record = [&](double t) {
    Configuration eta(g);
    for (std::size_t i = 0; i < v; ++i) {
      if (occ[i]) eta.set(i, true);
    }
    traj.snapshots.push_back({t, std::move(eta)});
  };

  Philox rng = Philox::for_replica(cfg.seed, cfg.replica, purpose::dynamics);
  const double speed = static_cast<double>(g.side()) * g.side();
  std::size_t next = 0;
  double t = 0.0;
  while (true) {
    const double total = tree.total();
    if (total <= 0.0) {
      traj.froze = true;
      break;
    }
    const double t_new = t + rng.exponential() / (speed * total);
    while (next < cfg.snapshot_times.size() && cfg.snapshot_times[next] < t_new) record(cfg.snapshot_times[next++]);
    if (t_new > cfg.horizon) break;
    t = t_new;

    const std::size_t b = std::min(tree.find(rng.uniform() * total), bonds.bond_count() - 1);
    const std::size_t x = bonds.left(b);
    const std::size_t y = bonds.right(b);
    std::swap(occ[x], occ[y]);
    ++traj.events;
    for (std::size_t site : {x, y}) {
      for (std::uint32_t nb : bonds.touching(site)) tree.update(nb, table[bonds.pack(nb, occ.data())]);
    }
  }
  while (next < cfg.snapshot_times.size()) record(cfg.snapshot_times[next++]);
  return traj;
}

DensityField empirical_profile(const Configuration& eta, int radius) {
  const auto& g = eta.geometry();
  if (!g.is_torus()) throw PreconditionError("empirical profiles are taken on the torus");
  std::vector<double> occ(g.volume());
  for (std::size_t i = 0; i < occ.size(); ++i) occ[i] = eta.at(i) ? 1.0 : 0.0;
  auto sums = periodic_box_sum(occ, g.dim(), g.side(), radius);
  const double cells = std::pow(2.0 * radius + 1.0, g.dim());
  for (auto& s : sums) s /= cells;
  return DensityField(g.dim(), g.side(), std::move(sums));
}

DensityField empirical_profile(const Trajectory& traj, double t, int radius) {
  return empirical_profile(traj.at(t), radius);
}

double replacement_diagnostic(const Configuration& eta, int radius, LocalName psi) {
  const auto& g = eta.geometry();
  if (!g.is_torus()) throw PreconditionError("the replacement diagnostic is taken on the torus");
  std::vector<double> local(g.volume());
  std::vector<double> occ(g.volume());
  for (std::size_t i = 0; i < local.size(); ++i) {
    const Site s = g.site(i);
    local[i] = psi == LocalName::h ? local_h(eta, s, 0) : local_g(eta, s, 0);
    occ[i] = eta.at(i) ? 1.0 : 0.0;
  }
  const double cells = std::pow(2.0 * radius + 1.0, g.dim());
  const auto psi_sum = periodic_box_sum(local, g.dim(), g.side(), radius);
  const auto occ_sum = periodic_box_sum(occ, g.dim(), g.side(), radius);
  double total = 0.0;
  for (std::size_t i = 0; i < local.size(); ++i) {
    total += std::abs(psi_sum[i] / cells - expected_local(psi, occ_sum[i] / cells, 2));
  }
  return total / static_cast<double>(g.volume());
}

double replacement_diagnostic(const Trajectory& traj, double t, int radius, LocalName psi) {
  return replacement_diagnostic(traj.at(t), radius, psi);
}

}  // namespace kclg
