#include "kclg/fluct.hpp"

#include <array>
#include <cmath>
#include <numbers>

namespace kclg {

FourierMode::FourierMode(std::vector<int> z) : z_(std::move(z)) {
  if (z_.empty() || static_cast<int>(z_.size()) > kMaxDim) throw PreconditionError("mode dimension out of range");
}

int FourierMode::sign() const {
  for (int v : z_) {
    if (v != 0) return v > 0 ? 1 : -1;
  }
  return 0;
}

double FourierMode::norm_squared() const {
  double s = 0.0;
  for (int v : z_) s += static_cast<double>(v) * v;
  return s;
}

double FourierMode::gamma() const { return 1.0 + 4.0 * std::numbers::pi * std::numbers::pi * norm_squared(); }

double FourierMode::operator()(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim()) throw PreconditionError("point dimension mismatch");
  const int s = sign();
  if (s == 0) return 1.0;
  double phase = 0.0;
  for (std::size_t a = 0; a < z_.size(); ++a) phase += z_[a] * u[a];
  phase *= 2.0 * std::numbers::pi;
  return std::numbers::sqrt2 * (s > 0 ? std::cos(phase) : std::sin(phase));
}

TestFn as_test_function(const FourierMode& h) {
  return [h](std::span<const double> u) { return h(u); };
}

namespace {

double node_value(const TestFn& h, const Geometry& g, std::size_t i) {
  std::array<double, kMaxDim> u{};
  const Site s = g.site(i);
  const int offset = g.is_torus() ? 0 : 1;
  for (int a = 0; a < g.dim(); ++a) u[static_cast<std::size_t>(a)] = static_cast<double>(s[a] - offset) / g.side();
  return h(std::span<const double>(u.data(), static_cast<std::size_t>(g.dim())));
}

}  // namespace

double field_value(const Configuration& eta, const TestFn& h, double rho) {
  const auto& g = eta.geometry();
  if (!g.is_torus()) throw PreconditionError("the fluctuation field is defined on the torus");
  double s = 0.0;
  for (std::size_t i = 0; i < g.volume(); ++i) s += node_value(h, g, i) * ((eta.at(i) ? 1.0 : 0.0) - rho);
  return s / std::pow(static_cast<double>(g.side()), 0.5 * g.dim());
}

double ou_covariance(const TestFn& h, const TestFn& g, double lag, double rho, int grid) {
  if (!(lag > 0.0)) throw PreconditionError("lag must be positive");
  if (!(rho >= 0.0 && rho <= 1.0)) throw PreconditionError("density must lie in [0, 1]");
  if (grid < 8) throw PreconditionError("quadrature grid too coarse");
  const double var = 4.0 * rho * lag;
  if (var == 0.0) {
    // Degenerate kernel (ρ = 0): χ(ρ) = 0 as well.
    return 0.0;
  }
  const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * var);
  std::vector<double> kernel(static_cast<std::size_t>(grid));
  for (int d = 0; d < grid; ++d) {
    double s = 0.0;
    for (int j = -6; j <= 6; ++j) {
      const double w = static_cast<double>(d) / grid + j;
      s += std::exp(-w * w / (2.0 * var));
    }
    kernel[static_cast<std::size_t>(d)] = norm * s;
  }
  std::vector<double> hv(static_cast<std::size_t>(grid));
  std::vector<double> gv(static_cast<std::size_t>(grid));
  for (int i = 0; i < grid; ++i) {
    const double u = static_cast<double>(i) / grid;
    hv[static_cast<std::size_t>(i)] = h(std::span<const double>(&u, 1));
    gv[static_cast<std::size_t>(i)] = g(std::span<const double>(&u, 1));
  }
  double total = 0.0;
  for (int i = 0; i < grid; ++i) {
    double inner = 0.0;
    for (int k = 0; k < grid; ++k) {
      inner += kernel[static_cast<std::size_t>(((i - k) % grid + grid) % grid)] * gv[static_cast<std::size_t>(k)];
    }
    total += hv[static_cast<std::size_t>(i)] * inner;
  }
  total /= static_cast<double>(grid) * grid;
  return rho * (1.0 - rho) * total;
}

double ou_covariance(const FourierMode& h, const FourierMode& g, double lag, double rho) {
  if (!(lag >= 0.0)) throw PreconditionError("lag must be non-negative");
  if (h.dim() != 1 || g.dim() != 1) throw PreconditionError("covariance prediction is d=1 only");
  if (h.frequency() != g.frequency()) return 0.0;
  const double k2 = 4.0 * std::numbers::pi * std::numbers::pi * h.norm_squared();
  return rho * (1.0 - rho) * std::exp(-2.0 * rho * lag * k2);
}

double static_variance(const TestFn& h, int dim, int side, double rho) {
  const Geometry g = Geometry::torus(dim, side);
  const std::size_t v = g.volume();
  std::vector<double> hv(v);
  for (std::size_t i = 0; i < v; ++i) hv[i] = node_value(h, g, i);
  // E[Y²] = N^{-d} Σ_{x,y} H_x H_y Cov(η(x), η(y)); off-diagonal covariances vanish.
  double s = 0.0;
  for (std::size_t x = 0; x < v; ++x) {
    for (std::size_t y = 0; y < v; ++y) {
      const double cov = x == y ? rho * (1.0 - rho) : 0.0;
      s += hv[x] * hv[y] * cov;
    }
  }
  return s / static_cast<double>(v);
}

double dirichlet_of_field(const TestFn& h, int side, double rho) {
  // Local expectation of c(0,1)(η(0)-η(1))² over the window (η(-1), η(0), η(1), η(2)).
  double local = 0.0;
  for (int w = 0; w < 16; ++w) {
    const int em1 = w & 1;
    const int e0 = (w >> 1) & 1;
    const int e1 = (w >> 2) & 1;
    const int e2 = (w >> 3) & 1;
    const int ones = em1 + e0 + e1 + e2;
    const double weight = std::pow(rho, ones) * std::pow(1.0 - rho, 4 - ones);
    local += weight * (em1 + e2) * (e0 - e1) * (e0 - e1);
  }
  double s = 0.0;
  for (int x = 0; x < side; ++x) {
    const double u0 = static_cast<double>(x) / side;
    const double u1 = static_cast<double>(x + 1) / side;
    const double dh = h(std::span<const double>(&u1, 1)) - h(std::span<const double>(&u0, 1));
    s += dh * dh;
  }
  return 0.5 * local * s / side;
}

CovarianceEstimate estimate_time_covariance(const std::vector<std::vector<std::pair<double, double>>>& series,
                                            double dt, double lag, std::size_t batches_per_replica) {
  if (!(dt > 0.0)) throw PreconditionError("time spacing must be positive");
  if (lag < 0.0) throw PreconditionError("lag must be non-negative");
  if (batches_per_replica == 0) throw PreconditionError("need at least one batch per replica");
  const double steps_real = lag / dt;
  const auto steps = static_cast<std::size_t>(std::llround(steps_real));
  if (std::abs(steps_real - static_cast<double>(steps)) > 1e-6) {
    throw PreconditionError("lag must be a multiple of the snapshot spacing");
  }
  std::vector<double> means;
  CovarianceEstimate out;
  for (const auto& s : series) {
    if (s.size() <= steps) continue;
    const std::size_t count = s.size() - steps;
    const std::size_t per = count / batches_per_replica;
    if (per == 0) continue;
    for (std::size_t b = 0; b < batches_per_replica; ++b) {
      double sum = 0.0;
      for (std::size_t i = b * per; i < (b + 1) * per; ++i) sum += s[i].first * s[i + steps].second;
      means.push_back(sum / static_cast<double>(per));
      out.pairs += per;
    }
  }
  out.batches = means.size();
  if (out.batches < 10) {
    throw PreconditionError("only " + std::to_string(out.batches) + " batches; at least 10 are needed");
  }
  double mean = 0.0;
  for (double m : means) mean += m;
  mean /= static_cast<double>(means.size());
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  out.estimate = mean;
  out.standard_error = std::sqrt(ss / static_cast<double>(means.size() - 1) / static_cast<double>(means.size()));
  return out;
}

CovarianceEstimate estimate_time_covariance(const std::vector<Trajectory>& runs, const TestFn& h, const TestFn& g,
                                            double lag, double rho, std::size_t batches_per_replica) {
  if (runs.empty()) throw PreconditionError("no runs");
  const auto& snaps = runs.front().snapshots;
  if (snaps.size() < 2) throw PreconditionError("runs need at least two snapshots");
  const double dt = snaps[1].time - snaps[0].time;
  std::vector<std::vector<std::pair<double, double>>> series;
  for (const auto& run : runs) {
    std::vector<std::pair<double, double>> s;
    for (std::size_t i = 0; i < run.snapshots.size(); ++i) {
      const auto& snap = run.snapshots[i];
      const double expected = snaps[0].time + static_cast<double>(i) * dt;
      if (std::abs(snap.time - expected) > 1e-9) throw PreconditionError("snapshots must be evenly spaced");
      s.emplace_back(field_value(snap.eta, h, rho), field_value(snap.eta, g, rho));
    }
    series.push_back(std::move(s));
  }
  return estimate_time_covariance(series, dt, lag, batches_per_replica);
}

}  // namespace kclg
