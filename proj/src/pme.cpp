#include "kclg/pme.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kclg/lattice.hpp"

namespace kclg {

namespace {

double power(double x, int m) { return m == 2 ? x * x : x * x * x; }

}  // namespace

PmeResult solve_pme(const DensityField& rho0, int m, double horizon, const PmeOptions& options) {
  if (m != 2 && m != 3) throw PreconditionError("porous-medium order must be 2 or 3");
  if (!(options.safety > 0.0 && options.safety < 1.0)) throw PreconditionError("safety must lie in (0, 1)");
  if (!(horizon >= 0.0) || !std::isfinite(horizon)) throw PreconditionError("horizon must be finite and >= 0");
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    if (!(rho0[i] >= 0.0 && rho0[i] <= 1.0)) throw PreconditionError("initial density leaves [0, 1]");
  }
  auto records = options.record_times;
  if (!std::is_sorted(records.begin(), records.end())) throw PreconditionError("record times must be sorted");
  if (!records.empty() && (records.front() < 0.0 || records.back() > horizon)) {
    throw PreconditionError("record times must lie in [0, horizon]");
  }

  const int d = rho0.dim();
  const int side = rho0.side();
  const double du = 1.0 / side;
  const Geometry grid = Geometry::torus(d, side);
  const std::size_t n = rho0.size();

  // Neighbour table: 2d entries per node.
  std::vector<std::size_t> nb(n * 2 * static_cast<std::size_t>(d));
  for (std::size_t i = 0; i < n; ++i) {
    for (int a = 0; a < d; ++a) {
      nb[i * 2 * d + 2 * a] = grid.shift_index(i, a, 1);
      nb[i * 2 * d + 2 * a + 1] = grid.shift_index(i, a, -1);
    }
  }

  PmeResult result{rho0, {}, 0};
  std::vector<double>& rho = result.final.mutable_values();
  std::vector<double> pw(n);
  std::vector<double> next(n);
  std::size_t rec = 0;
  double t = 0.0;
  auto flush = [&] {
    while (rec < records.size() && records[rec] <= t) {
      result.recorded.push_back(result.final);
      ++rec;
    }
  };
  flush();
  while (t < horizon) {
    double top = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      pw[i] = power(rho[i], m);
      top = std::max(top, rho[i]);
    }
    double dt = options.safety * du * du / (2.0 * d * m * std::max(std::pow(top, m - 1), options.floor));
    double stop = horizon;
    if (rec < records.size()) stop = std::min(stop, records[rec]);
    if (t + dt >= stop) dt = stop - t;
    const double lambda = dt / (du * du);
    for (std::size_t i = 0; i < n; ++i) {
      double lap = -2.0 * d * pw[i];
      for (int k = 0; k < 2 * d; ++k) lap += pw[nb[i * 2 * d + static_cast<std::size_t>(k)]];
      next[i] = rho[i] + lambda * lap;
      if (!std::isfinite(next[i]) || next[i] < -1e-12 || next[i] > 1.0 + 1e-12) {
        std::ostringstream msg;
        msg << "porous-medium step " << result.steps << " at t=" << t << " left [0,1] at node " << i
            << " (value " << next[i] << ", dt " << dt << ")";
        throw std::runtime_error(msg.str());
      }
    }
    rho.swap(next);
    t = (t + dt >= stop) ? stop : t + dt;
    ++result.steps;
    flush();
  }
  return result;
}

DensityField solve_pme(const DensityField& rho0, int m, double horizon, double safety) {
  PmeOptions opt;
  opt.safety = safety;
  return solve_pme(rho0, m, horizon, opt).final;
}

TestFunction TestFunction::spatial_cosine(int frequency) {
  const double k = 2.0 * std::numbers::pi * frequency;
  return TestFunction{[k](double, double u) { return std::cos(k * u); }, [](double, double) { return 0.0; },
                      [k](double, double u) { return -k * k * std::cos(k * u); }};
}

TestFunction TestFunction::constant(double c) {
  return TestFunction{[c](double, double) { return c; }, [](double, double) { return 0.0; },
                      [](double, double) { return 0.0; }};
}

double weak_residual(const std::vector<DensityField>& fields, const std::vector<double>& times,
                     const TestFunction& h, int m) {
  if (fields.size() != times.size() || fields.size() < 2) throw PreconditionError("need matching snapshots and times");
  const int side = fields.front().side();
  for (const auto& f : fields) {
    if (f.dim() != 1 || f.side() != side) throw PreconditionError("weak residual expects d=1 fields on one grid");
  }
  const double du = 1.0 / side;
  auto bulk = [&](std::size_t k) {
    double s = 0.0;
    for (int i = 0; i < side; ++i) {
      const double u = i * du;
      const double r = fields[k][static_cast<std::size_t>(i)];
      s += r * h.dt(times[k], u) + power(r, m) * h.laplacian(times[k], u);
    }
    return s * du;
  };
  auto pairing = [&](std::size_t k) {
    double s = 0.0;
    for (int i = 0; i < side; ++i) s += fields[k][static_cast<std::size_t>(i)] * h.value(times[k], i * du);
    return s * du;
  };
  double integral = 0.0;
  double prev = bulk(0);
  for (std::size_t k = 1; k < fields.size(); ++k) {
    const double cur = bulk(k);
    integral += 0.5 * (times[k] - times[k - 1]) * (prev + cur);
    prev = cur;
  }
  return std::abs(integral + pairing(0) - pairing(fields.size() - 1));
}

}  // namespace kclg
