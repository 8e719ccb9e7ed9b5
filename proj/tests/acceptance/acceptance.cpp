// One PASS/FAIL line per acceptance criterion. Usage: acceptance [AC-n ...]
// (no argument runs all of them). Exit status 1 if any selected check fails.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <numbers>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "kclg/ergodic.hpp"
#include "kclg/experiment.hpp"
#include "kclg/fluct.hpp"
#include "kclg/hyperplane.hpp"
#include "kclg/parallel.hpp"
#include "kclg/paths.hpp"
#include "kclg/pme.hpp"
#include "kclg/rates.hpp"
#include "kclg/rng.hpp"
#include "kclg/spectral.hpp"

using namespace kclg;

namespace {

// Tolerances.
constexpr double kHydroL1 = 0.03;
constexpr double kMassDriftPerTime = 1e-12;
constexpr double kRefineLow = 3.0;
constexpr double kRefineHigh = 5.0;
constexpr double kSupportFloor = 1e-8;
constexpr double kLongRangeGap = 1.0 - 1e-10;
constexpr double kGapBandWidth = 4.0;
constexpr double kPerturbedFloor = 0.5;
constexpr double kZScore = 4.0;
constexpr std::size_t kMinBatches = 20;
constexpr int kPathTrials = 1000;

struct Verdict {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [violated: " << what << "]";
    }
  }
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---------------------------------------------------------------------------

void ac1(Verdict& v) {
  HydroParams p;
  p.models = {"pm2", "pm2+ssep"};
  p.theta = 1.0;
  const auto rows = run_hydro(p, default_jobs());
  std::map<std::string, std::vector<const HydroRow*>> by_model;
  // Perturbed model names carry N; group by the part before it.
  for (const auto& r : rows) by_model[r.model.substr(0, r.model.find('('))].push_back(&r);
  for (const auto& [model, list] : by_model) {
    v.detail << ' ' << model << ':';
    for (const auto* r : list) v.detail << " N=" << r->side << " L1=" << fmt(r->l1);
  }
  const auto& pure = by_model.at("pm2");
  for (std::size_t i = 1; i < pure.size(); ++i) {
    v.require(pure[i]->l1 < pure[i - 1]->l1, "pm2 L1 decreasing in N");
  }
  v.require(pure.back()->side == 512 && pure.back()->l1 < kHydroL1, "pm2 L1 at N=512 below 0.03");
  for (const auto& [model, list] : by_model) {
    if (model == "pm2") continue;
    v.require(list.back()->side == 512 && list.back()->l1 < kHydroL1, model + " L1 at N=512 below 0.03");
  }
}

// Window bit t is site t-1, so the window covers -1 .. 2.
Configuration window_on_torus(unsigned bits) {
  Configuration eta(Geometry::torus(1, 8));
  for (int t = 0; t < 4; ++t) eta.set(static_cast<std::size_t>((t - 1 + 8) % 8), ((bits >> t) & 1u) != 0);
  return eta;
}

void ac2(Verdict& v) {
  const auto pm2 = RateModel::porous_medium(2);
  int agree = 0;
  for (unsigned w = 0; w < 16; ++w) {
    const auto eta = window_on_torus(w);
    const auto current_value = static_cast<long>(std::lround(current(pm2, eta, Site{0}, 0)));
    const long increment = local_h(eta, Site{0}, 0) - local_h(eta, Site{1}, 0);
    agree += current_value == increment ? 1 : 0;
  }
  v.detail << " m=2: " << agree << "/16 windows";
  v.require(agree == 16, "W = h - τh on every m=2 window");

  const auto dec = find_gradient_decomposition(RateModel::porous_medium(3));
  v.require(dec.has_value(), "m=3 decomposition exists");
  if (dec) {
    const Rational residual = dec->max_residual(RateModel::porous_medium(3));
    const auto windows = static_cast<std::size_t>(1) << (2 * RateModel::porous_medium(3).reach());
    v.detail << "; m=3: " << windows << " windows, max residual " << residual.numerator() << '/'
             << residual.denominator();
    v.require(windows == 64, "m=3 current has 64 windows");
    v.require(residual == Rational(0), "m=3 residual zero");
  }
}

void ac3(Verdict& v) {
  int built = 0;
  for (int n = 1; n <= 6; ++n) {
    const Geometry g = Geometry::torus(1, n);
    std::vector<GeneratorKind> kinds{GeneratorKind::long_range_exclusion()};
    for (const auto& m : {RateModel::porous_medium(2), RateModel::porous_medium(3), RateModel::ssep(),
                          RateModel::perturbed(2, 1.0, n), RateModel::perturbed(3, 0.5, n)}) {
      if (n >= m.min_side()) kinds.push_back(GeneratorKind::local(m));
    }
    for (const auto& kind : kinds) {
      for (int k = 0; k <= n; ++k) {
        const auto gen = build_generator(g, k, kind);
        ++built;
        v.require(is_symmetric(gen), kind.name() + " N=" + std::to_string(n) + " k=" + std::to_string(k) + " symmetric");
        v.require(max_row_sum(gen) == 0.0 || max_row_sum(gen) < 1e-12, "row sums zero");
        // with L symmetric, column sums equal row sums
        const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(gen.size()));
        const Eigen::VectorXd col = gen.matrix.transpose() * ones;
        v.require(col.size() == 0 || col.cwiseAbs().maxCoeff() < 1e-12, "uniform measure stationary");
      }
    }
  }
  v.detail << ' ' << built << " generators";
}

// Components of the m=2 torus dynamics by breadth-first search on bit masks.
std::size_t bfs_component_count(int n, int k) {
  const std::uint32_t full = (1u << n) - 1u;
  auto bit = [&](std::uint32_t s, int i) { return (s >> (((i % n) + n) % n)) & 1u; };
  std::vector<int> seen(full + 1, 0);
  std::size_t count = 0;
  for (std::uint32_t s = 0; s <= full; ++s) {
    if (std::popcount(s) != k || seen[s]) continue;
    ++count;
    std::vector<std::uint32_t> stack{s};
    seen[s] = 1;
    while (!stack.empty()) {
      const auto c = stack.back();
      stack.pop_back();
      for (int x = 0; x < n; ++x) {
        if (bit(c, x) == bit(c, x + 1)) continue;
        if (bit(c, x - 1) + bit(c, x + 2) == 0) continue;
        const std::uint32_t t = c ^ (1u << x) ^ (1u << ((x + 1) % n));
        if (!seen[t]) {
          seen[t] = 1;
          stack.push_back(t);
        }
      }
    }
  }
  return count;
}

void ac4(Verdict& v) {
  const auto pm2 = RateModel::porous_medium(2);
  int cases = 0;
  for (int n = pm2.min_side(); n <= 12; ++n) {
    for (int k = 0; k <= n; ++k) {
      const auto rep = components(Geometry::torus(1, n), k, pm2);
      const std::string at = " N=" + std::to_string(n) + " k=" + std::to_string(k);
      ++cases;
      v.require(rep.components.size() == bfs_component_count(n, k), "count matches BFS" + at);
      if (3 * k > n) {
        v.require(rep.components.size() == 1, "irreducible" + at);
      } else {
        v.require(rep.count(ComponentClass::mobile) <= 1, "at most one mobile component" + at);
        v.require(rep.count(ComponentClass::other) == 0, "only mobile and blocked" + at);
      }
    }
  }
  const auto r93 = components(Geometry::torus(1, 9), 3, pm2);
  v.detail << ' ' << cases << " hyperplanes; N=9 k=3: " << r93.count(ComponentClass::blocked_singleton)
           << " blocked singletons, " << r93.components.size() << " components";
  v.require(r93.count(ComponentClass::blocked_singleton) == 3, "N=9 k=3 has 3 blocked singletons");
}

void ac5(Verdict& v) {
  double smallest = 2.0;
  for (int n = 2; n <= 8; ++n) {
    for (int k = 1; k <= n - 1; ++k) {
      const auto gen = build_generator(Geometry::torus(1, n), k, GeneratorKind::long_range_exclusion());
      smallest = std::min(smallest, spectral_gap(gen).gap);
    }
  }
  v.detail << " smallest long-range gap " << std::setprecision(15) << smallest;
  v.require(smallest >= kLongRangeGap, "gap >= 1 - 1e-10");
}

void ac6(Verdict& v) {
  const auto pm2 = GeneratorKind::local(RateModel::porous_medium(2));
  double c = 0.0;
  for (int n : {6, 8, 10, 12, 14}) {
    const int k = (n + 1) / 2;
    const double rho = static_cast<double>(k) / n;
    const double gap = spectral_gap(build_generator(Geometry::box(n), k, pm2)).gap;
    const double q = gap * n * n * rho / (rho - 1.0 / 3.0);
    if (n == 6) c = q;
    v.detail << " N=" << n << ':' << fmt(q);
    v.require(c > 0.0 && q >= c * (1.0 - 1e-12) && q <= kGapBandWidth * c, "N=" + std::to_string(n) + " in [c, 4c]");
  }
  v.detail << " band [" << fmt(c) << ", " << fmt(kGapBandWidth * c) << ']';
}

void ac7(Verdict& v) {
  double first = 0.0;
  for (int n : {8, 10, 12, 14}) {
    const int k = n / 4;
    const double rho = static_cast<double>(k) / n;
    const auto kind = GeneratorKind::local(RateModel::perturbed(2, 1.0, n));
    const double gap = spectral_gap(build_generator(Geometry::box(n), k, kind)).gap;
    const double q = gap * n * n / (rho * rho);
    if (n == 8) first = q;
    v.detail << " N=" << n << ':' << fmt(q);
    v.require(q >= kPerturbedFloor * first, "N=" + std::to_string(n) + " above half the N=8 value");
  }
}

void ac8(Verdict& v) {
  long checked = 0;
  for (int n = 1; n <= 18; ++n) {
    const Geometry g = Geometry::box(n);
    const int reach = std::max(n - 1, 2);
    Configuration eta(g);
    for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
      for (int i = 0; i < n; ++i) eta.set(static_cast<std::size_t>(i), ((bits >> i) & 1u) != 0);
      const auto cb = couple_bounds(eta, reach);
      ++checked;
      if (3 * std::popcount(bits) > n && !cb.large_density_bound_holds()) {
        v.require(false, "j=2 bound at " + eta.to_string());
      }
      for (int j = 1; j <= reach; ++j) {
        if (!cb.bound_holds(j)) v.require(false, "j=" + std::to_string(j) + " bound at " + eta.to_string());
      }
    }
  }
  v.detail << ' ' << checked << " configurations, N <= 18";
}

void ac9(Verdict& v) {
  const auto pm2 = RateModel::porous_medium(2);
  Philox rng(2024, 0);
  auto pick = [&](int lo, int hi) { return lo + static_cast<int>(rng.uniform() * (hi - lo + 1)); };
  const int n_sites = 30;
  int built = 0;
  int endpoint = 0;
  int positive = 0;
  int counted = 0;
  while (built < kPathTrials) {
    const bool torus = rng.bernoulli(0.5);
    const Geometry g = torus ? Geometry::torus(1, n_sites) : Geometry::box(n_sites);
    const int lo = torus ? 0 : 1;
    const int hi = torus ? n_sites - 1 : n_sites;
    Configuration eta(g);
    for (int s = lo; s <= hi; ++s) eta.set(g.index(Site{s}), rng.bernoulli(0.4));
    const int x = pick(lo, hi);
    const int y = pick(lo, hi);
    const int z = pick(lo, hi);
    if (x == y) continue;
    int n = 0;
    int m = std::abs(y - x);
    if (torus) {
      const int ox = ((x - z) % n_sites + n_sites) % n_sites;
      const int oy = ((y - z) % n_sites + n_sites) % n_sites;
      if (std::min(ox, oy) < 2) continue;
      n = std::min(ox, oy) - 1;
      m = std::abs(oy - ox);
    } else if (z + 1 < std::min(x, y)) {
      n = std::min(x, y) - (z + 1);
    } else if (z > std::max(x, y) && z + 1 <= hi) {
      n = z - std::max(x, y);
    } else {
      continue;
    }
    eta.set(g.index(Site{z}), true);
    eta.set(g.index(Site{torus ? (z + 1) % n_sites : z + 1}), true);
    eta.set(g.index(Site{x}), true);
    eta.set(g.index(Site{y}), false);
    if (rng.bernoulli(0.5)) {
      eta.set(g.index(Site{x}), false);
      eta.set(g.index(Site{y}), true);
    }
    const auto p = exchange_path(eta, x, y, z, pm2);
    ++built;
    Configuration cur = p.start;
    bool ok = true;
    for (const auto& step : p.steps) {
      const Site left{step.site};
      const Site right = g.shift(left, 0, 1);
      ok = ok && g.contains(right) && kinetic_constraint(pm2, cur, left, 0) > 0.0;
      if (cur(left) != cur(right)) cur = swap(cur, left, right);
    }
    positive += ok ? 1 : 0;
    endpoint += cur == swap(eta, Site{x}, Site{y}) ? 1 : 0;
    const int gamma = 5 * (m - 1) + 4 * (n - 1) + 2;
    counted += static_cast<int>(p.configurations()) == gamma ? 1 : 0;
  }
  v.detail << ' ' << built << " paths: endpoint " << endpoint << ", positive rates " << positive
           << ", length 5(m-1)+4(n-1)+2 " << counted;
  v.require(endpoint == built, "endpoints");
  v.require(positive == built, "positive rates");
  v.require(counted == built, "step counts");
}

void ac10(Verdict& v) {
  const auto h = as_test_function(FourierMode::one_d(1));
  const double h_prime_sq = 4.0 * std::numbers::pi * std::numbers::pi;  // ||H'||² for √2 cos(2πu)
  double worst_var = 0.0;
  double worst_dp = 0.0;
  double ratio = 0.0;
  for (int n : {64, 256}) {
    for (double rho : {0.3, 0.5}) {
      double sum_sq = 0.0;
      for (int x = 0; x < n; ++x) {
        const double u = static_cast<double>(x) / n;
        const double hv = h(std::span<const double>(&u, 1));
        sum_sq += hv * hv;
      }
      const double var_stated = rho * (1.0 - rho) * sum_sq / n;
      const double var_exact = static_variance(h, 1, n, rho);
      const double var_err = std::abs(var_exact - var_stated) / var_stated;
      const double dp_stated = rho * rho * (1.0 - rho) * h_prime_sq / (static_cast<double>(n) * n);
      const double dp_exact = dirichlet_of_field(h, n, rho);
      const double dp_err = std::abs(dp_exact - dp_stated) / dp_stated;
      worst_var = std::max(worst_var, var_err * n / 2.0);
      worst_dp = std::max(worst_dp, dp_err * n / 2.0);
      ratio = dp_exact / dp_stated;
      v.require(var_err < 2.0 / n, "variance identity N=" + std::to_string(n) + " rho=" + fmt(rho));
      v.require(dp_err < 2.0 / n, "Dirichlet identity N=" + std::to_string(n) + " rho=" + fmt(rho));
    }
  }
  v.detail << " variance: worst error " << fmt(worst_var) << " x 2/N; Dirichlet form: worst error " << fmt(worst_dp)
           << " x 2/N, exact/stated = " << fmt(ratio);
}

void ac11(Verdict& v) {
  FluctParams p;
  p.side = 512;
  p.rho = 0.5;
  p.models = {"pm2+ssep", "pm2"};
  p.theta = 1.0;
  p.modes = {1};
  p.lags = {0.1};
  p.replicas = 32;
  p.horizon = 4.0;
  p.spacing = 0.005;
  p.batches_per_replica = 1;
  const double target = 0.25 * std::exp(-4.0 * std::numbers::pi * std::numbers::pi * 0.1);
  for (const auto& row : run_fluct(p, default_jobs())) {
    const double z = (row.estimate.estimate - target) / row.estimate.standard_error;
    v.detail << ' ' << row.model << ": " << fmt(row.estimate.estimate) << " ± " << fmt(row.estimate.standard_error)
             << " (z=" << fmt(z) << ", " << row.estimate.batches << " batches)";
    v.require(std::abs(z) <= kZScore, row.model + " within 4 standard errors");
    v.require(row.estimate.batches >= kMinBatches, row.model + " at least 20 batches");
  }
  v.detail << " target " << fmt(target);
}

DensityField cosine_datum(int side) {
  return DensityField::sample(1, side, [](std::span<const double> u) {
    return 0.5 + 0.25 * std::cos(2.0 * std::numbers::pi * u[0]);
  });
}

double coarse_error(const DensityField& coarse, const DensityField& fine) {
  const int ratio = fine.side() / coarse.side();
  double e = 0.0;
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    e = std::max(e, std::abs(coarse[i] - fine[i * static_cast<std::size_t>(ratio)]));
  }
  return e;
}

void ac12(Verdict& v) {
  double drift = 0.0;
  for (int m : {2, 3}) {
    const double t = 0.1;
    const auto rho0 = cosine_datum(256);
    const auto out = solve_pme(rho0, m, t);
    drift = std::max(drift, std::abs(out.mass() - rho0.mass()) / rho0.mass() / t);
    const auto c = DensityField::constant(1, 128, 0.37);
    const auto fixed = solve_pme(c, m, t);
    v.require(fixed.max_abs_difference(c) == 0.0, "constant fixed point m=" + std::to_string(m));
  }
  v.detail << " mass drift/unit time " << fmt(drift);
  v.require(drift < kMassDriftPerTime, "mass conservation");

  const double t = 0.05;
  const auto ref = solve_pme(cosine_datum(2048), 2, t);
  const double e128 = coarse_error(solve_pme(cosine_datum(128), 2, t), ref);
  const double e256 = coarse_error(solve_pme(cosine_datum(256), 2, t), ref);
  const double e512 = coarse_error(solve_pme(cosine_datum(512), 2, t), ref);
  v.detail << "; refinement factors " << fmt(e128 / e256) << ", " << fmt(e256 / e512);
  v.require(e128 / e256 >= kRefineLow && e128 / e256 <= kRefineHigh, "refinement 128 -> 256");
  v.require(e256 / e512 >= kRefineLow && e256 / e512 <= kRefineHigh, "refinement 256 -> 512");

  double tail = 0.0;
  for (int side : {256, 512}) {
    const auto bump = DensityField::sample(1, side, [](std::span<const double> u) {
      return (u[0] >= 0.4 && u[0] <= 0.6) ? 0.5 : 0.0;
    });
    const auto out = solve_pme(bump, 2, 1e-3);
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out.coordinate(i, 0) <= 0.1) tail = std::max(tail, out[i]);
    }
  }
  v.detail << "; support probe max on [0, 0.1] " << fmt(tail);
  v.require(tail < kSupportFloor, "compact support");
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<void(Verdict&)>>> all{
      {"AC-1", ac1}, {"AC-2", ac2}, {"AC-3", ac3},   {"AC-4", ac4},   {"AC-5", ac5},   {"AC-6", ac6},
      {"AC-7", ac7}, {"AC-8", ac8}, {"AC-9", ac9}, {"AC-10", ac10}, {"AC-11", ac11}, {"AC-12", ac12},
  };
  std::vector<std::string> wanted(argv + 1, argv + argc);
  bool all_pass = true;
  int ran = 0;
  for (const auto& [name, fn] : all) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), name) == wanted.end()) continue;
    ++ran;
    Verdict v;
    try {
      fn(v);
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail << " [exception: " << e.what() << ']';
    }
    std::cout << name << ' ' << (v.pass ? "PASS" : "FAIL") << ':' << v.detail.str() << std::endl;
    all_pass = all_pass && v.pass;
  }
  if (ran == 0) {
    std::cerr << "no such criterion\n";
    return 2;
  }
  return all_pass ? 0 : 1;
}
