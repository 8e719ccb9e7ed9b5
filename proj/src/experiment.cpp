#include "kclg/experiment.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <sstream>

#include "kclg/ergodic.hpp"
#include "kclg/hyperplane.hpp"
#include "kclg/parallel.hpp"
#include "kclg/paths.hpp"
#include "kclg/pme.hpp"
#include "kclg/spectral.hpp"

namespace kclg {

using json = nlohmann::ordered_json;
namespace pt = boost::property_tree;

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

RateModel parse_model(const std::string& name, double theta, int side) {
  if (name == "pm2") return RateModel::porous_medium(2);
  if (name == "pm3") return RateModel::porous_medium(3);
  if (name == "ssep") return RateModel::ssep();
  if (name == "pm2+ssep") return RateModel::perturbed(2, theta, side);
  if (name == "pm3+ssep") return RateModel::perturbed(3, theta, side);
  throw PreconditionError("unknown model '" + name + "' (expected pm2, pm3, ssep, pm2+ssep, pm3+ssep)");
}

namespace {

std::uint64_t stream_key(std::uint64_t seed, const std::string& label) { return seed ^ fnv1a(label); }

}  // namespace

std::vector<HydroRow> run_hydro(const HydroParams& p, unsigned jobs) {
  if (p.replicas < 1) throw PreconditionError("need at least one replica");
  if (!(p.time > 0.0)) throw PreconditionError("comparison time must be positive");
  struct Cell {
    std::string model;
    int side;
  };
  std::vector<Cell> cells;
  for (const auto& m : p.models) {
    for (int n : p.sides) {
      const RateModel model = parse_model(m, p.theta, n);
      model.validate_for(Geometry::torus(1, n));
      if (n % p.radius_divisor != 0 || 2 * (n / p.radius_divisor) + 1 > n) {
        throw PreconditionError("side " + std::to_string(n) + " is not compatible with the block radius rule");
      }
      cells.push_back({m, n});
    }
  }
  const auto profile = InitialProfile::cosine(p.mean, p.amplitude);

  struct Task {
    std::vector<double> profile;
    std::uint64_t events = 0;
    bool froze = false;
  };
  const auto reps = static_cast<std::size_t>(p.replicas);
  std::vector<Task> tasks(cells.size() * reps);
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const Cell& cell = cells[t / reps];
    const auto replica = static_cast<std::uint32_t>(t % reps);
    const Geometry g = Geometry::torus(1, cell.side);
    const RateModel model = parse_model(cell.model, p.theta, cell.side);
    const std::uint64_t key = stream_key(p.seed, "hydro/" + cell.model + "/" + std::to_string(cell.side));
    Philox init = Philox::for_replica(key, replica, purpose::initial);
    const Configuration eta0 = sample_initial(profile, g, init);
    SimConfig cfg{model, g, p.time, {0.0, p.time}, key, replica};
    const Trajectory traj = simulate(eta0, cfg);
    const auto field = empirical_profile(traj, p.time, cell.side / p.radius_divisor);
    tasks[t] = {std::vector<double>(field.values().begin(), field.values().end()), traj.events, traj.froze};
  });

  std::vector<HydroRow> rows;
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const int n = cells[c].side;
    std::vector<double> mean(static_cast<std::size_t>(n), 0.0);
    HydroRow row;
    row.model = parse_model(cells[c].model, p.theta, n).name();
    row.side = n;
    for (std::size_t r = 0; r < reps; ++r) {
      const Task& task = tasks[c * reps + r];
      for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += task.profile[i];
      row.events += task.events;
      row.froze += task.froze ? 1 : 0;
    }
    for (auto& v : mean) v /= static_cast<double>(reps);
    row.empirical = DensityField(1, n, std::move(mean));
    const auto rho0 = DensityField::sample(1, p.pde_grid, profile.rho0);
    row.pde = solve_pme(rho0, parse_model(cells[c].model, p.theta, n).m, p.time, p.pde_safety);
    row.l1 = l1_distance(row.empirical, row.pde);
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<FluctRow> run_fluct(const FluctParams& p, unsigned jobs) {
  if (p.replicas < 1) throw PreconditionError("need at least one replica");
  if (!(p.spacing > 0.0) || !(p.horizon > p.spacing)) throw PreconditionError("bad time grid");
  const Geometry g = Geometry::torus(1, p.side);
  std::vector<RateModel> models;
  for (const auto& m : p.models) {
    models.push_back(parse_model(m, p.theta, p.side));
    models.back().validate_for(g);
  }
  const auto intervals = static_cast<std::size_t>(std::llround(p.horizon / p.spacing));
  const auto times = uniform_times(static_cast<double>(intervals) * p.spacing, intervals);
  const auto reps = static_cast<std::size_t>(p.replicas);

  std::vector<TestFn> fns;
  for (int z : p.modes) fns.push_back(as_test_function(FourierMode::one_d(z)));

  struct Task {
    std::vector<std::vector<double>> y;  // per mode, per time
    std::uint64_t events = 0;
  };
  std::vector<Task> tasks(models.size() * reps);
  parallel_for(tasks.size(), jobs, [&](std::size_t t) {
    const std::size_t mi = t / reps;
    const auto replica = static_cast<std::uint32_t>(t % reps);
    const std::uint64_t key = stream_key(p.seed, "fluct/" + p.models[mi] + "/" + std::to_string(p.side));
    Philox init = Philox::for_replica(key, replica, purpose::initial);
    const Configuration eta0 = sample_initial(InitialProfile::constant(p.rho), g, init);
    const Trajectory traj = simulate(eta0, SimConfig{models[mi], g, times.back(), times, key, replica});
    Task task;
    task.events = traj.events;
    for (const auto& fn : fns) {
      std::vector<double> y;
      y.reserve(traj.snapshots.size());
      for (const auto& s : traj.snapshots) y.push_back(field_value(s.eta, fn, p.rho));
      task.y.push_back(std::move(y));
    }
    tasks[t] = std::move(task);
  });

  std::vector<FluctRow> rows;
  for (std::size_t mi = 0; mi < models.size(); ++mi) {
    std::uint64_t events = 0;
    for (std::size_t r = 0; r < reps; ++r) events += tasks[mi * reps + r].events;
    for (std::size_t zi = 0; zi < p.modes.size(); ++zi) {
      std::vector<std::vector<std::pair<double, double>>> series;
      for (std::size_t r = 0; r < reps; ++r) {
        const auto& y = tasks[mi * reps + r].y[zi];
        std::vector<std::pair<double, double>> s;
        for (double v : y) s.emplace_back(v, v);
        series.push_back(std::move(s));
      }
      for (double lag : p.lags) {
        FluctRow row;
        row.model = models[mi].name();
        row.mode = p.modes[zi];
        row.lag = lag;
        const auto h = FourierMode::one_d(p.modes[zi]);
        row.predicted = lag > 0.0 ? ou_covariance(h, h, lag, p.rho) : p.rho * (1.0 - p.rho);
        row.estimate = estimate_time_covariance(series, p.spacing, lag, p.batches_per_replica);
        row.events = events;
        rows.push_back(row);
      }
    }
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Command-line runner

namespace {

struct SpecFile {
  pt::ptree tree;
  std::string text;

  template <class T>
  T get(const std::string& key, T fallback) const {
    return tree.get<T>(key, fallback);
  }
  std::vector<std::string> list(const std::string& key, const std::string& fallback) const {
    std::vector<std::string> out;
    std::stringstream in(tree.get<std::string>(key, fallback));
    std::string item;
    while (std::getline(in, item, ',')) {
      const auto b = item.find_first_not_of(" \t");
      const auto e = item.find_last_not_of(" \t");
      if (b != std::string::npos) out.push_back(item.substr(b, e - b + 1));
    }
    return out;
  }
  std::vector<int> ints(const std::string& key, const std::string& fallback) const {
    std::vector<int> out;
    for (const auto& s : list(key, fallback)) {
      const auto dots = s.find("..");
      if (dots != std::string::npos) {
        const int lo = std::stoi(s.substr(0, dots));
        const int hi = std::stoi(s.substr(dots + 2));
        for (int v = lo; v <= hi; ++v) out.push_back(v);
      } else {
        out.push_back(std::stoi(s));
      }
    }
    return out;
  }
  std::vector<double> doubles(const std::string& key, const std::string& fallback) const {
    std::vector<double> out;
    for (const auto& s : list(key, fallback)) out.push_back(std::stod(s));
    return out;
  }
};

SpecFile load_spec(const std::optional<std::filesystem::path>& path) {
  SpecFile spec;
  if (!path) return spec;
  std::ifstream in(*path);
  if (!in) throw PreconditionError("cannot read spec file " + path->string());
  std::stringstream buf;
  buf << in.rdbuf();
  spec.text = buf.str();
  std::istringstream parse(spec.text);
  try {
    pt::read_ini(parse, spec.tree);
  } catch (const pt::ini_parser_error& e) {
    throw PreconditionError("malformed spec file: " + std::string(e.what()));
  }
  return spec;
}

std::string hex(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::string& kind, const std::string& hash,
            const std::string& units, const std::string& header)
      : out_(path) {
    if (!out_) throw std::runtime_error("cannot write " + path.string());
    out_ << "# kclg " << kind << " spec=" << hash << " units: " << units << '\n' << header << '\n';
    out_ << std::setprecision(12);
  }
  std::ofstream& stream() { return out_; }

 private:
  std::ofstream out_;
};

std::vector<int> k_values(const std::string& rule, int volume) {
  std::vector<int> out;
  if (rule == "half") {
    out.push_back((volume + 1) / 2);
  } else if (rule == "quarter") {
    out.push_back(volume / 4);
  } else if (rule == "all") {
    for (int k = 0; k <= volume; ++k) out.push_back(k);
  } else {
    std::stringstream in(rule);
    std::string item;
    while (std::getline(in, item, ';')) out.push_back(std::stoi(item));
  }
  for (int k : out) {
    if (k < 0 || k > volume) throw PreconditionError("particle number " + std::to_string(k) + " out of range");
  }
  return out;
}

Geometry make_geometry(const std::string& kind, int dim, int side) {
  if (kind == "torus") return Geometry::torus(dim, side);
  if (kind == "box") {
    if (dim != 1) throw PreconditionError("box geometry is one-dimensional");
    return Geometry::box(side);
  }
  throw PreconditionError("unknown geometry '" + kind + "'");
}

struct Outcome {
  int status = 0;
  json summary = json::object();
  std::vector<std::string> files;
};

Outcome command_hydro(const SpecFile& s, std::uint64_t seed, unsigned jobs, const std::filesystem::path& out,
                      const std::string& hash) {
  HydroParams p;
  p.sides = s.ints("hydro.sides", "128,256,512");
  p.models = s.list("model.names", "pm2");
  p.theta = s.get("model.theta", 1.0);
  p.mean = s.get("hydro.mean", 0.5);
  p.amplitude = s.get("hydro.amplitude", 0.25);
  p.time = s.get("hydro.time", 0.05);
  p.radius_divisor = s.get("hydro.radius_divisor", 32);
  p.replicas = s.get("hydro.replicas", 30);
  p.pde_grid = s.get("hydro.pde_grid", 1024);
  p.seed = seed;
  const double tolerance = s.get("hydro.tolerance", 0.03);

  const auto rows = run_hydro(p, jobs);
  Outcome o;
  {
    CsvWriter csv(out / "hydro_l1.csv", "hydro", hash, "l1 in density x macroscopic length",
                  "model,N,replicas,l1,events,froze");
    for (const auto& r : rows) {
      csv.stream() << r.model << ',' << r.side << ',' << p.replicas << ',' << r.l1 << ',' << r.events << ','
                   << r.froze << '\n';
    }
    o.files.push_back("hydro_l1.csv");
  }
  json table = json::array();
  bool ok = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    std::string name = "profile_" + std::to_string(i) + "_N" + std::to_string(r.side) + ".csv";
    CsvWriter csv(out / name, "hydro", hash, "u macroscopic position, densities in particles per site",
                  "u,empirical,pde");
    for (std::size_t x = 0; x < r.empirical.size(); ++x) {
      const double u = r.empirical.coordinate(x, 0);
      csv.stream() << u << ',' << r.empirical[x] << ',' << r.pde.nearest(std::span<const double>(&u, 1)) << '\n';
    }
    o.files.push_back(name);
    table.push_back({{"model", r.model}, {"N", r.side}, {"l1", r.l1}, {"events", r.events}, {"froze", r.froze}});
  }
  // Per model: L1 must decrease in N and the largest N must meet the tolerance.
  for (const auto& m : p.models) {
    const auto name = parse_model(m, p.theta, p.sides.back()).name();
    std::vector<const HydroRow*> mine;
    for (const auto& r : rows) {
      if (parse_model(m, p.theta, r.side).name() == r.model) mine.push_back(&r);
    }
    for (std::size_t i = 1; i < mine.size(); ++i) ok = ok && mine[i]->l1 < mine[i - 1]->l1;
    if (!mine.empty()) ok = ok && mine.back()->l1 < tolerance;
  }
  o.summary = {{"rows", table}, {"tolerance", tolerance}, {"within_tolerance", ok}};
  o.status = ok ? 0 : 2;
  return o;
}

Outcome command_gap(const SpecFile& s, const std::filesystem::path& out, const std::string& hash,
                    std::ostream& log) {
  const auto names = s.list("model.names", "pm2");
  const double theta = s.get("model.theta", 1.0);
  const auto geometry = s.get<std::string>("gap.geometry", "box");
  const auto sides = s.ints("gap.sides", "6,8,10");
  const auto rule = s.get<std::string>("gap.k", "half");
  const bool long_range = s.get("gap.long_range", false);

  struct Job {
    GeneratorKind kind;
    int side;
    int k;
  };
  std::vector<Job> plan;
  for (int n : sides) {
    const Geometry g = make_geometry(geometry, 1, n);
    for (int k : k_values(rule, n)) {
      for (const auto& m : names) {
        const RateModel model = parse_model(m, theta, n);
        model.validate_for(g);
        plan.push_back({GeneratorKind::local(model), n, k});
      }
      if (long_range) plan.push_back({GeneratorKind::long_range_exclusion(), n, k});
    }
  }

  Outcome o;
  CsvWriter csv(out / "gaps.csv", "gap", hash, "gap in inverse microscopic time",
                "model,geometry,N,k,gap,zero_multiplicity,method,degenerate");
  json timings = json::array();
  for (const auto& job : plan) {
    const auto start = std::chrono::steady_clock::now();
    const Geometry g = make_geometry(geometry, 1, job.side);
    const auto gen = build_generator(g, job.k, job.kind);
    const auto res = spectral_gap(gen);
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (res.degenerate) log << "warning: degenerate hyperplane N=" << job.side << " k=" << job.k << '\n';
    csv.stream() << job.kind.name() << ',' << geometry << ',' << job.side << ',' << job.k << ',';
    if (res.degenerate) {
      csv.stream() << ",,degenerate,1\n";
    } else {
      csv.stream() << res.gap << ',' << res.zero_multiplicity << ',' << res.method << ",0\n";
    }
    timings.push_back({{"model", job.kind.name()}, {"N", job.side}, {"k", job.k}, {"wall_seconds", secs}});
  }
  o.files.push_back("gaps.csv");
  o.summary = {{"rows", plan.size()}, {"wall_time", timings}};
  return o;
}

Outcome command_ergodic(const SpecFile& s, const std::filesystem::path& out, const std::string& hash) {
  const auto name = s.get<std::string>("model.names", "pm2");
  const double theta = s.get("model.theta", 1.0);
  const auto geometry = s.get<std::string>("ergodic.geometry", "torus");
  const int dim = s.get("ergodic.dim", 1);
  const auto sides = s.ints("ergodic.sides", "4..12");
  const auto rule = s.get<std::string>("ergodic.k", "all");
  const auto budget = s.get<std::size_t>("ergodic.budget", kDefaultStateBudget);

  std::vector<std::pair<Geometry, int>> plan;
  for (int n : sides) {
    const Geometry g = make_geometry(geometry, dim, n);
    parse_model(name, theta, n).validate_for(g);
    for (int k : k_values(rule, static_cast<int>(g.volume()))) {
      Hyperplane(g, k, budget);  // budget check before any work
      plan.emplace_back(g, k);
    }
  }
  Outcome o;
  CsvWriter csv(out / "components.csv", "ergodic", hash, "counts of configurations and components",
                "model,geometry,N,k,states,components,mobile,blocked_singleton,full,other");
  json reports = json::array();
  for (const auto& [g, k] : plan) {
    const RateModel model = parse_model(name, theta, g.side());
    const auto rep = components(g, k, model, budget);
    csv.stream() << model.name() << ',' << g.kind_name() << ',' << g.side() << ',' << k << ',' << rep.total_states
                 << ',' << rep.components.size() << ',' << rep.count(ComponentClass::mobile) << ','
                 << rep.count(ComponentClass::blocked_singleton) << ',' << rep.count(ComponentClass::full) << ','
                 << rep.count(ComponentClass::other) << '\n';
    json comps = json::array();
    for (const auto& c : rep.components) {
      comps.push_back({{"size", c.size}, {"class", class_name(c.cls)}, {"representative", c.representative.to_string()}});
    }
    reports.push_back({{"N", g.side()}, {"k", k}, {"geometry", g.kind_name()}, {"model", model.name()},
                       {"components", comps}});
  }
  std::ofstream(out / "components.json") << reports.dump(2) << '\n';
  o.files = {"components.csv", "components.json"};
  o.summary = {{"hyperplanes", plan.size()}};
  return o;
}

Outcome command_fluct(const SpecFile& s, std::uint64_t seed, unsigned jobs, const std::filesystem::path& out,
                      const std::string& hash) {
  FluctParams p;
  p.side = s.get("fluct.side", 512);
  p.rho = s.get("fluct.rho", 0.5);
  p.models = s.list("model.names", "pm2");
  p.theta = s.get("model.theta", 1.0);
  p.modes = s.ints("fluct.modes", "1");
  p.lags = s.doubles("fluct.lags", "0,0.1");
  p.replicas = s.get("fluct.replicas", 32);
  p.horizon = s.get("fluct.horizon", 1.0);
  p.spacing = s.get("fluct.spacing", 0.005);
  p.batches_per_replica = s.get<std::size_t>("fluct.batches_per_replica", 1);
  p.seed = seed;
  const auto rows = run_fluct(p, jobs);
  Outcome o;
  CsvWriter csv(out / "covariance.csv", "fluct", hash, "lag in macroscopic time, covariances of the field",
                "model,mode,lag,predicted,estimated,stderr,batches");
  json table = json::array();
  for (const auto& r : rows) {
    csv.stream() << r.model << ',' << r.mode << ',' << r.lag << ',' << r.predicted << ',' << r.estimate.estimate
                 << ',' << r.estimate.standard_error << ',' << r.estimate.batches << '\n';
    const double z = (r.estimate.estimate - r.predicted) / r.estimate.standard_error;
    table.push_back({{"model", r.model}, {"mode", r.mode}, {"lag", r.lag}, {"z_score", z}, {"events", r.events}});
  }
  o.files.push_back("covariance.csv");
  o.summary = {{"rows", table}};
  return o;
}

// Property suite shipped with the tool.
struct Property {
  std::string name;
  bool passed;
  std::string detail;
};

std::vector<Property> property_suite() {
  std::vector<Property> out;
  auto add = [&](std::string name, bool ok, std::string detail) { out.push_back({std::move(name), ok, std::move(detail)}); };

  {
    // h_1 - τh_1 reproduces the current on all 16 windows (m=2).
    const Geometry g = Geometry::torus(1, 6);
    const RateModel pm2 = RateModel::porous_medium(2);
    int bad = 0;
    for (int w = 0; w < 16; ++w) {
      Configuration eta(g);
      for (int t = 0; t < 4; ++t) {
        if ((w >> t) & 1) eta.set(static_cast<std::size_t>((t - 1 + 6) % 6), true);
      }
      const double lhs = current(pm2, eta, Site{0}, 0);
      const int rhs = local_h(eta, Site{0}, 0) - local_h(eta, Site{1}, 0);
      bad += lhs == rhs ? 0 : 1;
    }
    add("gradient identity m=2", bad == 0, std::to_string(bad) + " mismatching windows");
    const auto h3 = find_gradient_decomposition(RateModel::porous_medium(3));
    const bool exact = h3 && h3->max_residual(RateModel::porous_medium(3)) == Rational(0);
    add("gradient decomposition m=3", exact, h3 ? (exact ? "zero residual on 64 windows" : "nonzero residual") : "infeasible");
  }
  {
    int asym = 0;
    int total = 0;
    for (int n = 4; n <= 6; ++n) {
      for (int k = 0; k <= n; ++k) {
        for (const auto& kind : {GeneratorKind::local(RateModel::porous_medium(2)), GeneratorKind::local(RateModel::ssep()),
                                 GeneratorKind::local(RateModel::perturbed(2, 1.0, n))}) {
          const auto gen = build_generator(Geometry::torus(1, n), k, kind);
          ++total;
          asym += (is_symmetric(gen) && max_row_sum(gen) < 1e-12) ? 0 : 1;
        }
      }
    }
    add("detailed balance", asym == 0, std::to_string(total) + " generators checked");
  }
  {
    long failures = 0;
    for (int n = 1; n <= 14; ++n) {
      const Geometry g = Geometry::box(n);
      for (std::uint32_t bits = 0; bits < (1u << n); ++bits) {
        Configuration eta(g);
        for (int i = 0; i < n; ++i) {
          if ((bits >> i) & 1u) eta.set(static_cast<std::size_t>(i), true);
        }
        const int k = static_cast<int>(eta.count());
        const auto cb = couple_bounds(eta, std::max(n, 2));
        if (3 * k > n && !cb.large_density_bound_holds()) ++failures;
        if (3 * k <= n) {
          for (int j = 2; j <= n; ++j) failures += cb.bound_holds(j) ? 0 : 1;
        }
      }
    }
    add("couple lower bounds (N <= 14)", failures == 0, std::to_string(failures) + " violations");
  }
  {
    Philox rng(2024, 0);
    const RateModel pm2 = RateModel::porous_medium(2);
    int bad = 0;
    int built = 0;
    while (built < 200) {
      const int n = 30;
      const Geometry g = Geometry::box(n);
      const int z = 1 + static_cast<int>(rng.uniform() * 10);
      const int w = rng.bernoulli(0.5) ? 1 : 2;
      const int lo = z + w + 1 + static_cast<int>(rng.uniform() * 8);
      const int hi = lo + 1 + static_cast<int>(rng.uniform() * (n - lo));
      if (hi > n) continue;
      Configuration eta(g);
      for (int x = 1; x <= n; ++x) {
        if (rng.bernoulli(0.4)) eta.set(static_cast<std::size_t>(x - 1), true);
      }
      eta.set(static_cast<std::size_t>(z - 1), true);
      eta.set(static_cast<std::size_t>(z + w - 1), true);
      if (w == 2) eta.set(static_cast<std::size_t>(z), false);
      eta.set(static_cast<std::size_t>(lo - 1), true);
      eta.set(static_cast<std::size_t>(hi - 1), false);
      const auto path = exchange_path(eta, lo, hi, z, pm2);
      bad += check_path(path, pm2).empty() ? 0 : 1;
      ++built;
    }
    add("exchange path checker", bad == 0, std::to_string(built) + " random paths, " + std::to_string(bad) + " invalid");
  }
  {
    int wrong = 0;
    for (int n = 4; n <= 10; ++n) {
      for (int k = 0; k <= n; ++k) {
        const auto rep = components(Geometry::torus(1, n), k, RateModel::porous_medium(2));
        if (3 * k > n) {
          wrong += rep.components.size() == 1 ? 0 : 1;
        } else {
          wrong += rep.count(ComponentClass::other) == 0 && rep.count(ComponentClass::mobile) <= 1 ? 0 : 1;
        }
      }
    }
    add("irreducibility threshold (N <= 10)", wrong == 0, std::to_string(wrong) + " hyperplanes disagree");
  }
  {
    double worst = 1e300;
    for (int n = 2; n <= 7; ++n) {
      for (int k = 1; k < n; ++k) {
        const auto gen = build_generator(Geometry::box(n), k, GeneratorKind::long_range_exclusion());
        worst = std::min(worst, spectral_gap(gen).gap);
      }
    }
    std::ostringstream d;
    d << "smallest gap " << worst;
    add("long-range gap >= 1", worst >= 1.0 - 1e-10, d.str());
  }
  {
    const auto rho0 = DensityField::sample(1, 128, [](std::span<const double> u) {
      return 0.5 + 0.25 * std::cos(2.0 * std::numbers::pi * u[0]);
    });
    const auto sol = solve_pme(rho0, 2, 0.05);
    const double drift = std::abs(sol.mass() - rho0.mass()) / rho0.mass();
    std::ostringstream d;
    d << "relative mass drift " << drift;
    add("porous-medium mass conservation", drift < 1e-12, d.str());
  }
  return out;
}

Outcome command_check(const std::filesystem::path& out, const std::string& hash, std::ostream& log) {
  const auto props = property_suite();
  Outcome o;
  CsvWriter csv(out / "check.csv", "check", hash, "pass flags", "property,passed,detail");
  json table = json::array();
  bool all = true;
  for (const auto& p : props) {
    csv.stream() << p.name << ',' << (p.passed ? 1 : 0) << ",\"" << p.detail << "\"\n";
    log << (p.passed ? "PASS " : "FAIL ") << p.name << " (" << p.detail << ")\n";
    table.push_back({{"property", p.name}, {"passed", p.passed}});
    all = all && p.passed;
  }
  o.files.push_back("check.csv");
  o.summary = {{"properties", table}, {"all_passed", all}};
  o.status = all ? 0 : 1;
  return o;
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream s;
  s << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return s.str();
}

}  // namespace

int run_command(const std::string& kind, const RunOptions& opts, std::ostream& log) {
  const SpecFile spec = load_spec(opts.spec);
  const std::uint64_t seed = opts.seed.value_or(spec.get<std::uint64_t>("run.seed", 1));
  const unsigned jobs = opts.jobs == 0 ? default_jobs() : opts.jobs;
  const std::string hash = hex(fnv1a(kind + "\n" + std::to_string(seed) + "\n" + spec.text));
  std::filesystem::create_directories(opts.out);

  json summary = {{"kind", kind}, {"spec_hash", hash}, {"seed", seed}, {"jobs", jobs}, {"started_at", utc_now()}};
  if (opts.spec) summary["spec"] = opts.spec->string();
  const auto start = std::chrono::steady_clock::now();
  auto write_summary = [&] {
    summary["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::ofstream(opts.out / "summary.json") << summary.dump(2) << '\n';
  };
  Outcome o;
  try {
    if (kind == "hydro") {
      o = command_hydro(spec, seed, jobs, opts.out, hash);
    } else if (kind == "gap") {
      o = command_gap(spec, opts.out, hash, log);
    } else if (kind == "ergodic") {
      o = command_ergodic(spec, opts.out, hash);
    } else if (kind == "fluct") {
      o = command_fluct(spec, seed, jobs, opts.out, hash);
    } else if (kind == "check") {
      o = command_check(opts.out, hash, log);
    } else {
      throw PreconditionError("unknown subcommand '" + kind + "'");
    }
  } catch (const std::exception& e) {
    summary["complete"] = false;
    summary["error"] = e.what();
    write_summary();
    throw;
  }
  summary["complete"] = true;
  summary["status"] = o.status;
  summary["files"] = o.files;
  summary["result"] = o.summary;
  write_summary();
  return o.status;
}

}  // namespace kclg
