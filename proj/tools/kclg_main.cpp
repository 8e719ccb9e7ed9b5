#include <CLI11.hpp>

#include <iostream>

#include "kclg/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{"kclg: kinetically constrained lattice gas lab"};
  app.require_subcommand(1);

  kclg::RunOptions opts;
  std::string spec;
  std::uint64_t seed = 0;
  const char* kinds[][2] = {
      {"hydro", "replica-averaged empirical profiles against the porous medium equation"},
      {"gap", "spectral gaps of generators restricted to hyperplanes"},
      {"ergodic", "communicating classes of hyperplanes"},
      {"fluct", "equilibrium time covariances of the density fluctuation field"},
      {"check", "built-in property suite"},
  };
  for (const auto& [name, help] : kinds) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--spec", spec, "INI run specification")->check(CLI::ExistingFile);
    sub->add_option("--out", opts.out, "output directory")->default_val("out");
    sub->add_option("--seed", seed, "master seed (overrides [run] seed)");
    sub->add_option("--jobs", opts.jobs, "worker threads, 0 for all cores")->default_val(0);
  }
  CLI11_PARSE(app, argc, argv);

  const std::string kind = app.get_subcommands().front()->get_name();
  const auto* sub = app.get_subcommand(kind);
  if (sub->count("--spec")) opts.spec = spec;
  if (sub->count("--seed")) opts.seed = seed;
  try {
    return kclg::run_command(kind, opts, std::cerr);
  } catch (const kclg::PreconditionError& e) {
    std::cerr << "kclg " << kind << ": invalid input: " << e.what() << '\n';
    return 64;
  } catch (const std::exception& e) {
    std::cerr << "kclg " << kind << ": " << e.what() << '\n';
    return 70;
  }
}
