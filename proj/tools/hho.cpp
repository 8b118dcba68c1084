// hho: HHO diffusion studies (uniform refinement, adaptive refinement, degree sweep).
//
// Exit codes: 0 success, 1 numerical failure, 2 usage error.

#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <omp.h>

#include "CLI11.hpp"
#include "hho/errors.hpp"
#include "hho/study.hpp"

namespace {

constexpr int exit_numerical = 1;
constexpr int exit_usage = 2;

struct Options {
  std::map<std::string, std::string> values;
  std::string config_path;
  bool serial = false;
  int threads = 0;
};

// Every value option is kept as a string under its config key, so a config
// file and the command line go through the same parser.
void add_value(CLI::App* app, Options& opts, const std::string& flag, const std::string& key,
               const std::string& help)
{
  app->add_option_function<std::string>(
      flag, [&opts, key](const std::string& v) { opts.values[key] = v; }, help);
}

void add_common(CLI::App* app, Options& opts)
{
  add_value(app, opts, "--case", "case", "ex1, ex2, ex3 or custom");
  add_value(app, opts, "--k", "k", "face polynomial degree (cells use k+1)");
  add_value(app, opts, "--mesh", "mesh", "mesh file (required for the custom case)");
  add_value(app, opts, "--out", "out", "CSV output file (default: stdout)");
  add_value(app, opts, "--vtu", "vtu", "directory for per-iteration VTU files");
  add_value(app, opts, "--n", "n", "subdivisions of the built-in initial mesh");
  add_value(app, opts, "--bump", "bump", "extra quadrature exactness for the energy error");
  app->add_option("--config", opts.config_path, "key = value file; command-line flags win");
  app->add_flag("--serial", opts.serial, "use the serial kernels");
  app->add_option("--threads", opts.threads, "OpenMP threads (0: runtime default)");
}

int run(const Options& opts, const std::string& mode)
{
  hho::ConfigMap keys;
  if (!opts.config_path.empty())
    keys = hho::read_config_file(opts.config_path);
  for (const auto& [k, v] : opts.values)
    keys[k] = v;
  keys["mode"] = mode;

  hho::RunConfig config;
  hho::apply_config(config, keys);
  config.exec = opts.serial ? hho::Execution::serial : hho::Execution::parallel;
  if (opts.threads > 0)
    omp_set_num_threads(opts.threads);

  std::ofstream file;
  std::ostream* csv = &std::cout;
  if (!config.output_path.empty()) {
    file.open(config.output_path);
    if (!file)
      throw hho::IoError("cannot write '" + config.output_path + "'");
    csv = &file;
  }

  const hho::StudyResult result = hho::run_study(config, csv);
  for (const std::string& w : result.warnings)
    std::cerr << "warning: " << w << '\n';
  if (csv != &std::cout)
    for (const hho::IterationRecord& r : result.records)
      std::cout << "iter " << r.iter << "  cells " << r.cells << "  dofs " << r.dofs
                << "  error " << r.energy_error << "  estimator " << r.eta_total
                << "  effectivity " << r.effectivity << '\n';
  return 0;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Hybrid high-order diffusion solver with hp a posteriori estimates"};
  app.require_subcommand(1);

  Options opts;
  CLI::App* solve = app.add_subcommand("solve", "uniform refinement study");
  add_common(solve, opts);
  add_value(solve, opts, "--refinements", "refinements", "uniform refinements after the initial mesh");

  CLI::App* adapt = app.add_subcommand("adapt", "adaptive refinement study (bulk marking)");
  add_common(adapt, opts);
  add_value(adapt, opts, "--theta", "theta", "bulk fraction in (0, 1]");
  add_value(adapt, opts, "--max-dofs", "max_dofs", "stop once this many dofs are reached");
  add_value(adapt, opts, "--max-iters", "max_iters", "maximum number of refinements");

  CLI::App* psweep = app.add_subcommand("psweep", "sweep k on a fixed mesh (iter column = k)");
  add_common(psweep, opts);
  add_value(psweep, opts, "--cells", "cells", "structured mesh with this many cells");
  add_value(psweep, opts, "--kmin", "kmin", "first degree (default 1)");
  add_value(psweep, opts, "--kmax", "kmax", "last degree (default 9)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_usage;
  }

  const std::string mode = solve->parsed() ? "uniform" : adapt->parsed() ? "adaptive" : "psweep";
  try {
    return run(opts, mode);
  } catch (const hho::ParameterError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const hho::SpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const hho::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_usage;
  } catch (const hho::StructuralError& e) {
    std::cerr << "error: invalid mesh: " << e.what() << '\n';
    return exit_usage;
  } catch (const hho::OrientationError& e) {
    std::cerr << "error: invalid mesh: " << e.what() << '\n';
    return exit_usage;
  } catch (const hho::LabelingError& e) {
    std::cerr << "error: invalid mesh: " << e.what() << '\n';
    return exit_usage;
  } catch (const hho::SolverError& e) {
    std::cerr << "error: " << e.what() << " (relative residual " << e.residual() << ")\n";
    return exit_numerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_numerical;
  }
}
