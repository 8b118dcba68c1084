#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

#include "hho/adapt.hpp"
#include "hho/cases.hpp"
#include "hho/config.hpp"
#include "hho/parallel.hpp"

namespace hho {

enum class StudyMode { uniform, adaptive, psweep };

struct RunConfig {
  std::string case_name = "ex1";
  StudyMode mode = StudyMode::uniform;
  int k = 1;
  double theta = 0.4;
  /// Uniform mode: number of refinements after the initial mesh.
  int refinements = 4;
  std::size_t max_dofs = 200000;
  std::size_t max_iters = 1000;
  /// Extra energy-error quadrature exactness; negative picks the case default.
  int quadrature_bump = -1;
  /// Subdivisions of the built-in initial mesh; 0 picks the case default.
  int initial_n = 0;
  /// p-sweep: structured mesh with this many cells (0: initial mesh).
  std::size_t cells = 0;
  int kmin = 1;
  int kmax = 9;
  std::string mesh_path;
  std::string vtu_dir;
  std::string output_path;
  /// Problem description of the custom case (f, g_D, g_N, A, u, ...).
  ConfigMap problem_keys;
  Execution exec = Execution::parallel;
};

/// Applies recognised keys (case, mode, k, theta, refinements, max_dofs,
/// max_iters, bump, n, cells, kmin, kmax, mesh, vtu, out) to `config`; the
/// problem keys f, g_D, g_N, u, u_x, u_y, A, A.<region> go to problem_keys.
/// Throws ParameterError on unknown keys or malformed values.
void apply_config(RunConfig& config, const ConfigMap& keys);

/// Case selected by the config: a built-in one, or `custom` (mesh file plus
/// problem keys). A mesh file also replaces a built-in initial mesh.
Case resolve_case(const RunConfig& config);

/// Names of the CSV columns, in order.
const std::vector<std::string>& csv_columns();
void write_csv_header(std::ostream& out);
/// Values with 17 significant digits.
void write_csv_row(std::ostream& out, const IterationRecord& record);
/// Row marking an aborted study: FAILED followed by empty fields.
void write_csv_failure(std::ostream& out);

struct StudyResult {
  std::vector<IterationRecord> records;
  std::vector<std::string> warnings;
};

/// Runs the study. Rows are written to `csv` (if given) as they are produced;
/// on an exception the failure row is appended and the exception rethrown.
StudyResult run_study(const RunConfig& config, std::ostream* csv = nullptr);

} // namespace hho
