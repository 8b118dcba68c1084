#include "hho/study.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <ostream>
#include <set>
#include <string>

#include "hho/errors.hpp"
#include "hho/vtu.hpp"

namespace hho {

namespace {

template <class T>
T parse_number(const std::string& key, const std::string& value)
{
  try {
    std::size_t used = 0;
    T out{};
    if constexpr (std::is_same_v<T, double>)
      out = std::stod(value, &used);
    else if constexpr (std::is_same_v<T, int>)
      out = std::stoi(value, &used);
    else
      out = static_cast<T>(std::stoull(value, &used));
    if (used == value.size())
      return out;
  } catch (const std::exception&) {
  }
  throw ParameterError("bad value '" + value + "' for '" + key + "'");
}

bool is_problem_key(const std::string& key)
{
  static const std::set<std::string> keys = {"f", "g_D", "g_N", "u", "u_x", "u_y", "A"};
  return keys.count(key) > 0 || key.rfind("A.", 0) == 0;
}

std::vector<CellField> estimator_fields(const Mesh& mesh, const EstimatorReport& report)
{
  std::vector<CellField> fields = {{"eta_res", {}}, {"eta_sta", {}}, {"eta_nor", {}},
                                   {"eta_tan", {}}, {"osc", {}},     {"eta", {}},
                                   {"region", {}}};
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const CellEstimate& e = report.cells[c];
    fields[0].second.push_back(e.eta_res);
    fields[1].second.push_back(e.eta_sta);
    fields[2].second.push_back(e.eta_nor);
    fields[3].second.push_back(e.eta_tan);
    fields[4].second.push_back(e.osc());
    fields[5].second.push_back(std::sqrt(e.indicator_squared()));
    fields[6].second.push_back(mesh.cells()[c].region);
  }
  return fields;
}

} // namespace

void apply_config(RunConfig& c, const ConfigMap& keys)
{
  for (const auto& [key, value] : keys) {
    if (key == "case")
      c.case_name = value;
    else if (key == "mode") {
      if (value == "uniform")
        c.mode = StudyMode::uniform;
      else if (value == "adaptive")
        c.mode = StudyMode::adaptive;
      else if (value == "psweep")
        c.mode = StudyMode::psweep;
      else
        throw ParameterError("mode must be uniform, adaptive or psweep");
    } else if (key == "k")
      c.k = parse_number<int>(key, value);
    else if (key == "theta")
      c.theta = parse_number<double>(key, value);
    else if (key == "refinements")
      c.refinements = parse_number<int>(key, value);
    else if (key == "max_dofs")
      c.max_dofs = parse_number<std::size_t>(key, value);
    else if (key == "max_iters")
      c.max_iters = parse_number<std::size_t>(key, value);
    else if (key == "bump")
      c.quadrature_bump = parse_number<int>(key, value);
    else if (key == "n")
      c.initial_n = parse_number<int>(key, value);
    else if (key == "cells")
      c.cells = parse_number<std::size_t>(key, value);
    else if (key == "kmin")
      c.kmin = parse_number<int>(key, value);
    else if (key == "kmax")
      c.kmax = parse_number<int>(key, value);
    else if (key == "mesh")
      c.mesh_path = value;
    else if (key == "vtu")
      c.vtu_dir = value;
    else if (key == "out")
      c.output_path = value;
    else if (is_problem_key(key))
      c.problem_keys[key] = value;
    else
      throw ParameterError("unknown config key '" + key + "'");
  }
}

Case resolve_case(const RunConfig& config)
{
  if (config.case_name == "custom") {
    if (config.mesh_path.empty())
      throw ParameterError("the custom case needs a mesh file");
    Mesh mesh = read_mesh_file(config.mesh_path);
    std::vector<int> regions = mesh.regions();
    ProblemSpec problem = custom_problem(config.problem_keys, regions);
    return {"custom", std::move(problem), std::move(mesh), std::max(config.quadrature_bump, 0)};
  }
  Case c = builtin_case(config.case_name, config.initial_n);
  if (!config.mesh_path.empty())
    c.mesh = read_mesh_file(config.mesh_path);
  if (config.quadrature_bump >= 0)
    c.quadrature_bump = config.quadrature_bump;
  return c;
}

const std::vector<std::string>& csv_columns()
{
  static const std::vector<std::string> columns = {
      "iter",    "cells",   "dofs",    "energy_error", "eta_total", "eta_res", "eta_sta", "eta_nor",
      "eta_tan", "osc",     "effectivity", "pct_res",  "pct_sta",   "pct_nor", "pct_tan"};
  return columns;
}

void write_csv_header(std::ostream& out)
{
  const auto& cols = csv_columns();
  for (std::size_t i = 0; i < cols.size(); ++i)
    out << (i ? "," : "") << cols[i];
  out << '\n';
}

void write_csv_row(std::ostream& out, const IterationRecord& r)
{
  auto num = [](double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  out << r.iter << ',' << r.cells << ',' << r.dofs << ',' << num(r.energy_error) << ','
      << num(r.eta_total) << ',' << num(r.eta_res) << ',' << num(r.eta_sta) << ','
      << num(r.eta_nor) << ',' << num(r.eta_tan) << ',' << num(r.osc) << ','
      << num(r.effectivity);
  for (const double p : r.contributions)
    out << ',' << num(p);
  out << '\n';
  out.flush();
}

void write_csv_failure(std::ostream& out)
{
  out << "FAILED" << std::string(csv_columns().size() - 1, ',') << '\n';
  out.flush();
}

StudyResult run_study(const RunConfig& config, std::ostream* csv)
{
  if (config.k < 0)
    throw ParameterError("polynomial degree k must be non-negative");
  if (config.mode == StudyMode::adaptive && !(config.theta > 0.0 && config.theta <= 1.0))
    throw ParameterError("theta must lie in (0, 1]");
  if (config.mode == StudyMode::uniform && config.refinements < 0)
    throw ParameterError("refinements must be non-negative");
  if (config.mode == StudyMode::psweep && (config.kmin < 0 || config.kmax < config.kmin))
    throw ParameterError("p-sweep needs 0 <= kmin <= kmax");

  Case study_case = resolve_case(config);
  if (config.mode == StudyMode::psweep && config.cells > 0) {
    if (study_case.name == "custom")
      throw ParameterError("--cells is only available for built-in cases");
    study_case.mesh = builtin_mesh_with_cells(study_case.name, config.cells);
  }
  validate(study_case.problem, study_case.mesh);

  StudyResult result;
  if (const std::size_t neumann = study_case.mesh.count_faces(FaceKind::neumann); neumann > 0)
    result.warnings.push_back("the dofs column counts interior faces only; " +
                              std::to_string(neumann) +
                              " Neumann faces carry additional coupled unknowns");

  if (!config.vtu_dir.empty())
    std::filesystem::create_directories(config.vtu_dir);
  if (csv)
    write_csv_header(*csv);

  auto observer = [&](const IterationResult& r) {
    if (csv)
      write_csv_row(*csv, r.record);
    if (!config.vtu_dir.empty()) {
      char name[64];
      if (config.mode == StudyMode::psweep)
        std::snprintf(name, sizeof name, "_k%zu.vtu", r.record.iter);
      else
        std::snprintf(name, sizeof name, "_%03zu.vtu", r.record.iter);
      export_vtu(r.mesh, estimator_fields(r.mesh, r.report),
                 (std::filesystem::path(config.vtu_dir) / (study_case.name + name)).string());
    }
  };

  try {
    switch (config.mode) {
    case StudyMode::uniform: {
      Mesh mesh = study_case.mesh;
      for (int j = 0; j <= config.refinements; ++j) {
        result.records.push_back(evaluate_iteration(mesh, study_case.problem, config.k,
                                                    static_cast<std::size_t>(j),
                                                    study_case.quadrature_bump, config.exec,
                                                    observer));
        if (j < config.refinements)
          mesh = refine_uniform(mesh);
      }
      break;
    }
    case StudyMode::adaptive: {
      AdaptConfig ac;
      ac.k = config.k;
      ac.theta = config.theta;
      ac.max_dofs = config.max_dofs;
      ac.max_iters = config.max_iters;
      ac.quadrature_bump = study_case.quadrature_bump;
      ac.exec = config.exec;
      result.records =
          adaptive_loop(study_case.mesh, study_case.problem, ac, observer).records;
      break;
    }
    case StudyMode::psweep:
      for (int k = config.kmin; k <= config.kmax; ++k)
        result.records.push_back(evaluate_iteration(study_case.mesh, study_case.problem, k,
                                                    static_cast<std::size_t>(k),
                                                    study_case.quadrature_bump, config.exec,
                                                    observer));
      break;
    }
  } catch (...) {
    if (csv)
      write_csv_failure(*csv);
    throw;
  }
  return result;
}

} // namespace hho
