#include "hho/adapt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "hho/errors.hpp"

namespace hho {

IterationRecord evaluate_iteration(const Mesh& mesh, const ProblemSpec& problem, int k,
                                   std::size_t iter, int quadrature_bump, Execution exec,
                                   const IterationObserver& observer)
{
  const HhoSolution solution = solve_problem(mesh, problem, k, exec);
  const EstimatorReport report = estimate(mesh, problem, solution, exec);

  IterationRecord rec;
  rec.iter = iter;
  rec.cells = mesh.num_cells();
  rec.dofs = build_dof_map(mesh, k).reported_dofs;
  rec.eta_total = report.eta_total;
  rec.eta_total_with_normal = report.eta_total_with_normal;
  rec.eta_res = report.eta_res;
  rec.eta_sta = report.eta_sta;
  rec.eta_nor = report.eta_nor;
  rec.eta_tan = report.eta_tan;
  rec.osc = report.osc;
  rec.contributions = report.contributions;
  if (problem.exact && problem.exact->gradient) {
    rec.energy_error = energy_error(mesh, problem, solution, quadrature_bump, exec);
    rec.effectivity = rec.eta_total / rec.energy_error;
  }
  if (observer)
    observer(IterationResult{mesh, solution, report, rec});
  return rec;
}

std::vector<std::size_t> dorfler_mark(std::span<const double> eta, double theta)
{
  if (!(theta > 0.0 && theta <= 1.0))
    throw ParameterError("bulk fraction theta must lie in (0, 1], got " + std::to_string(theta));
  std::vector<double> squared(eta.size());
  double total = 0.0;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!(eta[i] >= 0.0))
      throw ParameterError("indicator " + std::to_string(i) + " is negative or NaN");
    squared[i] = eta[i] * eta[i];
    total += squared[i];
  }
  if (!(total > 0.0))
    throw MarkingError("all indicators vanish; nothing to mark");

  std::vector<std::size_t> order(eta.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return squared[a] != squared[b] ? squared[a] > squared[b] : a < b;
  });

  // theta = 1 takes every positive cell regardless of summation order
  const double target = theta >= 1.0 ? std::numeric_limits<double>::infinity() : theta * total;
  std::vector<std::size_t> marked;
  double sum = 0.0;
  for (const std::size_t c : order) {
    if (squared[c] == 0.0)
      break;
    marked.push_back(c);
    sum += squared[c];
    if (sum >= target)
      break;
  }
  std::sort(marked.begin(), marked.end());
  return marked;
}

AdaptHistory adaptive_loop(const Mesh& initial, const ProblemSpec& problem,
                           const AdaptConfig& config, const IterationObserver& observer)
{
  if (!(config.theta > 0.0 && config.theta <= 1.0))
    throw ParameterError("bulk fraction theta must lie in (0, 1]");
  if (config.k < 0)
    throw ParameterError("polynomial degree k must be non-negative");

  AdaptHistory history;
  Mesh mesh = initial;
  for (std::size_t iter = 0;; ++iter) {
    std::vector<double> indicators;
    auto collect = [&](const IterationResult& r) {
      indicators.resize(r.report.cells.size());
      for (std::size_t c = 0; c < indicators.size(); ++c)
        indicators[c] = std::sqrt(r.report.cells[c].indicator_squared());
      if (observer)
        observer(r);
    };
    try {
      history.records.push_back(evaluate_iteration(mesh, problem, config.k, iter,
                                                   config.quadrature_bump, config.exec, collect));
    } catch (const SolverError& e) {
      throw SolverError("iteration " + std::to_string(iter) + ": " + e.what(), e.residual());
    }

    const IterationRecord& rec = history.records.back();
    if (rec.dofs >= config.max_dofs || iter >= config.max_iters || !(rec.eta_total > 0.0))
      break;
    const double squared_sum = std::accumulate(indicators.begin(), indicators.end(), 0.0,
                                               [](double s, double v) { return s + v * v; });
    if (!(squared_sum > 0.0))
      break;
    mesh = refine_nvb(mesh, dorfler_mark(indicators, config.theta));
  }
  return history;
}

double fit_rate(std::span<const double> dofs, std::span<const double> values)
{
  if (dofs.size() != values.size())
    throw ParameterError("fit_rate: size mismatch");
  if (dofs.size() < 2)
    throw ParameterError("fit_rate needs at least two points");
  const std::size_t n = dofs.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(dofs[i] > 0.0 && values[i] > 0.0))
      throw ParameterError("fit_rate needs positive data");
    mx += std::log(dofs[i]);
    my += std::log(values[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(dofs[i]) - mx;
    sxy += dx * (std::log(values[i]) - my);
    sxx += dx * dx;
  }
  if (!(sxx > 0.0))
    throw ParameterError("fit_rate needs distinct dof counts");
  return sxy / sxx;
}

double fit_rate(const AdaptHistory& history, std::size_t window)
{
  const std::size_t n = history.records.size();
  const std::size_t first = (window == 0 || window >= n) ? 0 : n - window;
  std::vector<double> dofs, errors;
  for (std::size_t i = first; i < n; ++i) {
    dofs.push_back(static_cast<double>(history.records[i].dofs));
    errors.push_back(history.records[i].energy_error);
  }
  return fit_rate(dofs, errors);
}

} // namespace hho
