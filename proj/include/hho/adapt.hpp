#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "hho/estimator.hpp"
#include "hho/mesh.hpp"
#include "hho/parallel.hpp"
#include "hho/problem.hpp"
#include "hho/solver.hpp"

namespace hho {

/// One solve + estimate on one mesh. energy_error and effectivity are NaN
/// without an exact solution.
struct IterationRecord {
  std::size_t iter = 0;
  std::size_t cells = 0;
  std::size_t dofs = 0;
  double energy_error = std::numeric_limits<double>::quiet_NaN();
  double eta_total = 0.0;
  double eta_total_with_normal = 0.0;
  double eta_res = 0.0;
  double eta_sta = 0.0;
  double eta_nor = 0.0;
  double eta_tan = 0.0;
  double osc = 0.0;
  double effectivity = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 4> contributions{};
};

struct AdaptConfig {
  int k = 1;
  double theta = 0.4;
  std::size_t max_dofs = 200000;
  std::size_t max_iters = 1000;
  int quadrature_bump = 0;
  Execution exec = Execution::parallel;
};

struct AdaptHistory {
  std::vector<IterationRecord> records;
};

/// Everything produced on one mesh, handed to observers.
struct IterationResult {
  const Mesh& mesh;
  const HhoSolution& solution;
  const EstimatorReport& report;
  const IterationRecord& record;
};

using IterationObserver = std::function<void(const IterationResult&)>;

/// Solves, estimates and (with an exact solution) measures the error on one mesh.
IterationRecord evaluate_iteration(const Mesh& mesh, const ProblemSpec& problem, int k,
                                   std::size_t iter, int quadrature_bump, Execution exec,
                                   const IterationObserver& observer = {});

/// Greedy bulk marking on eta^2: cells sorted by decreasing eta_K^2 (ties by
/// increasing id) are taken until their sum reaches theta * sum eta_K^2.
/// Returns the marked ids in ascending order. Throws ParameterError for theta
/// outside (0, 1] or negative entries, MarkingError when all entries vanish.
std::vector<std::size_t> dorfler_mark(std::span<const double> eta, double theta);

/// SOLVE -> ESTIMATE -> MARK -> REFINE until dofs >= max_dofs, max_iters
/// refinements, or a vanishing estimator. Marks with the per-cell
/// sqrt(eta_res^2 + eta_sta^2 + eta_nor^2 + eta_tan^2). Solver failures are
/// rethrown with the iteration index in the message.
AdaptHistory adaptive_loop(const Mesh& initial, const ProblemSpec& problem,
                           const AdaptConfig& config, const IterationObserver& observer = {});

/// Least-squares slope of log(value) against log(dofs).
/// Throws ParameterError with fewer than two points or non-positive data.
double fit_rate(std::span<const double> dofs, std::span<const double> values);

/// Slope of the energy error over the last `window` records (0: all).
double fit_rate(const AdaptHistory& history, std::size_t window = 0);

} // namespace hho
