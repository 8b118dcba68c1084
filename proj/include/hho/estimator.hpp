#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "hho/mesh.hpp"
#include "hho/parallel.hpp"
#include "hho/problem.hpp"
#include "hho/solver.hpp"

namespace hho {

/// Error indicators and data oscillations of one cell.
struct CellEstimate {
  double eta_res = 0.0;
  double eta_sta = 0.0;
  double eta_nor = 0.0;
  double eta_tan = 0.0;
  double osc_f = 0.0;
  double osc_gN = 0.0;
  double osc_gD = 0.0;

  /// O_K,dat = O_K(f) + O_K(g_N) + O_K(g_D).
  double osc() const { return osc_f + osc_gN + osc_gD; }
  /// eta_res^2 + eta_sta^2 + eta_nor^2 + eta_tan^2 (the marking quantity).
  double indicator_squared() const
  {
    return eta_res * eta_res + eta_sta * eta_sta + eta_nor * eta_nor + eta_tan * eta_tan;
  }
};

struct EstimatorReport {
  int k = 0;
  std::vector<CellEstimate> cells;
  /// Root-sum-squares over cells.
  double eta_res = 0.0;
  double eta_sta = 0.0;
  double eta_nor = 0.0;
  double eta_tan = 0.0;
  double osc = 0.0;
  /// Upper-bound estimator with the min(sum k eta_sta^2, sum eta_nor^2) term.
  double eta_total = 0.0;
  /// Variant that always includes sum eta_nor^2 instead of the min term.
  double eta_total_with_normal = 0.0;
  /// 100 eta_X / (eta_res + eta_sta + eta_nor + eta_tan), order res, sta, nor, tan.
  std::array<double, 4> contributions{};
};

/// Face-basis coefficients of
///   phi_{K,F} = -A_K grad R_K(u_K) . n_K + A_K ((k+1)^2 / h_K) Pi_F^k(u_K|_F - u_F).
/// Throws StructuralError when the face is not a face of the cell.
Eigen::VectorXd numerical_flux(const Mesh& mesh, const ProblemSpec& problem,
                               const HhoSolution& solution, std::size_t cell, std::size_t face);

/// Largest flux imbalance ||phi_{K1,F} + phi_{K2,F}||_F (interfaces) or
/// ||phi_{K,F} + Pi_F^k g_N||_F (Neumann faces), divided by ||A^{1/2} grad R(u_h)||.
double conservation_residual(const Mesh& mesh, const ProblemSpec& problem,
                             const HhoSolution& solution);

/// sqrt( sum_K (eta_res^2 + eta_tan^2 + eta_sta^2 + O_dat^2)
///       + min(sum_K k eta_sta^2, sum_K eta_nor^2) ).
double total_estimator(const std::vector<CellEstimate>& cells, int k);

/// Evaluates all indicators. Interface terms are computed once per face.
EstimatorReport estimate(const Mesh& mesh, const ProblemSpec& problem, const HhoSolution& solution,
                         Execution exec = Execution::parallel);

/// Fills the aggregates, totals and contributions of a report from its cells.
void summarize(EstimatorReport& report);

/// Extra exactness of the energy-error quadrature over data_exactness(k).
inline constexpr int error_exactness_margin = 6;

/// sqrt( sum_K A_K { ||grad(u - u_K)||_K^2 + S_dK(u_K, u_K) } ). Quadrature
/// exactness data_exactness(k) + error_exactness_margin + bump; cells with the
/// problem's singular point as a vertex use a radially graded rule. Throws
/// SpecError without an exact solution.
double energy_error(const Mesh& mesh, const ProblemSpec& problem, const HhoSolution& solution,
                    int quadrature_bump = 0, Execution exec = Execution::parallel);

} // namespace hho
