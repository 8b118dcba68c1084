#pragma once

#include <string>
#include <vector>

#include "hho/config.hpp"
#include "hho/mesh.hpp"
#include "hho/problem.hpp"

namespace hho {

/// Smooth solution sin(pi x) sin(pi y) on (-1,1)^2 with A = 1.
ProblemSpec sine_problem();

/// r^{2/3} sin(2 theta / 3) on the L-shaped domain, f = 0, A = 1.
ProblemSpec lshape_problem();

inline constexpr double kellogg_default_alpha = 0.1;
inline constexpr double kellogg_default_ratio = 161.4476387975881;

/// Angular profile phi of the checkerboard solution u = r^alpha phi(theta),
/// with coefficient `ratio` in the first and third quadrants and 1 elsewhere.
/// Quadrant-wise cosines whose phases (rho, sigma) solve the transmission
/// conditions by Newton iteration.
class KelloggProfile {
public:
  explicit KelloggProfile(double alpha = kellogg_default_alpha,
                          double ratio = kellogg_default_ratio);

  double alpha() const { return alpha_; }
  double ratio() const { return ratio_; }
  double rho() const { return rho_; }
  double sigma() const { return sigma_; }

  /// theta in [0, 2 pi).
  double value(double theta) const;
  double derivative(double theta) const;
  /// Coefficient of the quadrant containing theta.
  double coefficient(double theta) const;

  /// Largest jump of phi and of A phi' over the four half-axes (flux jumps
  /// relative to max(1, |A phi'|)).
  double transmission_residual() const;

private:
  double branch_value(int quadrant, double theta) const;
  double branch_derivative(int quadrant, double theta) const;

  double alpha_;
  double ratio_;
  double rho_ = 0.0;
  double sigma_ = 0.0;
};

/// Checkerboard problem on (-1,1)^2, f = 0, g_D = trace of the exact solution.
/// Region 1 (xy > 0) carries the coefficient `ratio`, region 0 carries 1.
ProblemSpec kellogg_problem(const KelloggProfile& profile);

/// Problem from a config map: keys f, g_D, g_N, u, u_x, u_y (expressions in
/// x, y), A (regions 0 and those in `regions`) and A.<region>. Missing f, g_N default to 0, g_D
/// to u (or 0), A to 1. With u but no gradient, the gradient is taken by
/// central differences. Throws ParameterError on bad expressions.
ProblemSpec custom_problem(const ConfigMap& keys, const std::vector<int>& regions = {});

struct Case {
  std::string name;
  ProblemSpec problem;
  Mesh mesh;
  /// Extra quadrature exactness for the energy error.
  int quadrature_bump = 0;
};

/// ex1 (square, default n = 4: 32 cells), ex2 (L-shape, default n = 4: 96
/// cells), ex3 (checkerboard square, default n = 4: 32 cells). n <= 0 picks
/// the default. Throws ParameterError for an unknown name.
Case builtin_case(const std::string& name, int n = 0);

/// Structured mesh of a built-in case with exactly `cells` cells.
/// Throws ParameterError when no subdivision count matches.
Mesh builtin_mesh_with_cells(const std::string& name, std::size_t cells);

} // namespace hho
