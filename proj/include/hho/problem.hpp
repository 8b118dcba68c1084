#pragma once

#include <functional>
#include <map>
#include <optional>

#include "hho/basis.hpp"
#include "hho/mesh.hpp"

namespace hho {

using VectorField = std::function<Eigen::Vector2d(const Point&)>;

struct ExactSolution {
  ScalarField value;
  VectorField gradient;
};

/// -div(A grad u) = f in the domain, u = g_D on the Dirichlet boundary,
/// A grad u . n = g_N on the Neumann boundary; A is a positive constant per
/// mesh region.
struct ProblemSpec {
  std::map<int, double> diffusion;
  ScalarField load;
  ScalarField dirichlet;
  ScalarField neumann;
  /// Gradient of an extension of g_D; used for tangential derivatives of the
  /// Dirichlet data. Falls back to finite differences of g_D when empty.
  VectorField dirichlet_gradient;
  std::optional<ExactSolution> exact;
  /// Point where the exact solution is singular; cells having it as a vertex
  /// get a graded quadrature in error integrals.
  std::optional<Point> singular_point;

  /// Throws SpecError when the region has no coefficient or it is not positive.
  double diffusion_of(int region) const;
};

/// Checks coefficients for every region of the mesh and the presence of a
/// Dirichlet face. Throws SpecError.
void validate(const ProblemSpec& problem, const Mesh& mesh);

} // namespace hho
