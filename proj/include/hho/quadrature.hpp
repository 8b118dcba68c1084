#pragma once

#include <vector>

#include "hho/mesh.hpp"

namespace hho {

/// Highest polynomial exactness offered by cell_quadrature / face_quadrature.
inline constexpr int max_quadrature_exactness = 60;

/// Points and positive weights. Reference rules live on the triangle
/// {(0,0),(1,0),(0,1)} (weights sum to 1/2); physical rules on a cell.
struct QuadratureRule {
  std::vector<Point> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Reference rule on [0, 1] (weights sum to 1), or a physical rule on a face
/// where `points` are the parameters t of SegmentGeometry::at and the weights
/// include the face length.
struct LineQuadrature {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
};

/// Gauss-Legendre nodes and weights on [-1, 1].
LineQuadrature gauss_legendre(int num_points);

/// Rule on the reference triangle exact for total degree <= exactness
/// (collapsed tensor-product Gauss rule). Throws ParameterError above
/// max_quadrature_exactness or for negative input.
const QuadratureRule& cell_quadrature(int exactness);

/// Gauss rule on [0, 1] exact for degree <= exactness.
const LineQuadrature& face_quadrature(int exactness);

QuadratureRule map_to_cell(const QuadratureRule& reference, const TriangleGeometry& cell);
LineQuadrature map_to_face(const LineQuadrature& reference, const SegmentGeometry& face);

/// Cell rule collapsed at `apex` with geometrically graded radial layers, for
/// integrands with a point singularity at a cell vertex. `layers` layers of
/// ratio `ratio` each; `exactness` per layer.
QuadratureRule graded_cell_quadrature(const TriangleGeometry& cell, int apex, int exactness,
                                      int layers = 60, double ratio = 0.15);

} // namespace hho
