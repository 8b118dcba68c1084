#pragma once

#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "hho/mesh.hpp"
#include "hho/quadrature.hpp"

namespace hho {

using ScalarField = std::function<double(const Point&)>;

/// L2(K)-orthonormal basis of P^degree(K).
///
/// Built by modified Gram-Schmidt (two passes) on the monomials
/// ((x - x_K) / r_K)^a ((y - y_K) / r_K)^b ordered by total degree, with r_K
/// the largest centroid-to-vertex distance, followed by one Cholesky
/// re-orthonormalization. The
/// first dimension(m) functions span P^m(K) for every m <= degree. The first
/// function is the constant 1 / sqrt(|K|).
class CellBasis {
public:
  CellBasis(const TriangleGeometry& cell, int degree);

  static int dimension(int degree) { return (degree + 1) * (degree + 2) / 2; }

  int degree() const { return degree_; }
  int size() const { return dimension(degree_); }
  const TriangleGeometry& geometry() const { return cell_; }

  Eigen::VectorXd values(const Point& x) const;
  /// Row i holds the gradient of basis function i.
  Eigen::MatrixX2d gradients(const Point& x) const;
  Eigen::VectorXd laplacians(const Point& x) const;

  /// Coefficients of basis function i in the scaled monomials (row i).
  const Eigen::MatrixXd& monomial_coefficients() const { return coeffs_; }

private:
  void powers(const Point& x, Eigen::VectorXd& px, Eigen::VectorXd& py) const;
  Eigen::VectorXd monomials(const Point& x) const;

  TriangleGeometry cell_;
  int degree_;
  double scale_ = 1.0;
  std::vector<std::pair<int, int>> exponents_;
  Eigen::MatrixXd coeffs_;
};

/// L2(F)-orthonormal basis of P^degree(F): scaled Legendre polynomials in the
/// face parameter t in [0, 1] (from face vertex 0 to vertex 1). This is the
/// result of Gram-Schmidt on the midpoint-centred monomials.
class FaceBasis {
public:
  FaceBasis(const SegmentGeometry& face, int degree);

  int degree() const { return degree_; }
  int size() const { return degree_ + 1; }
  const SegmentGeometry& geometry() const { return face_; }

  Eigen::VectorXd values(double t) const;
  /// Derivatives with respect to arc length along face.tangent().
  Eigen::VectorXd tangential_derivatives(double t) const;

private:
  SegmentGeometry face_;
  int degree_;
};

/// L2 projection onto the span of an orthonormal cell basis.
Eigen::VectorXd l2_project(const CellBasis& basis, const ScalarField& f, int exactness);
Eigen::VectorXd l2_project(const FaceBasis& basis, const ScalarField& f, int exactness);

/// Evaluates sum_i coeffs[i] * phi_i(x).
double evaluate(const CellBasis& basis, const Eigen::VectorXd& coeffs, const Point& x);
Eigen::Vector2d evaluate_gradient(const CellBasis& basis, const Eigen::VectorXd& coeffs,
                                  const Point& x);
double evaluate(const FaceBasis& basis, const Eigen::VectorXd& coeffs, double t);

} // namespace hho
