#include "hho/basis.hpp"

#include <algorithm>

#include <cmath>

#include "hho/errors.hpp"

namespace hho {

CellBasis::CellBasis(const TriangleGeometry& cell, int degree) : cell_(cell), degree_(degree)
{
  scale_ = 0.0;
  for (const Point& v : cell.vertices)
    scale_ = std::max(scale_, (v - cell.centroid).norm());
  if (degree < 0)
    throw ParameterError("cell basis degree must be non-negative");
  if (!(cell.area > 0.0) || !(cell.diameter > 0.0))
    throw GeometryError("cell basis on a degenerate cell");

  for (int d = 0; d <= degree; ++d)
    for (int b = 0; b <= d; ++b)
      exponents_.emplace_back(d - b, b);
  const int n = size();

  // Gram matrix is computed exactly: products have degree <= 2 * degree.
  const QuadratureRule rule = map_to_cell(cell_quadrature(2 * degree), cell);
  const auto nq = static_cast<Eigen::Index>(rule.size());
  Eigen::MatrixXd samples(nq, n);
  for (Eigen::Index q = 0; q < nq; ++q)
    samples.row(q) = std::sqrt(rule.weights[q]) * monomials(rule.points[q]).transpose();

  // Column i of `basis` holds the monomial coefficients of function i.
  Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd v = samples.col(j);
    Eigen::VectorXd c = Eigen::VectorXd::Unit(n, j);
    const double scale = v.norm();
    v /= scale;
    c /= scale;
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i < j; ++i) {
        const double r = samples.col(i).dot(v);
        v -= r * samples.col(i);
        c -= r * basis.col(i);
      }
    const double norm = v.norm();
    if (!(norm > 1e-14))
      throw GeometryError("cell basis orthonormalization broke down");
    samples.col(j) = v / norm;
    basis.col(j) = c / norm;
  }
  coeffs_ = basis.transpose();

  // One Cholesky pass on the Gram matrix of the functions as they are
  // evaluated (through monomial coefficients) removes the residual loss of
  // orthogonality at high degree.
  Eigen::MatrixXd evaluated(nq, n);
  for (Eigen::Index q = 0; q < nq; ++q)
    evaluated.row(q) = std::sqrt(rule.weights[q]) * values(rule.points[q]).transpose();
  const Eigen::MatrixXd gram = evaluated.transpose() * evaluated;
  const Eigen::LLT<Eigen::MatrixXd> llt(gram);
  if (llt.info() != Eigen::Success)
    throw GeometryError("cell basis orthonormalization broke down");
  coeffs_ = llt.matrixL().solve(coeffs_);
}

void CellBasis::powers(const Point& x, Eigen::VectorXd& px, Eigen::VectorXd& py) const
{
  const double dx = (x.x() - cell_.centroid.x()) / scale_;
  const double dy = (x.y() - cell_.centroid.y()) / scale_;
  px.resize(degree_ + 1);
  py.resize(degree_ + 1);
  px[0] = py[0] = 1.0;
  for (int i = 1; i <= degree_; ++i) {
    px[i] = px[i - 1] * dx;
    py[i] = py[i - 1] * dy;
  }
}

Eigen::VectorXd CellBasis::monomials(const Point& x) const
{
  Eigen::VectorXd px, py;
  powers(x, px, py);
  Eigen::VectorXd m(size());
  for (int i = 0; i < size(); ++i)
    m[i] = px[exponents_[i].first] * py[exponents_[i].second];
  return m;
}

Eigen::VectorXd CellBasis::values(const Point& x) const { return coeffs_ * monomials(x); }

Eigen::MatrixX2d CellBasis::gradients(const Point& x) const
{
  const double h = scale_;
  Eigen::VectorXd px, py;
  powers(x, px, py);
  Eigen::MatrixX2d m(size(), 2);
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = exponents_[i];
    m(i, 0) = a > 0 ? a * px[a - 1] * py[b] / h : 0.0;
    m(i, 1) = b > 0 ? b * px[a] * py[b - 1] / h : 0.0;
  }
  return coeffs_ * m;
}

Eigen::VectorXd CellBasis::laplacians(const Point& x) const
{
  const double h = scale_;
  Eigen::VectorXd px, py;
  powers(x, px, py);
  Eigen::VectorXd m(size());
  for (int i = 0; i < size(); ++i) {
    const auto [a, b] = exponents_[i];
    const double dxx = a > 1 ? a * (a - 1) * px[a - 2] * py[b] : 0.0;
    const double dyy = b > 1 ? b * (b - 1) * px[a] * py[b - 2] : 0.0;
    m[i] = (dxx + dyy) / (h * h);
  }
  return coeffs_ * m;
}

FaceBasis::FaceBasis(const SegmentGeometry& face, int degree) : face_(face), degree_(degree)
{
  if (degree < 0)
    throw ParameterError("face basis degree must be non-negative");
  if (!(face.length > 0.0))
    throw GeometryError("face basis on a zero-length face");
}

Eigen::VectorXd FaceBasis::values(double t) const
{
  const double s = 2.0 * t - 1.0;
  Eigen::VectorXd p(size());
  p[0] = 1.0;
  if (degree_ >= 1)
    p[1] = s;
  for (int j = 2; j <= degree_; ++j)
    p[j] = ((2.0 * j - 1.0) * s * p[j - 1] - (j - 1.0) * p[j - 2]) / j;
  for (int j = 0; j <= degree_; ++j)
    p[j] *= std::sqrt((2.0 * j + 1.0) / face_.length);
  return p;
}

Eigen::VectorXd FaceBasis::tangential_derivatives(double t) const
{
  const double s = 2.0 * t - 1.0;
  Eigen::VectorXd p(size());
  Eigen::VectorXd dp(size());
  p[0] = 1.0;
  dp[0] = 0.0;
  if (degree_ >= 1) {
    p[1] = s;
    dp[1] = 1.0;
  }
  for (int j = 2; j <= degree_; ++j) {
    p[j] = ((2.0 * j - 1.0) * s * p[j - 1] - (j - 1.0) * p[j - 2]) / j;
    dp[j] = dp[j - 2] + (2.0 * j - 1.0) * p[j - 1];
  }
  // ds/d(arc length) = 2 / |F|
  for (int j = 0; j <= degree_; ++j)
    dp[j] *= std::sqrt((2.0 * j + 1.0) / face_.length) * 2.0 / face_.length;
  return dp;
}

Eigen::VectorXd l2_project(const CellBasis& basis, const ScalarField& f, int exactness)
{
  const QuadratureRule rule = map_to_cell(cell_quadrature(exactness), basis.geometry());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  for (std::size_t q = 0; q < rule.size(); ++q)
    c += rule.weights[q] * f(rule.points[q]) * basis.values(rule.points[q]);
  return c;
}

Eigen::VectorXd l2_project(const FaceBasis& basis, const ScalarField& f, int exactness)
{
  const LineQuadrature rule = map_to_face(face_quadrature(exactness), basis.geometry());
  Eigen::VectorXd c = Eigen::VectorXd::Zero(basis.size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q];
    c += rule.weights[q] * f(basis.geometry().at(t)) * basis.values(t);
  }
  return c;
}

double evaluate(const CellBasis& basis, const Eigen::VectorXd& coeffs, const Point& x)
{
  return coeffs.dot(basis.values(x));
}

Eigen::Vector2d evaluate_gradient(const CellBasis& basis, const Eigen::VectorXd& coeffs,
                                  const Point& x)
{
  return basis.gradients(x).transpose() * coeffs;
}

double evaluate(const FaceBasis& basis, const Eigen::VectorXd& coeffs, double t)
{
  return coeffs.dot(basis.values(t));
}

} // namespace hho
