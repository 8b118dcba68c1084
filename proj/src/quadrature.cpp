#include "hho/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <utility>
#include <numbers>
#include <string>

#include "hho/errors.hpp"

namespace hho {

LineQuadrature gauss_legendre(int num_points)
{
  if (num_points < 1)
    throw ParameterError("Gauss-Legendre rule needs at least one point");
  const int n = num_points;
  // P_n(x) and P_n'(x) by the three-term recurrence
  auto legendre = [n](double x) {
    double p0 = 1.0;
    double p1 = x;
    for (int j = 2; j <= n; ++j) {
      const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
      p0 = p1;
      p1 = p2;
    }
    return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
  };

  LineQuadrature rule;
  rule.points.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre(x);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16)
        break;
    }
    const double dp = legendre(x).second;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1)
    rule.points[n / 2] = 0.0;
  return rule;
}

namespace {

LineQuadrature unit_interval_rule(int num_points)
{
  LineQuadrature rule = gauss_legendre(num_points);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    rule.points[i] = 0.5 * (rule.points[i] + 1.0);
    rule.weights[i] *= 0.5;
  }
  return rule;
}

QuadratureRule collapsed_triangle_rule(int exactness)
{
  // (u, v) in [0,1]^2 -> (u, v (1 - u)); Jacobian (1 - u) adds one degree in u.
  const LineQuadrature g = unit_interval_rule((exactness + 3) / 2);
  QuadratureRule rule;
  for (std::size_t i = 0; i < g.size(); ++i)
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double u = g.points[i];
      const double v = g.points[j];
      rule.points.emplace_back(u, v * (1.0 - u));
      rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
    }
  return rule;
}

void check_exactness(int exactness)
{
  if (exactness < 0 || exactness > max_quadrature_exactness)
    throw ParameterError("quadrature exactness " + std::to_string(exactness) +
                         " outside supported range [0, " +
                         std::to_string(max_quadrature_exactness) + "]");
}

} // namespace

const QuadratureRule& cell_quadrature(int exactness)
{
  check_exactness(exactness);
  static const std::vector<QuadratureRule> table = [] {
    std::vector<QuadratureRule> t;
    for (int e = 0; e <= max_quadrature_exactness; ++e)
      t.push_back(collapsed_triangle_rule(e));
    return t;
  }();
  return table[exactness];
}

const LineQuadrature& face_quadrature(int exactness)
{
  check_exactness(exactness);
  static const std::vector<LineQuadrature> table = [] {
    std::vector<LineQuadrature> t;
    for (int e = 0; e <= max_quadrature_exactness; ++e)
      t.push_back(unit_interval_rule(e / 2 + 1));
    return t;
  }();
  return table[exactness];
}

QuadratureRule map_to_cell(const QuadratureRule& reference, const TriangleGeometry& cell)
{
  const Point& p0 = cell.vertices[0];
  const Point e1 = cell.vertices[1] - p0;
  const Point e2 = cell.vertices[2] - p0;
  const double jac = 2.0 * cell.area;
  QuadratureRule rule;
  rule.points.reserve(reference.size());
  rule.weights.reserve(reference.size());
  for (std::size_t q = 0; q < reference.size(); ++q) {
    const Point& xi = reference.points[q];
    rule.points.push_back(p0 + xi.x() * e1 + xi.y() * e2);
    rule.weights.push_back(reference.weights[q] * jac);
  }
  return rule;
}

LineQuadrature map_to_face(const LineQuadrature& reference, const SegmentGeometry& face)
{
  LineQuadrature rule = reference;
  for (double& w : rule.weights)
    w *= face.length;
  return rule;
}

QuadratureRule graded_cell_quadrature(const TriangleGeometry& cell, int apex, int exactness,
                                      int layers, double ratio)
{
  check_exactness(exactness);
  const Point& a = cell.vertices[apex];
  const Point& b = cell.vertices[(apex + 1) % 3];
  const Point& c = cell.vertices[(apex + 2) % 3];
  // x = a + s ((b - a) + t (c - b)), s, t in [0,1]; Jacobian 2|K| s.
  // Per layer the integrand is analytic in (s, t) but its singularities sit
  // close to the unit interval in both variables, so the rule needs more
  // points than the polynomial exactness alone asks for.
  const LineQuadrature& g = face_quadrature(std::max(exactness + 1, 31));
  QuadratureRule rule;
  double outer = 1.0;
  for (int layer = 0; layer <= layers; ++layer) {
    const double inner = layer == layers ? 0.0 : outer * ratio;
    const double width = outer - inner;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double s = inner + width * g.points[i];
      for (std::size_t j = 0; j < g.size(); ++j) {
        const double t = g.points[j];
        rule.points.push_back(a + s * ((b - a) + t * (c - b)));
        rule.weights.push_back(g.weights[i] * width * g.weights[j] * 2.0 * cell.area * s);
      }
    }
    outer = inner;
  }
  return rule;
}

} // namespace hho
