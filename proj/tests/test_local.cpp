#include "doctest.h"

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "hho/errors.hpp"
#include "hho/local.hpp"
#include "hho/quadrature.hpp"

using namespace hho;

namespace {

Mesh single(Point a, Point b, Point c)
{
  BoundaryLabels labels;
  for (const auto& [i, j] : {EdgeKey{0, 1}, EdgeKey{1, 2}, EdgeKey{0, 2}})
    labels[make_edge_key(i, j)] = BoundaryKind::dirichlet;
  return build_connectivity({a, b, c}, {{0, 1, 2}}, labels, {0});
}

Mesh reference() { return single({0, 0}, {1, 0}, {0, 1}); }

Eigen::VectorXd random_vector(int n, unsigned seed)
{
  std::mt19937 gen(seed);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i)
    v(i) = dist(gen);
  return v;
}

// Reconstruction assembled independently with exactness-20 quadrature and
// solved as an overdetermined least-squares system (stiffness rows + mean row).
Eigen::VectorXd reconstruction_oracle(const LocalSpaces& s, const Eigen::VectorXd& v)
{
  const int nc = s.cell_size();
  const LocalDofs d = LocalDofs::split(s, v);
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(nc, nc);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(nc);
  const QuadratureRule cr = map_to_cell(cell_quadrature(20), s.geometry);
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(nc);
  double vmean = 0.0;
  for (std::size_t q = 0; q < cr.size(); ++q) {
    const Eigen::MatrixX2d g = s.cell.gradients(cr.points[q]);
    stiff += cr.weights[q] * g * g.transpose();
    rhs += cr.weights[q] * g * evaluate_gradient(s.cell, d.cell, cr.points[q]);
    mean += cr.weights[q] * s.cell.values(cr.points[q]);
    vmean += cr.weights[q] * evaluate(s.cell, d.cell, cr.points[q]);
  }
  for (int f = 0; f < 3; ++f) {
    const LineQuadrature fr = map_to_face(face_quadrature(20), s.faces[f].geometry());
    for (std::size_t q = 0; q < fr.size(); ++q) {
      const Point x = s.faces[f].geometry().at(fr.points[q]);
      const double jump =
          evaluate(s.cell, d.cell, x) - evaluate(s.faces[f], d.faces[f], fr.points[q]);
      rhs -= fr.weights[q] * jump * (s.cell.gradients(x) * s.normals[f]);
    }
  }
  Eigen::MatrixXd a(nc + 1, nc);
  a.topRows(nc) = stiff;
  a.row(nc) = mean.transpose();
  Eigen::VectorXd b(nc + 1);
  b.head(nc) = rhs;
  b(nc) = vmean;
  return a.colPivHouseholderQr().solve(b);
}

// Local system assembled independently from the oracle reconstruction.
Eigen::MatrixXd system_oracle(const LocalSpaces& s)
{
  const int n = s.size();
  Eigen::MatrixXd r(s.cell_size(), n);
  for (int j = 0; j < n; ++j)
    r.col(j) = reconstruction_oracle(s, Eigen::VectorXd::Unit(n, j));
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(s.cell_size(), s.cell_size());
  const QuadratureRule cr = map_to_cell(cell_quadrature(20), s.geometry);
  for (std::size_t q = 0; q < cr.size(); ++q) {
    const Eigen::MatrixX2d g = s.cell.gradients(cr.points[q]);
    stiff += cr.weights[q] * g * g.transpose();
  }
  // stabilization through pointwise face traces and a face mass projection
  Eigen::MatrixXd stab = Eigen::MatrixXd::Zero(n, n);
  for (int f = 0; f < 3; ++f) {
    const LineQuadrature fr = map_to_face(face_quadrature(20), s.faces[f].geometry());
    Eigen::MatrixXd proj = Eigen::MatrixXd::Zero(s.face_size(), n);
    for (std::size_t q = 0; q < fr.size(); ++q) {
      const Point x = s.faces[f].geometry().at(fr.points[q]);
      Eigen::RowVectorXd trace = Eigen::RowVectorXd::Zero(n);
      trace.head(s.cell_size()) = -s.cell.values(x).transpose();
      trace.segment(s.face_offset(f), s.face_size()) = s.faces[f].values(fr.points[q]).transpose();
      proj += fr.weights[q] * s.faces[f].values(fr.points[q]) * trace;
    }
    stab += proj.transpose() * proj;
  }
  stab *= (s.k + 1.0) * (s.k + 1.0) / s.geometry.diameter;
  return r.transpose() * stiff * r + stab;
}

Eigen::VectorXd constant_pair(const LocalSpaces& s, double c)
{
  const ScalarField one = [c](const Point&) { return c; };
  return reduce_interpolate(s, one, s.k + 1).stacked();
}

} // namespace

TEST_CASE("reconstruction matches a dense least-squares oracle")
{
  const Mesh m = reference();
  for (int k : {0, 1, 2, 4}) {
    const LocalSpaces s(m, 0, k);
    const Eigen::MatrixXd r = build_reconstruction(s);
    const Eigen::VectorXd v = random_vector(s.size(), 7 + k);
    const Eigen::VectorXd oracle = reconstruction_oracle(s, v);
    CAPTURE(k);
    CHECK((r * v - oracle).norm() <= 1e-11 * oracle.norm());
  }
}

TEST_CASE("reconstruction satisfies the variational identity and the mean constraint")
{
  const Mesh m = single({0.2, 0.1}, {0.5, 0.15}, {0.3, 0.4});
  for (int k = 0; k <= 3; ++k) {
    const LocalSpaces s(m, 0, k);
    const Eigen::VectorXd v = random_vector(s.size(), 11 + k);
    const Eigen::VectorXd rv = build_reconstruction(s) * v;
    const LocalDofs d = LocalDofs::split(s, v);
    // (grad R, grad w) - (grad v_K, grad w) + (v_K - v_F, grad w . n) = 0 for all w
    const Eigen::MatrixXd stiff = cell_stiffness(s);
    Eigen::VectorXd residual = stiff * (rv - d.cell);
    for (int f = 0; f < 3; ++f) {
      const LineQuadrature fr = map_to_face(face_quadrature(2 * k + 4), s.faces[f].geometry());
      for (std::size_t q = 0; q < fr.size(); ++q) {
        const Point x = s.faces[f].geometry().at(fr.points[q]);
        const double jump =
            evaluate(s.cell, d.cell, x) - evaluate(s.faces[f], d.faces[f], fr.points[q]);
        residual += fr.weights[q] * jump * (s.cell.gradients(x) * s.normals[f]);
      }
    }
    CAPTURE(k);
    CHECK(residual.norm() <= 1e-11 * (stiff * rv).norm());
    // with an orthonormal basis the mean is carried by the first coefficient
    CHECK(rv(0) == doctest::Approx(d.cell(0)).epsilon(1e-12));
  }
}

TEST_CASE("polynomial consistency")
{
  const Mesh m = single({-0.3, 0.1}, {0.4, -0.2}, {0.1, 0.6});
  for (int k = 0; k <= 4; ++k) {
    const LocalSpaces s(m, 0, k);
    const int deg = k + 1;
    const ScalarField w = [deg](const Point& x) {
      return std::pow(x.x() + 0.3, deg) - 2.0 * std::pow(x.y(), deg - 1) * x.x() + 0.5;
    };
    const Eigen::VectorXd iw = reduce_interpolate(s, w, 2 * deg + 2).stacked();
    const Eigen::VectorXd rw = build_reconstruction(s) * iw;
    CAPTURE(k);
    CHECK((rw - iw.head(s.cell_size())).norm() <= 1e-10 * iw.head(s.cell_size()).norm());
    CHECK(stabilization_energy(s, iw) <= 1e-20 * iw.squaredNorm());
  }
}

TEST_CASE("local system: symmetry, positivity and kernel")
{
  const Mesh m = reference();
  for (int k = 0; k <= 3; ++k) {
    const LocalSpaces s(m, 0, k);
    const LocalOperators ops = build_local_system(s, 2.5);
    const Eigen::MatrixXd& a = ops.system;
    CHECK((a - a.transpose()).norm() <= 1e-12 * a.norm());
    CHECK((ops.stabilization - ops.stabilization.transpose()).norm() <=
          1e-12 * ops.stabilization.norm());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    const Eigen::VectorXd ev = eig.eigenvalues();
    CAPTURE(k);
    CHECK(ev(0) >= -1e-12 * ev(ev.size() - 1));
    CHECK(std::abs(ev(0)) <= 1e-12 * ev(ev.size() - 1));
    CHECK(ev(1) > 1e-8 * ev(ev.size() - 1)); // one-dimensional kernel
    const Eigen::VectorXd c = constant_pair(s, 1.0);
    CHECK((a * c).norm() <= 1e-12 * a.norm() * c.norm());
  }
  CHECK_THROWS_AS(build_local_system(LocalSpaces(m, 0, 1), 0.0), ParameterError);
}

TEST_CASE("local system matches an independent dense assembly")
{
  const Mesh m = reference();
  const LocalSpaces s(m, 0, 1);
  const Eigen::MatrixXd a = build_local_system(s, 1.0).system;
  const Eigen::MatrixXd oracle = system_oracle(s);
  CHECK((a - oracle).norm() <= 1e-11 * oracle.norm());
  const Eigen::VectorXd ev = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a).eigenvalues();
  const Eigen::VectorXd eo =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(oracle).eigenvalues();
  CHECK(ev(1) == doctest::Approx(eo(1)).epsilon(1e-10));
}

TEST_CASE("local stability bracket does not drift with k")
{
  const Mesh m = single({0, 0}, {1, 0.1}, {0.3, 0.8});
  double lo = 1e300, hi = 0.0;
  for (int k = 0; k <= 5; ++k) {
    const LocalSpaces s(m, 0, k);
    const int n = s.size();
    const Eigen::MatrixXd a = build_local_system(s, 1.0).system;
    Eigen::MatrixXd norm = build_stabilization(s);
    norm.topLeftCorner(s.cell_size(), s.cell_size()) += cell_stiffness(s);
    // shift out the common constant kernel
    const Eigen::VectorXd c = constant_pair(s, 1.0).normalized();
    const Eigen::MatrixXd shift = c * c.transpose();
    const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(a + shift, norm + shift);
    Eigen::VectorXd ev = eig.eigenvalues();
    for (int i = 0; i < n; ++i) {
      if (std::abs(ev(i) - 1.0) < 1e-9)
        continue; // the shifted kernel direction (or a genuine 1)
      lo = std::min(lo, ev(i));
      hi = std::max(hi, ev(i));
    }
  }
  MESSAGE("Rayleigh quotients in [" << lo << ", " << hi << "]");
  CHECK(lo >= 0.1);
  CHECK(hi <= 10.0);
}

TEST_CASE("reduction on faces matches a one-dimensional oracle")
{
  const Mesh m = reference();
  const LocalSpaces s(m, 0, 1);
  const ScalarField f = [](const Point& x) { return std::sin(M_PI * x.x()); };
  const LocalDofs d = reduce_interpolate(s, f, 30);
  const LineQuadrature& g = face_quadrature(40);
  for (int i = 0; i < 3; ++i) {
    const SegmentGeometry& seg = s.faces[i].geometry();
    // Legendre moments sqrt(2j+1) P_j(2t-1) / sqrt(|F|)
    for (int j = 0; j < 2; ++j) {
      double moment = 0.0;
      for (std::size_t q = 0; q < g.size(); ++q) {
        const double t = g.points[q];
        const double p = j == 0 ? 1.0 : std::sqrt(3.0) * (2 * t - 1);
        moment += g.weights[q] * seg.length * f(seg.at(t)) * p / std::sqrt(seg.length);
      }
      CHECK(d.faces[i](j) == doctest::Approx(moment).epsilon(1e-13).scale(1.0));
    }
  }
}

TEST_CASE("split and stack")
{
  const Mesh m = reference();
  const LocalSpaces s(m, 0, 2);
  const Eigen::VectorXd v = random_vector(s.size(), 3);
  CHECK((LocalDofs::split(s, v).stacked() - v).norm() == 0.0);
  CHECK_THROWS_AS(LocalDofs::split(s, Eigen::VectorXd::Zero(3)), StructuralError);
}
