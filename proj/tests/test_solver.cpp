#include "doctest.h"

#include <cmath>
#include <random>

#include "hho/cases.hpp"
#include "hho/errors.hpp"
#include "hho/quadrature.hpp"
#include "hho/solver.hpp"

using namespace hho;

namespace {

Mesh two_cells(BoundaryKind right = BoundaryKind::dirichlet)
{
  BoundaryLabels labels;
  labels[make_edge_key(0, 1)] = BoundaryKind::dirichlet;
  labels[make_edge_key(1, 2)] = right;
  labels[make_edge_key(2, 3)] = BoundaryKind::dirichlet;
  labels[make_edge_key(0, 3)] = BoundaryKind::dirichlet;
  return build_connectivity({{0, 0}, {1, 0}, {1, 1}, {0, 1}}, {{0, 1, 2}, {0, 2, 3}}, labels,
                            {0, 0});
}

ProblemSpec constant_load(double f)
{
  ProblemSpec p;
  p.diffusion = {{0, 1.0}};
  p.load = [f](const Point&) { return f; };
  p.dirichlet = [](const Point&) { return 0.0; };
  p.neumann = [](const Point&) { return 0.0; };
  return p;
}

// u = x^2 y - y^3 / 3 + x: harmonic, so f = 0 for A = 1; here A = 2 and f = 0.
ProblemSpec polynomial_problem()
{
  ProblemSpec p;
  p.diffusion = {{0, 2.0}};
  const ScalarField u = [](const Point& x) {
    return x.x() * x.x() * x.y() - x.y() * x.y() * x.y() / 3.0 + x.x();
  };
  const VectorField g = [](const Point& x) {
    return Eigen::Vector2d(2 * x.x() * x.y() + 1.0, x.x() * x.x() - x.y() * x.y());
  };
  p.load = [](const Point&) { return 0.0; };
  p.dirichlet = u;
  p.dirichlet_gradient = g;
  p.neumann = [g](const Point&) { return 0.0; };
  p.exact = ExactSolution{u, g};
  return p;
}

double max_difference(const HhoSolution& a, const HhoSolution& b)
{
  double d = 0.0, n = 0.0;
  for (std::size_t i = 0; i < a.cells.size(); ++i) {
    d = std::max(d, (a.cells[i] - b.cells[i]).cwiseAbs().maxCoeff());
    n = std::max(n, b.cells[i].cwiseAbs().maxCoeff());
  }
  for (std::size_t i = 0; i < a.faces.size(); ++i) {
    d = std::max(d, (a.faces[i] - b.faces[i]).cwiseAbs().maxCoeff());
    n = std::max(n, b.faces[i].cwiseAbs().maxCoeff());
  }
  return d / n;
}

} // namespace

TEST_CASE("dof map")
{
  const Mesh m = generate_structured_mesh(Domain::square, 4);
  const DofMap d0 = build_dof_map(m, 0);
  CHECK(d0.free_dofs == 40);
  CHECK(d0.reported_dofs == 40);
  const DofMap d2 = build_dof_map(m, 2);
  CHECK(d2.free_dofs == 120);
  long expected = 0;
  for (std::size_t f = 0; f < m.num_faces(); ++f) {
    if (m.faces()[f].is_boundary()) {
      CHECK(d2.is_fixed(f));
    } else {
      CHECK(d2.face_offset[f] == expected);
      expected += 3;
    }
  }

  BoundaryLabels neumann;
  for (const auto& [key, kind] : m.boundary_labels())
    neumann[key] = BoundaryKind::neumann;
  const Mesh all_neumann = build_connectivity(m.vertices(), m.triangles(), neumann, m.regions());
  CHECK_THROWS_AS(build_dof_map(all_neumann, 1), SpecError);
}

TEST_CASE("two cells, k = 0: condensed value matches hand elimination")
{
  const Mesh m = two_cells();
  const ProblemSpec p = constant_load(1.0);
  const CondensedSystem sys = assemble(m, p, 0);
  REQUIRE(sys.matrix.rows() == 1);

  // Dense elimination of the cell unknowns from the full local systems.
  double a = 0.0, b = 0.0;
  std::size_t interior = 0;
  for (std::size_t f = 0; f < m.num_faces(); ++f)
    if (!m.faces()[f].is_boundary())
      interior = f;
  for (std::size_t c = 0; c < 2; ++c) {
    const LocalSpaces s(m, c, 0);
    const Eigen::MatrixXd k = build_local_system(s, 1.0).system;
    const int nc = s.cell_size();
    const int fi = s.face_offset(m.local_face_index(c, interior));
    Eigen::VectorXd load = Eigen::VectorXd::Zero(nc);
    const QuadratureRule r = map_to_cell(cell_quadrature(4), s.geometry);
    for (std::size_t q = 0; q < r.size(); ++q)
      load += r.weights[q] * s.cell.values(r.points[q]);
    const Eigen::MatrixXd kcc = k.topLeftCorner(nc, nc);
    const Eigen::VectorXd kcf = k.block(0, fi, nc, 1);
    const Eigen::VectorXd kcc_inv_kcf = kcc.ldlt().solve(kcf);
    a += k(fi, fi) - kcf.dot(kcc_inv_kcf);
    b -= kcc_inv_kcf.dot(load);
  }
  CHECK(sys.matrix.coeff(0, 0) == doctest::Approx(a).epsilon(1e-12));
  CHECK(sys.rhs(0) == doctest::Approx(b).epsilon(1e-12));
  CHECK(max_difference(solve_problem(m, p, 0), solve_uncondensed_oracle(m, p, 0)) <= 1e-12);
}

TEST_CASE("condensed system is symmetric positive definite")
{
  const Case c = builtin_case("ex2", 2);
  for (int k : {0, 2}) {
    const CondensedSystem sys = assemble(c.mesh, c.problem, k);
    const Eigen::MatrixXd a(sys.matrix);
    CHECK((a - a.transpose()).norm() <= 1e-12 * a.norm());
    CHECK(a.llt().info() == Eigen::Success);
  }
}

TEST_CASE("condensed and uncondensed solutions agree")
{
  SUBCASE("example 1, 32 cells, k = 0")
  {
    const Case c = builtin_case("ex1");
    CHECK(max_difference(solve_problem(c.mesh, c.problem, 0),
                         solve_uncondensed_oracle(c.mesh, c.problem, 0)) <= 1e-10);
  }
  SUBCASE("8 cells, k = 2, polynomial data")
  {
    const Mesh m = generate_structured_mesh(Domain::square, 2);
    const ProblemSpec p = polynomial_problem();
    CHECK(max_difference(solve_problem(m, p, 2), solve_uncondensed_oracle(m, p, 2)) <= 1e-10);
  }
  SUBCASE("Neumann face")
  {
    const Mesh m = two_cells(BoundaryKind::neumann);
    ProblemSpec p = constant_load(1.0);
    p.neumann = [](const Point& x) { return x.y(); };
    CHECK(max_difference(solve_problem(m, p, 1), solve_uncondensed_oracle(m, p, 1)) <= 1e-10);
  }
  SUBCASE("size cap")
  {
    const Case c = builtin_case("ex1", 16);
    CHECK_THROWS_AS(solve_uncondensed_oracle(c.mesh, c.problem, 3, 1000), OracleError);
  }
}

TEST_CASE("recovered cell unknowns satisfy the local equations")
{
  const Case c = builtin_case("ex1");
  const int k = 1;
  const HhoSolution u = solve_problem(c.mesh, c.problem, k);
  for (std::size_t cell = 0; cell < c.mesh.num_cells(); ++cell) {
    const LocalSpaces s(c.mesh, cell, k);
    const Eigen::MatrixXd a = build_local_system(s, 1.0).system;
    Eigen::VectorXd load = Eigen::VectorXd::Zero(s.cell_size());
    const QuadratureRule r = map_to_cell(cell_quadrature(data_exactness(k)), s.geometry);
    for (std::size_t q = 0; q < r.size(); ++q)
      load += r.weights[q] * c.problem.load(r.points[q]) * s.cell.values(r.points[q]);
    const Eigen::VectorXd residual = a.topRows(s.cell_size()) * u.local(c.mesh, cell) - load;
    CHECK(residual.norm() <= 1e-10 * load.norm());
  }
}

TEST_CASE("Galerkin orthogonality on free face unknowns")
{
  const Case c = builtin_case("ex1");
  const int k = 2;
  const HhoSolution u = solve_problem(c.mesh, c.problem, k);
  const DofMap dofs = build_dof_map(c.mesh, k);
  Eigen::VectorXd residual = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dofs.free_dofs));
  double scale = 0.0;
  for (std::size_t cell = 0; cell < c.mesh.num_cells(); ++cell) {
    const LocalSpaces s(c.mesh, cell, k);
    const Eigen::VectorXd local = build_local_system(s, 1.0).system * u.local(c.mesh, cell);
    scale = std::max(scale, local.cwiseAbs().maxCoeff());
    for (int f = 0; f < 3; ++f) {
      const std::size_t face = c.mesh.cells()[cell].faces[f];
      if (!dofs.is_fixed(face))
        residual.segment(dofs.face_offset[face], k + 1) += local.segment(s.face_offset(f), k + 1);
    }
  }
  CHECK(residual.cwiseAbs().maxCoeff() <= 1e-10 * scale);
}

TEST_CASE("sparse solver against a dense factorization")
{
  std::mt19937 gen(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  const int n = 200;
  Eigen::MatrixXd b(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      b(i, j) = dist(gen);
  const Eigen::MatrixXd a = b * b.transpose() + n * Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd rhs(n);
  for (int i = 0; i < n; ++i)
    rhs(i) = dist(gen);
  const Eigen::SparseMatrix<double> sparse = a.sparseView();
  const Eigen::VectorXd x = solve_linear(sparse, rhs);
  const Eigen::VectorXd oracle = a.llt().solve(rhs);
  CHECK((x - oracle).norm() <= 1e-10 * oracle.norm());

  Eigen::SparseMatrix<double> singular(2, 2);
  singular.insert(0, 0) = 1.0;
  CHECK_THROWS_AS(solve_linear(singular, Eigen::Vector2d(1.0, 1.0)), SolverError);
}

TEST_CASE("assembly and solve are deterministic")
{
  const Case c = builtin_case("ex3");
  const CondensedSystem s1 = assemble(c.mesh, c.problem, 2, Execution::serial);
  const CondensedSystem s2 = assemble(c.mesh, c.problem, 2, Execution::parallel);
  CHECK((Eigen::MatrixXd(s1.matrix) - Eigen::MatrixXd(s2.matrix)).norm() == 0.0);
  CHECK((s1.rhs - s2.rhs).norm() == 0.0);
  const HhoSolution u1 = solve_problem(c.mesh, c.problem, 2);
  const HhoSolution u2 = solve_problem(c.mesh, c.problem, 2);
  CHECK(max_difference(u1, u2) == 0.0);
}

TEST_CASE("recover_solution checks sizes")
{
  const Case c = builtin_case("ex1");
  const CondensedSystem sys = assemble(c.mesh, c.problem, 1);
  CHECK_THROWS_AS(recover_solution(Eigen::VectorXd::Zero(3), sys, c.mesh, 1), StructuralError);
}
