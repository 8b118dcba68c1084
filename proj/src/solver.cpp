#include "hho/solver.hpp"

#include <algorithm>
#include <set>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "hho/errors.hpp"

namespace hho {

double ProblemSpec::diffusion_of(int region) const
{
  const auto it = diffusion.find(region);
  if (it == diffusion.end())
    throw SpecError("no diffusion coefficient for region " + std::to_string(region));
  if (!(it->second > 0.0))
    throw SpecError("diffusion coefficient of region " + std::to_string(region) +
                    " must be positive");
  return it->second;
}

void validate(const ProblemSpec& problem, const Mesh& mesh)
{
  std::set<int> regions;
  for (const Cell& c : mesh.cells())
    regions.insert(c.region);
  for (const int r : regions)
    problem.diffusion_of(r);
  if (mesh.count_faces(FaceKind::dirichlet) == 0)
    throw SpecError("mesh has no Dirichlet face; the problem is not well posed");
  if (!problem.load)
    throw SpecError("problem has no load function");
  if (!problem.dirichlet)
    throw SpecError("problem has no Dirichlet data");
  if (mesh.count_faces(FaceKind::neumann) > 0 && !problem.neumann)
    throw SpecError("mesh has Neumann faces but the problem has no Neumann data");
}

int data_exactness(int k) { return std::min(2 * (k + 1) + 6, max_quadrature_exactness); }

DofMap build_dof_map(const Mesh& mesh, int k)
{
  if (k < 0)
    throw ParameterError("polynomial degree k must be non-negative");
  if (mesh.count_faces(FaceKind::dirichlet) == 0)
    throw SpecError("mesh has no Dirichlet face; the problem is not well posed");
  DofMap map;
  map.k = k;
  map.face_offset.assign(mesh.num_faces(), -1);
  long next = 0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    if (mesh.faces()[f].kind == FaceKind::dirichlet)
      continue;
    map.face_offset[f] = next;
    next += k + 1;
  }
  map.free_dofs = static_cast<std::size_t>(next);
  map.reported_dofs = static_cast<std::size_t>(k + 1) * mesh.num_interior_faces();
  return map;
}

Eigen::VectorXd HhoSolution::local(const Mesh& mesh, std::size_t cell) const
{
  const auto& c = mesh.cells()[cell];
  const Eigen::Index nc = cells[cell].size();
  const Eigen::Index nf = k + 1;
  Eigen::VectorXd out(nc + 3 * nf);
  out.head(nc) = cells[cell];
  for (int i = 0; i < 3; ++i)
    out.segment(nc + i * nf, nf) = faces[c.faces[i]];
  return out;
}

namespace {

struct CellContribution {
  Eigen::MatrixXd schur;
  Eigen::VectorXd rhs;
  CellRecovery recovery;
};

// Load vector (f, phi_i)_K stacked with the Neumann terms (g_N, psi_l)_F.
Eigen::VectorXd local_load(const LocalSpaces& s, const Mesh& mesh, const ProblemSpec& problem)
{
  const int exact = data_exactness(s.k);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(s.size());
  b.head(s.cell_size()) = l2_project(s.cell, problem.load, exact);
  const Cell& cell = mesh.cells()[s.cell_id];
  for (int f = 0; f < 3; ++f)
    if (mesh.faces()[cell.faces[f]].kind == FaceKind::neumann)
      b.segment(s.face_offset(f), s.face_size()) = l2_project(s.faces[f], problem.neumann, exact);
  return b;
}

CellContribution condense(const Mesh& mesh, const ProblemSpec& problem, std::size_t c, int k)
{
  const LocalSpaces s(mesh, c, k);
  const LocalOperators ops = build_local_system(s, problem.diffusion_of(mesh.cells()[c].region));
  const Eigen::VectorXd b = local_load(s, mesh, problem);

  const int nc = s.cell_size();
  const int nb = s.size() - nc;
  const Eigen::MatrixXd att = ops.system.topLeftCorner(nc, nc);
  const Eigen::MatrixXd atf = ops.system.topRightCorner(nc, nb);
  const Eigen::LLT<Eigen::MatrixXd> llt(att);
  if (llt.info() != Eigen::Success)
    throw SolverError("cell block not positive definite in cell " + std::to_string(c), 0.0);

  CellContribution out;
  out.recovery.from_faces = llt.solve(atf);
  out.recovery.load = llt.solve(b.head(nc));
  out.schur = ops.system.bottomRightCorner(nb, nb) - atf.transpose() * out.recovery.from_faces;
  out.schur = 0.5 * (out.schur + out.schur.transpose()).eval();
  out.rhs = b.tail(nb) - atf.transpose() * out.recovery.load;
  return out;
}

std::vector<Eigen::VectorXd> dirichlet_projections(const Mesh& mesh, const ProblemSpec& problem,
                                                   int k, Execution exec)
{
  std::vector<Eigen::VectorXd> values(mesh.num_faces());
  for_each_index(exec, mesh.num_faces(), [&](std::size_t f) {
    if (mesh.faces()[f].kind == FaceKind::dirichlet)
      values[f] = l2_project(FaceBasis(mesh.face_geometry(f), k), problem.dirichlet,
                             data_exactness(k));
  });
  return values;
}

} // namespace

CondensedSystem assemble(const Mesh& mesh, const ProblemSpec& problem, int k, Execution exec)
{
  validate(problem, mesh);
  CondensedSystem sys;
  sys.dofs = build_dof_map(mesh, k);
  sys.dirichlet_values = dirichlet_projections(mesh, problem, k, exec);

  std::vector<CellContribution> local(mesh.num_cells());
  for_each_index(exec, mesh.num_cells(),
                 [&](std::size_t c) { local[c] = condense(mesh, problem, c, k); });

  const int nf = k + 1;
  const auto n = static_cast<Eigen::Index>(sys.dofs.free_dofs);
  sys.rhs = Eigen::VectorXd::Zero(n);
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(mesh.num_cells() * 9 * nf * nf);
  sys.recovery.resize(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& faces = mesh.cells()[c].faces;
    const CellContribution& loc = local[c];
    for (int i = 0; i < 3; ++i) {
      const long row = sys.dofs.face_offset[faces[i]];
      if (row < 0)
        continue;
      sys.rhs.segment(row, nf) += loc.rhs.segment(i * nf, nf);
      for (int j = 0; j < 3; ++j) {
        const auto block = loc.schur.block(i * nf, j * nf, nf, nf);
        const long col = sys.dofs.face_offset[faces[j]];
        if (col < 0) {
          sys.rhs.segment(row, nf) -= block * sys.dirichlet_values[faces[j]];
          continue;
        }
        for (int a = 0; a < nf; ++a)
          for (int b = 0; b < nf; ++b)
            triplets.emplace_back(row + a, col + b, block(a, b));
      }
    }
    sys.recovery[c] = std::move(local[c].recovery);
  }
  sys.matrix.resize(n, n);
  sys.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return sys;
}

Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs,
                             double tol)
{
  if (matrix.rows() != matrix.cols() || matrix.rows() != rhs.size())
    throw StructuralError("linear system dimensions do not match");
  const Eigen::Index n = rhs.size();
  if (n == 0)
    return {};

  // Symmetric diagonal scaling D^-1/2 M D^-1/2. Face unknowns of graded
  // meshes carry diagonals ~ A/h over many orders of magnitude; the residual
  // is measured on the scaled system.
  Eigen::VectorXd scale(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = matrix.coeff(i, i);
    if (!(d > 0.0))
      throw SolverError("non-positive diagonal entry in row " + std::to_string(i), 1.0);
    scale(i) = 1.0 / std::sqrt(d);
  }
  const Eigen::SparseMatrix<double> scaled = scale.asDiagonal() * matrix * scale.asDiagonal();
  const Eigen::VectorXd b = scale.cwiseProduct(rhs);
  const double bnorm = b.norm();
  if (bnorm == 0.0)
    return Eigen::VectorXd::Zero(n);
  auto relative_residual = [&](const Eigen::VectorXd& y) { return (scaled * y - b).norm() / bnorm; };

  Eigen::VectorXd y;
  if (n <= 200000) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(scaled);
    if (ldlt.info() != Eigen::Success)
      throw SolverError("sparse LDL^T factorization failed", 1.0);
    y = ldlt.solve(b);
    double res = relative_residual(y);
    for (int step = 0; step < 3 && res > tol; ++step) {
      y += ldlt.solve(b - scaled * y);
      res = relative_residual(y);
    }
    if (!(res <= tol))
      throw SolverError("direct solve reached relative residual " + std::to_string(res), res);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    cg.setTolerance(tol);
    cg.setMaxIterations(10 * n);
    cg.compute(scaled);
    y = cg.solve(b);
    const double res = relative_residual(y);
    if (!(res <= tol))
      throw SolverError("conjugate gradient stopped at relative residual " + std::to_string(res),
                        res);
  }
  return scale.cwiseProduct(y);
}

HhoSolution recover_solution(const Eigen::VectorXd& face_values, const CondensedSystem& system,
                             const Mesh& mesh, int k)
{
  if (face_values.size() != static_cast<Eigen::Index>(system.dofs.free_dofs))
    throw StructuralError("face vector has length " + std::to_string(face_values.size()) +
                          ", expected " + std::to_string(system.dofs.free_dofs));
  if (system.recovery.size() != mesh.num_cells() || system.dofs.k != k)
    throw StructuralError("recovery data does not match the mesh or degree");

  const int nf = k + 1;
  HhoSolution sol;
  sol.k = k;
  sol.faces.resize(mesh.num_faces());
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const long off = system.dofs.face_offset[f];
    sol.faces[f] = off < 0 ? system.dirichlet_values[f] : Eigen::VectorXd(face_values.segment(off, nf));
  }
  sol.cells.resize(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto& faces = mesh.cells()[c].faces;
    Eigen::VectorXd boundary(3 * nf);
    for (int i = 0; i < 3; ++i)
      boundary.segment(i * nf, nf) = sol.faces[faces[i]];
    sol.cells[c] = system.recovery[c].load - system.recovery[c].from_faces * boundary;
  }
  return sol;
}

HhoSolution solve_problem(const Mesh& mesh, const ProblemSpec& problem, int k, Execution exec)
{
  const CondensedSystem sys = assemble(mesh, problem, k, exec);
  const Eigen::VectorXd faces = solve_linear(sys.matrix, sys.rhs);
  return recover_solution(faces, sys, mesh, k);
}

HhoSolution solve_uncondensed_oracle(const Mesh& mesh, const ProblemSpec& problem, int k,
                                     std::size_t max_unknowns)
{
  validate(problem, mesh);
  const DofMap dofs = build_dof_map(mesh, k);
  const int nc = CellBasis::dimension(k + 1);
  const int nf = k + 1;
  const std::size_t cell_unknowns = mesh.num_cells() * static_cast<std::size_t>(nc);
  const std::size_t total = cell_unknowns + dofs.free_dofs;
  if (total > max_unknowns)
    throw OracleError("uncondensed oracle limited to " + std::to_string(max_unknowns) +
                      " unknowns, problem has " + std::to_string(total));

  const auto dirichlet = dirichlet_projections(mesh, problem, k, Execution::serial);
  const auto n = static_cast<Eigen::Index>(total);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);

  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const LocalSpaces s(mesh, c, k);
    const LocalOperators ops = build_local_system(s, problem.diffusion_of(mesh.cells()[c].region));
    const Eigen::VectorXd load = local_load(s, mesh, problem);

    // global index of every local unknown, -1 for Dirichlet-fixed ones
    std::vector<long> index(s.size());
    Eigen::VectorXd fixed = Eigen::VectorXd::Zero(s.size());
    for (int i = 0; i < nc; ++i)
      index[i] = static_cast<long>(c * nc + i);
    for (int f = 0; f < 3; ++f) {
      const std::size_t face = mesh.cells()[c].faces[f];
      const long off = dofs.face_offset[face];
      for (int l = 0; l < nf; ++l) {
        index[s.face_offset(f) + l] = off < 0 ? -1 : static_cast<long>(cell_unknowns) + off + l;
        if (off < 0)
          fixed[s.face_offset(f) + l] = dirichlet[face][l];
      }
    }
    const Eigen::VectorXd lifted = ops.system * fixed;
    for (int i = 0; i < s.size(); ++i) {
      if (index[i] < 0)
        continue;
      b[index[i]] += load[i] - lifted[i];
      for (int j = 0; j < s.size(); ++j)
        if (index[j] >= 0)
          a(index[i], index[j]) += ops.system(i, j);
    }
  }

  const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success)
    throw SolverError("dense LDL^T factorization failed in the oracle", 1.0);
  const Eigen::VectorXd x = ldlt.solve(b);

  HhoSolution sol;
  sol.k = k;
  sol.cells.resize(mesh.num_cells());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    sol.cells[c] = x.segment(static_cast<Eigen::Index>(c * nc), nc);
  sol.faces.resize(mesh.num_faces());
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const long off = dofs.face_offset[f];
    sol.faces[f] =
        off < 0 ? dirichlet[f] : Eigen::VectorXd(x.segment(static_cast<Eigen::Index>(cell_unknowns) + off, nf));
  }
  return sol;
}

} // namespace hho
