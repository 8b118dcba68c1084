#pragma once

#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "hho/local.hpp"
#include "hho/mesh.hpp"
#include "hho/parallel.hpp"
#include "hho/problem.hpp"

namespace hho {

/// Quadrature exactness for integrals of non-polynomial data at degree k.
int data_exactness(int k);

/// Global numbering of the face unknowns that are not fixed by Dirichlet data.
struct DofMap {
  int k = 0;
  /// First global index of each face's k+1 unknowns; -1 on Dirichlet faces.
  std::vector<long> face_offset;
  std::size_t free_dofs = 0;
  /// (k+1) x number of interior faces: the count reported in studies.
  std::size_t reported_dofs = 0;

  int face_size() const { return k + 1; }
  bool is_fixed(std::size_t face) const { return face_offset[face] < 0; }
};

/// Contiguous numbering in ascending face id. Throws SpecError when the mesh
/// has no Dirichlet face.
DofMap build_dof_map(const Mesh& mesh, int k);

/// Per-cell data to undo the static condensation: u_K = load - from_faces * u_dK.
struct CellRecovery {
  Eigen::MatrixXd from_faces;
  Eigen::VectorXd load;
};

struct CondensedSystem {
  DofMap dofs;
  Eigen::SparseMatrix<double> matrix;
  Eigen::VectorXd rhs;
  std::vector<CellRecovery> recovery;
  /// Pi_F^k(g_D) on Dirichlet faces, empty elsewhere.
  std::vector<Eigen::VectorXd> dirichlet_values;
};

/// Discrete solution: cell coefficients in P^{k+1} and face coefficients in
/// P^k, both in the orthonormal bases of LocalSpaces.
struct HhoSolution {
  int k = 0;
  std::vector<Eigen::VectorXd> cells;
  std::vector<Eigen::VectorXd> faces;

  /// Stacked local unknowns of one cell (see LocalSpaces).
  Eigen::VectorXd local(const Mesh& mesh, std::size_t cell) const;
};

/// Builds local systems (OpenMP over cells), condenses the cell unknowns and
/// accumulates the Schur complement on free face unknowns in ascending cell
/// order. Dirichlet unknowns are eliminated to the right-hand side.
CondensedSystem assemble(const Mesh& mesh, const ProblemSpec& problem, int k,
                         Execution exec = Execution::parallel);

/// Sparse LDL^T up to 2e5 unknowns, diagonally preconditioned CG above, both
/// on the symmetrically Jacobi-scaled system D^-1/2 A D^-1/2. Throws
/// SolverError when the scaled relative residual exceeds tol.
Eigen::VectorXd solve_linear(const Eigen::SparseMatrix<double>& matrix, const Eigen::VectorXd& rhs,
                             double tol = 1e-12);

/// Throws StructuralError on a size mismatch.
HhoSolution recover_solution(const Eigen::VectorXd& face_values, const CondensedSystem& system,
                             const Mesh& mesh, int k);

HhoSolution solve_problem(const Mesh& mesh, const ProblemSpec& problem, int k,
                          Execution exec = Execution::parallel);

/// Dense solve of the full (cell + face) system without condensation.
/// Verification path; throws OracleError above `max_unknowns`.
HhoSolution solve_uncondensed_oracle(const Mesh& mesh, const ProblemSpec& problem, int k,
                                     std::size_t max_unknowns = 4000);

} // namespace hho
