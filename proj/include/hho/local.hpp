#pragma once

#include <array>

#include <Eigen/Dense>

#include "hho/basis.hpp"
#include "hho/mesh.hpp"

namespace hho {

/// Bases of the local HHO space P^{k+1}(K) x P^k(F_K) of one cell.
///
/// Local unknowns are stacked as [cell | face 0 | face 1 | face 2] with face i
/// opposite vertex i. Face bases follow the global face orientation, so both
/// neighbours of an interface share the same face coefficients.
struct LocalSpaces {
  LocalSpaces(const Mesh& mesh, std::size_t cell, int k);

  std::size_t cell_id;
  int k;
  TriangleGeometry geometry;
  CellBasis cell;
  std::array<FaceBasis, 3> faces;
  std::array<Point, 3> normals; ///< outward unit normals n_K per local face

  int cell_size() const { return cell.size(); }
  int face_size() const { return k + 1; }
  int size() const { return cell_size() + 3 * face_size(); }
  int face_offset(int local_face) const { return cell_size() + local_face * face_size(); }
};

/// A pair (v_K, v_dK) of local unknowns.
struct LocalDofs {
  Eigen::VectorXd cell;
  std::array<Eigen::VectorXd, 3> faces;

  Eigen::VectorXd stacked() const;
  static LocalDofs split(const LocalSpaces& spaces, const Eigen::VectorXd& stacked);
};

/// (grad phi_i, grad phi_j)_K on the cell basis.
Eigen::MatrixXd cell_stiffness(const LocalSpaces& spaces);

/// Matrix mapping stacked local unknowns to the coefficients of R_K^{k+1} in
/// the cell basis: (grad R, grad w)_K = (grad v_K, grad w)_K - (v_K - v_dK, grad w.n_K)_dK
/// for all w, with (R, 1)_K = (v_K, 1)_K.
Eigen::MatrixXd build_reconstruction(const LocalSpaces& spaces);

/// Per-face map D_F from stacked unknowns to the face-basis coefficients of
/// Pi_F^k(v_F - v_K|_F).
Eigen::MatrixXd face_difference(const LocalSpaces& spaces, int local_face);

/// ((k+1)^2 / h_K) sum_F D_F^T D_F (the face bases are orthonormal).
Eigen::MatrixXd build_stabilization(const LocalSpaces& spaces);

struct LocalOperators {
  Eigen::MatrixXd reconstruction; ///< cell_size x size
  Eigen::MatrixXd stiffness;      ///< cell_size x cell_size
  Eigen::MatrixXd stabilization;  ///< size x size, without A_K
  Eigen::MatrixXd system;         ///< a_K = A_K (R^T S R + stab)
  double diffusion = 1.0;
};

/// Throws ParameterError when diffusion <= 0.
LocalOperators build_local_system(const LocalSpaces& spaces, double diffusion);

/// Reduction: (Pi_K^{k+1} f, (Pi_F^k f)_F).
LocalDofs reduce_interpolate(const LocalSpaces& spaces, const ScalarField& f, int exactness);

/// Squared local seminorm ||grad v_K||^2 + ((k+1)^2 / h_K) ||Pi^k_dK(v_dK - v_K)||^2_dK.
double local_seminorm_squared(const LocalSpaces& spaces, const Eigen::VectorXd& stacked);

/// S_dK(v, v) as ((k+1)^2 / h_K) sum_F ||D_F v||^2: no cancellation when v is
/// close to the kernel of S, unlike v^T S v.
double stabilization_energy(const LocalSpaces& spaces, const Eigen::VectorXd& stacked);

} // namespace hho
