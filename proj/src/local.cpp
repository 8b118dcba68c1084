#include "hho/local.hpp"

#include <string>

#include "hho/errors.hpp"

namespace hho {

namespace {

std::array<FaceBasis, 3> make_face_bases(const Mesh& mesh, std::size_t cell, int k)
{
  const auto& faces = mesh.cells()[cell].faces;
  return {FaceBasis(mesh.face_geometry(faces[0]), k), FaceBasis(mesh.face_geometry(faces[1]), k),
          FaceBasis(mesh.face_geometry(faces[2]), k)};
}

int operator_exactness(int k) { return 2 * (k + 1); }

// T_F(l, j) = (psi_l, phi_j)_F: face projection of cell basis traces.
Eigen::MatrixXd trace_projection(const LocalSpaces& s, int f)
{
  const FaceBasis& face = s.faces[f];
  const LineQuadrature rule =
      map_to_face(face_quadrature(operator_exactness(s.k)), face.geometry());
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(s.face_size(), s.cell_size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double tq = rule.points[q];
    t += rule.weights[q] * face.values(tq) * s.cell.values(face.geometry().at(tq)).transpose();
  }
  return t;
}

} // namespace

LocalSpaces::LocalSpaces(const Mesh& mesh, std::size_t cell_index, int degree)
    : cell_id(cell_index),
      k(degree),
      geometry(mesh.cell_geometry(cell_index)),
      cell(geometry, degree + 1),
      faces(make_face_bases(mesh, cell_index, degree))
{
  if (degree < 0)
    throw ParameterError("polynomial degree k must be non-negative");
  for (int i = 0; i < 3; ++i)
    normals[i] = mesh.outward_normal(cell_index, i);
}

Eigen::VectorXd LocalDofs::stacked() const
{
  Eigen::Index n = cell.size();
  for (const auto& f : faces)
    n += f.size();
  Eigen::VectorXd out(n);
  Eigen::Index offset = 0;
  out.segment(offset, cell.size()) = cell;
  offset += cell.size();
  for (const auto& f : faces) {
    out.segment(offset, f.size()) = f;
    offset += f.size();
  }
  return out;
}

LocalDofs LocalDofs::split(const LocalSpaces& spaces, const Eigen::VectorXd& stacked)
{
  if (stacked.size() != spaces.size())
    throw StructuralError("local unknown vector has length " + std::to_string(stacked.size()) +
                          ", expected " + std::to_string(spaces.size()));
  LocalDofs d;
  d.cell = stacked.head(spaces.cell_size());
  for (int f = 0; f < 3; ++f)
    d.faces[f] = stacked.segment(spaces.face_offset(f), spaces.face_size());
  return d;
}

Eigen::MatrixXd cell_stiffness(const LocalSpaces& s)
{
  const QuadratureRule rule = map_to_cell(cell_quadrature(operator_exactness(s.k)), s.geometry);
  Eigen::MatrixXd stiff = Eigen::MatrixXd::Zero(s.cell_size(), s.cell_size());
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const Eigen::MatrixX2d g = s.cell.gradients(rule.points[q]);
    stiff.noalias() += rule.weights[q] * g * g.transpose();
  }
  return stiff;
}

Eigen::MatrixXd build_reconstruction(const LocalSpaces& s)
{
  const int nc = s.cell_size();
  const int nf = s.face_size();
  const Eigen::MatrixXd stiff = cell_stiffness(s);

  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nc, s.size());
  rhs.leftCols(nc) = stiff;
  for (int f = 0; f < 3; ++f) {
    const FaceBasis& face = s.faces[f];
    const LineQuadrature rule =
        map_to_face(face_quadrature(operator_exactness(s.k)), face.geometry());
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const double tq = rule.points[q];
      const Point x = face.geometry().at(tq);
      const Eigen::VectorXd dn = s.cell.gradients(x) * s.normals[f]; // grad w . n_K
      rhs.leftCols(nc).noalias() -= rule.weights[q] * dn * s.cell.values(x).transpose();
      rhs.middleCols(s.face_offset(f), nf).noalias() +=
          rule.weights[q] * dn * face.values(tq).transpose();
    }
  }

  // The constant mode has a zero stiffness row; it is replaced by the mean
  // constraint (R, 1)_K = (v_K, 1)_K.
  const QuadratureRule rule = map_to_cell(cell_quadrature(s.cell.degree()), s.geometry);
  Eigen::VectorXd means = Eigen::VectorXd::Zero(nc);
  for (std::size_t q = 0; q < rule.size(); ++q)
    means += rule.weights[q] * s.cell.values(rule.points[q]);
  means *= stiff.norm() / means.norm(); // stiffness scales like h^-2
  Eigen::MatrixXd lhs = stiff;
  lhs.row(0) = means.transpose();
  rhs.row(0).setZero();
  rhs.row(0).head(nc) = means.transpose();

  Eigen::FullPivLU<Eigen::MatrixXd> lu(lhs);
  if (!lu.isInvertible())
    throw Error("singular reconstruction system in cell " + std::to_string(s.cell_id));
  return lu.solve(rhs);
}

Eigen::MatrixXd face_difference(const LocalSpaces& s, int f)
{
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(s.face_size(), s.size());
  d.leftCols(s.cell_size()) = -trace_projection(s, f);
  d.middleCols(s.face_offset(f), s.face_size()).setIdentity();
  return d;
}

Eigen::MatrixXd build_stabilization(const LocalSpaces& s)
{
  const double scale = (s.k + 1.0) * (s.k + 1.0) / s.geometry.diameter;
  Eigen::MatrixXd stab = Eigen::MatrixXd::Zero(s.size(), s.size());
  for (int f = 0; f < 3; ++f) {
    const Eigen::MatrixXd d = face_difference(s, f);
    stab.noalias() += d.transpose() * d;
  }
  return scale * stab;
}

LocalOperators build_local_system(const LocalSpaces& s, double diffusion)
{
  if (!(diffusion > 0.0))
    throw ParameterError("diffusion coefficient must be positive in cell " +
                         std::to_string(s.cell_id));
  LocalOperators ops;
  ops.diffusion = diffusion;
  ops.stiffness = cell_stiffness(s);
  ops.reconstruction = build_reconstruction(s);
  ops.stabilization = build_stabilization(s);
  ops.system =
      diffusion * (ops.reconstruction.transpose() * ops.stiffness * ops.reconstruction +
                   ops.stabilization);
  // symmetrize round-off
  ops.system = 0.5 * (ops.system + ops.system.transpose()).eval();
  return ops;
}

LocalDofs reduce_interpolate(const LocalSpaces& s, const ScalarField& f, int exactness)
{
  LocalDofs d;
  d.cell = l2_project(s.cell, f, exactness);
  for (int i = 0; i < 3; ++i)
    d.faces[i] = l2_project(s.faces[i], f, exactness);
  return d;
}

double local_seminorm_squared(const LocalSpaces& s, const Eigen::VectorXd& stacked)
{
  const Eigen::VectorXd vc = stacked.head(s.cell_size());
  return vc.dot(cell_stiffness(s) * vc) + stabilization_energy(s, stacked);
}

double stabilization_energy(const LocalSpaces& s, const Eigen::VectorXd& stacked)
{
  double sum = 0.0;
  for (int f = 0; f < 3; ++f)
    sum += (face_difference(s, f) * stacked).squaredNorm();
  return (s.k + 1.0) * (s.k + 1.0) / s.geometry.diameter * sum;
}

} // namespace hho
