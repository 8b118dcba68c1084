#include "hho/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "hho/errors.hpp"
#include "hho/local.hpp"

namespace hho {

namespace {

// Tangential derivative of g_D along `tangent`, by the supplied gradient or a
// centred difference.
double dirichlet_tangential_derivative(const ProblemSpec& problem, const Point& x,
                                       const Point& tangent, double h)
{
  if (problem.dirichlet_gradient)
    return problem.dirichlet_gradient(x).dot(tangent);
  const double step = 1e-6 * h;
  return (problem.dirichlet(x + step * tangent) - problem.dirichlet(x - step * tangent)) /
         (2.0 * step);
}

struct CellData {
  std::optional<LocalSpaces> spaces;
  Eigen::VectorXd recon; // coefficients of R_K(u_K) in the cell basis
  double diffusion = 1.0;
  double tan_dirichlet = 0.0; // ||d_t(u_K - Pi^{k+1} g_D)||^2 on Dirichlet faces
  double nor_neumann = 0.0;   // ||A grad R . n - Pi^k g_N||^2 on Neumann faces
  double osc_gN = 0.0;        // ||g_N - Pi^k g_N||^2
  double osc_gD = 0.0;        // ||d_t(g_D - Pi^{k+1} g_D)||^2
};

CellData cell_terms(const Mesh& mesh, const ProblemSpec& problem, const HhoSolution& solution,
                    std::size_t c, CellEstimate& est)
{
  const int k = solution.k;
  CellData data;
  data.spaces.emplace(mesh, c, k);
  const LocalSpaces& s = *data.spaces;
  const double a = problem.diffusion_of(mesh.cells()[c].region);
  data.diffusion = a;
  const double h = s.geometry.diameter;
  const double scale = h / (k + 1.0);

  const Eigen::VectorXd u = solution.local(mesh, c);
  data.recon = build_reconstruction(s) * u;

  // residual and load oscillation
  const Eigen::VectorXd f_proj = l2_project(s.cell, problem.load, data_exactness(k));
  {
    const QuadratureRule rule = map_to_cell(cell_quadrature(2 * (k + 1)), s.geometry);
    double res2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const double r = f_proj.dot(s.cell.values(x)) + a * data.recon.dot(s.cell.laplacians(x));
      res2 += rule.weights[q] * r * r;
    }
    est.eta_res = scale * std::sqrt(res2 / a);
  }
  {
    const QuadratureRule rule = map_to_cell(cell_quadrature(data_exactness(k)), s.geometry);
    double osc2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const double r = problem.load(x) - f_proj.dot(s.cell.values(x));
      osc2 += rule.weights[q] * r * r;
    }
    est.osc_f = scale * std::sqrt(osc2 / a);
  }

  est.eta_sta = std::sqrt(a * stabilization_energy(s, u));

  const Eigen::VectorXd& uk = solution.cells[c];
  for (int i = 0; i < 3; ++i) {
    const std::size_t fid = mesh.cells()[c].faces[i];
    const Face& face = mesh.faces()[fid];
    const SegmentGeometry seg = mesh.face_geometry(fid);
    const Point tangent = seg.tangent();
    if (face.kind == FaceKind::dirichlet) {
      const FaceBasis lifted(seg, k + 1);
      const Eigen::VectorXd g_proj = l2_project(lifted, problem.dirichlet, data_exactness(k));
      const LineQuadrature jump_rule = map_to_face(face_quadrature(2 * k + 8), seg);
      for (std::size_t q = 0; q < jump_rule.size(); ++q) {
        const double t = jump_rule.points[q];
        const double d = evaluate_gradient(s.cell, uk, seg.at(t)).dot(tangent) -
                         g_proj.dot(lifted.tangential_derivatives(t));
        data.tan_dirichlet += jump_rule.weights[q] * d * d;
      }
      const LineQuadrature data_rule = map_to_face(face_quadrature(data_exactness(k)), seg);
      for (std::size_t q = 0; q < data_rule.size(); ++q) {
        const double t = data_rule.points[q];
        const double d =
            dirichlet_tangential_derivative(problem, seg.at(t), tangent, seg.length) -
            g_proj.dot(lifted.tangential_derivatives(t));
        data.osc_gD += data_rule.weights[q] * d * d;
      }
    } else if (face.kind == FaceKind::neumann) {
      const FaceBasis& fb = s.faces[i];
      const Eigen::VectorXd g_proj = l2_project(fb, problem.neumann, data_exactness(k));
      const LineQuadrature rule = map_to_face(face_quadrature(data_exactness(k)), seg);
      for (std::size_t q = 0; q < rule.size(); ++q) {
        const double t = rule.points[q];
        const Point x = seg.at(t);
        const double gp = g_proj.dot(fb.values(t));
        const double dn =
            a * evaluate_gradient(s.cell, data.recon, x).dot(s.normals[i]) - gp;
        data.nor_neumann += rule.weights[q] * dn * dn;
        const double o = problem.neumann(x) - gp;
        data.osc_gN += rule.weights[q] * o * o;
      }
    }
  }
  return data;
}

} // namespace

Eigen::VectorXd numerical_flux(const Mesh& mesh, const ProblemSpec& problem,
                               const HhoSolution& solution, std::size_t cell, std::size_t face)
{
  const int local = mesh.local_face_index(cell, face);
  if (local < 0)
    throw StructuralError("face " + std::to_string(face) + " is not a face of cell " +
                          std::to_string(cell));
  const int k = solution.k;
  const LocalSpaces s(mesh, cell, k);
  const double a = problem.diffusion_of(mesh.cells()[cell].region);
  const Eigen::VectorXd u = solution.local(mesh, cell);
  const Eigen::VectorXd recon = build_reconstruction(s) * u;

  const FaceBasis& fb = s.faces[local];
  const LineQuadrature rule = map_to_face(face_quadrature(2 * (k + 1)), fb.geometry());
  Eigen::VectorXd flux = Eigen::VectorXd::Zero(k + 1);
  for (std::size_t q = 0; q < rule.size(); ++q) {
    const double t = rule.points[q];
    const double dn = evaluate_gradient(s.cell, recon, fb.geometry().at(t)).dot(s.normals[local]);
    flux -= rule.weights[q] * a * dn * fb.values(t);
  }
  // Pi_F^k(u_K|_F - u_F) = -D_F u
  flux -= a * (k + 1.0) * (k + 1.0) / s.geometry.diameter * (face_difference(s, local) * u);
  return flux;
}

double conservation_residual(const Mesh& mesh, const ProblemSpec& problem,
                             const HhoSolution& solution)
{
  const int k = solution.k;
  std::vector<Eigen::VectorXd> balance(mesh.num_faces(), Eigen::VectorXd::Zero(k + 1));
  double energy2 = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const LocalSpaces s(mesh, c, k);
    const double a = problem.diffusion_of(mesh.cells()[c].region);
    const Eigen::VectorXd recon = build_reconstruction(s) * solution.local(mesh, c);
    energy2 += a * recon.dot(cell_stiffness(s) * recon);
    for (const std::size_t f : mesh.cells()[c].faces)
      balance[f] += numerical_flux(mesh, problem, solution, c, f);
  }

  double worst = 0.0;
  for (std::size_t f = 0; f < mesh.num_faces(); ++f) {
    const Face& face = mesh.faces()[f];
    if (face.kind == FaceKind::dirichlet)
      continue;
    Eigen::VectorXd imbalance = balance[f];
    if (face.kind == FaceKind::neumann)
      imbalance += l2_project(FaceBasis(mesh.face_geometry(f), k), problem.neumann,
                              data_exactness(k));
    worst = std::max(worst, imbalance.norm()); // orthonormal basis: coefficient norm = L2 norm
  }
  const double energy = std::sqrt(energy2);
  return energy > 0.0 ? worst / energy : worst;
}

double total_estimator(const std::vector<CellEstimate>& cells, int k)
{
  double base = 0.0;
  double sta = 0.0;
  double nor = 0.0;
  for (const CellEstimate& e : cells) {
    const double o = e.osc();
    base += e.eta_res * e.eta_res + e.eta_tan * e.eta_tan + e.eta_sta * e.eta_sta + o * o;
    sta += e.eta_sta * e.eta_sta;
    nor += e.eta_nor * e.eta_nor;
  }
  return std::sqrt(base + std::min(k * sta, nor));
}

void summarize(EstimatorReport& r)
{
  double res = 0.0, sta = 0.0, nor = 0.0, tan = 0.0, osc = 0.0;
  for (const CellEstimate& e : r.cells) {
    res += e.eta_res * e.eta_res;
    sta += e.eta_sta * e.eta_sta;
    nor += e.eta_nor * e.eta_nor;
    tan += e.eta_tan * e.eta_tan;
    osc += e.osc() * e.osc();
  }
  r.eta_res = std::sqrt(res);
  r.eta_sta = std::sqrt(sta);
  r.eta_nor = std::sqrt(nor);
  r.eta_tan = std::sqrt(tan);
  r.osc = std::sqrt(osc);
  r.eta_total = total_estimator(r.cells, r.k);
  r.eta_total_with_normal = std::sqrt(res + tan + sta + osc + nor);
  const double sum = r.eta_res + r.eta_sta + r.eta_nor + r.eta_tan;
  if (sum > 0.0)
    r.contributions = {100.0 * r.eta_res / sum, 100.0 * r.eta_sta / sum, 100.0 * r.eta_nor / sum,
                       100.0 * r.eta_tan / sum};
  else
    r.contributions = {0.0, 0.0, 0.0, 0.0};
}

EstimatorReport estimate(const Mesh& mesh, const ProblemSpec& problem, const HhoSolution& solution,
                         Execution exec)
{
  validate(problem, mesh);
  const int k = solution.k;
  EstimatorReport report;
  report.k = k;
  report.cells.resize(mesh.num_cells());

  std::vector<CellData> data(mesh.num_cells());
  for_each_index(exec, mesh.num_cells(), [&](std::size_t c) {
    data[c] = cell_terms(mesh, problem, solution, c, report.cells[c]);
  });

  // interface jumps, once per face: [tangential, normal] squared norms
  std::vector<std::array<double, 2>> jumps(mesh.num_faces(), {0.0, 0.0});
  for_each_index(exec, mesh.num_faces(), [&](std::size_t f) {
    const Face& face = mesh.faces()[f];
    if (face.is_boundary())
      return;
    const CellData& d1 = data[face.cells[0]];
    const CellData& d2 = data[face.cells[1]];
    const SegmentGeometry seg = mesh.face_geometry(f);
    const Point tangent = seg.tangent();
    const LineQuadrature rule = map_to_face(face_quadrature(2 * k + 2), seg);
    double jt = 0.0;
    double jn = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point x = seg.at(rule.points[q]);
      const Eigen::Vector2d g1 = evaluate_gradient(d1.spaces->cell, solution.cells[face.cells[0]], x);
      const Eigen::Vector2d g2 = evaluate_gradient(d2.spaces->cell, solution.cells[face.cells[1]], x);
      const double t = (g1 - g2).dot(tangent);
      const Eigen::Vector2d r1 = evaluate_gradient(d1.spaces->cell, d1.recon, x);
      const Eigen::Vector2d r2 = evaluate_gradient(d2.spaces->cell, d2.recon, x);
      const double n = (d1.diffusion * r1 - d2.diffusion * r2).dot(face.normal);
      jt += rule.weights[q] * t * t;
      jn += rule.weights[q] * n * n;
    }
    jumps[f] = {jt, jn};
  });

  for_each_index(exec, mesh.num_cells(), [&](std::size_t c) {
    const CellData& d = data[c];
    CellEstimate& e = report.cells[c];
    const double a = d.diffusion;
    const double scale = d.spaces->geometry.diameter / (k + 1.0);
    double tan_int = 0.0;
    double nor_int = 0.0;
    for (const std::size_t f : mesh.cells()[c].faces) {
      const Face& face = mesh.faces()[f];
      if (face.is_boundary())
        continue;
      const double a_min = std::min(data[face.cells[0]].diffusion, data[face.cells[1]].diffusion);
      tan_int += a_min * jumps[f][0];
      nor_int += jumps[f][1];
    }
    e.eta_tan = std::sqrt(scale) * (std::sqrt(tan_int) + std::sqrt(a * d.tan_dirichlet));
    e.eta_nor = std::sqrt(scale / a) * (std::sqrt(nor_int) + std::sqrt(d.nor_neumann));
    e.osc_gN = std::sqrt(scale / a) * std::sqrt(d.osc_gN);
    e.osc_gD = std::sqrt(scale * a) * std::sqrt(d.osc_gD);
  });

  summarize(report);
  return report;
}

double energy_error(const Mesh& mesh, const ProblemSpec& problem, const HhoSolution& solution,
                    int quadrature_bump, Execution exec)
{
  if (!problem.exact || !problem.exact->gradient)
    throw SpecError("energy error needs an exact solution gradient");
  const int k = solution.k;
  // The error is the reported quantity: a few orders above the data rule.
  const int exactness =
      std::min(data_exactness(k) + error_exactness_margin + quadrature_bump,
               max_quadrature_exactness);
  const auto& grad_u = problem.exact->gradient;

  std::vector<double> local(mesh.num_cells(), 0.0);
  for_each_index(exec, mesh.num_cells(), [&](std::size_t c) {
    const LocalSpaces s(mesh, c, k);
    const double a = problem.diffusion_of(mesh.cells()[c].region);
    int apex = -1;
    if (problem.singular_point)
      for (int i = 0; i < 3; ++i)
        if ((s.geometry.vertices[i] - *problem.singular_point).norm() <=
            1e-12 * s.geometry.diameter)
          apex = i;
    const QuadratureRule rule = apex >= 0
                                    ? graded_cell_quadrature(s.geometry, apex, exactness)
                                    : map_to_cell(cell_quadrature(exactness), s.geometry);
    double err2 = 0.0;
    for (std::size_t q = 0; q < rule.size(); ++q) {
      const Point& x = rule.points[q];
      const Eigen::Vector2d d = grad_u(x) - evaluate_gradient(s.cell, solution.cells[c], x);
      err2 += rule.weights[q] * d.squaredNorm();
    }
    const Eigen::VectorXd u = solution.local(mesh, c);
    local[c] = a * (err2 + stabilization_energy(s, u));
  });

  double total = 0.0;
  for (const double v : local)
    total += v;
  return std::sqrt(total);
}

} // namespace hho
