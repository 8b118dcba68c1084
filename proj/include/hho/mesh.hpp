#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hho {

using Point = Eigen::Vector2d;
using Triangle = std::array<std::size_t, 3>;

enum class BoundaryKind { dirichlet, neumann };
enum class FaceKind { interior, dirichlet, neumann };

/// Undirected edge identified by its sorted vertex pair.
using EdgeKey = std::pair<std::size_t, std::size_t>;
using BoundaryLabels = std::map<EdgeKey, BoundaryKind>;

inline EdgeKey make_edge_key(std::size_t a, std::size_t b)
{
  return a < b ? EdgeKey{a, b} : EdgeKey{b, a};
}

struct TriangleGeometry {
  std::array<Point, 3> vertices;
  Point centroid;
  double area = 0.0;
  double diameter = 0.0;
};

/// Straight segment from `a` to `b`. The parameter t in [0, 1] runs from a to b.
struct SegmentGeometry {
  Point a;
  Point b;
  double length = 0.0;

  Point at(double t) const { return a + t * (b - a); }
  Point tangent() const { return (b - a) / length; }
};

struct Face {
  std::array<std::size_t, 2> vertices{};
  /// Unit normal. Boundary faces: outward. Interior faces: points out of cells[0].
  Point normal = Point::Zero();
  double length = 0.0;
  FaceKind kind = FaceKind::interior;
  /// cells[0] < cells[1] for interior faces; cells[1] unused on the boundary.
  std::array<std::size_t, 2> cells{};

  bool is_boundary() const { return kind != FaceKind::interior; }
  std::size_t cell_count() const { return is_boundary() ? 1 : 2; }
};

/// Triangle with counterclockwise vertices. Local face i is opposite local vertex i.
struct Cell {
  Triangle vertices{};
  std::array<std::size_t, 3> faces{};
  /// +1 when the face normal is the outward normal of this cell, -1 otherwise.
  std::array<int, 3> face_signs{};
  double diameter = 0.0;
  double area = 0.0;
  int region = 0;
  /// Local index of the edge bisected next (newest-vertex bisection).
  int refinement_edge = 0;
};

/// Conforming triangulation. Immutable once built; refinement returns a new mesh.
class Mesh {
public:
  const std::vector<Point>& vertices() const { return vertices_; }
  const std::vector<Cell>& cells() const { return cells_; }
  const std::vector<Face>& faces() const { return faces_; }
  const BoundaryLabels& boundary_labels() const { return labels_; }

  std::size_t num_vertices() const { return vertices_.size(); }
  std::size_t num_cells() const { return cells_.size(); }
  std::size_t num_faces() const { return faces_.size(); }
  std::size_t num_interior_faces() const;
  std::size_t num_boundary_faces() const { return num_faces() - num_interior_faces(); }
  std::size_t count_faces(FaceKind kind) const;

  /// Cells sharing vertex v (the vertex star).
  std::span<const std::size_t> cells_around_vertex(std::size_t v) const;

  TriangleGeometry cell_geometry(std::size_t cell) const;
  SegmentGeometry face_geometry(std::size_t face) const;
  Point outward_normal(std::size_t cell, int local_face) const;
  /// Local index of `face` in `cell`, or -1 when not incident.
  int local_face_index(std::size_t cell, std::size_t face) const;

  /// Triangles in stored vertex order (refinement edge between local vertices 1 and 2).
  std::vector<Triangle> triangles() const;
  std::vector<int> regions() const;

  double total_area() const;
  /// Smallest interior angle over all cells, in radians.
  double min_angle() const;

private:
  friend Mesh assemble_mesh(std::vector<Point>, std::vector<Triangle>, const BoundaryLabels&,
                            std::vector<int>, bool);

  std::vector<Point> vertices_;
  std::vector<Cell> cells_;
  std::vector<Face> faces_;
  BoundaryLabels labels_;
  std::vector<std::size_t> star_offsets_;
  std::vector<std::size_t> star_cells_;
};

/// Builds a mesh from raw arrays. The refinement edge of each triangle is its
/// longest edge (ties: smallest opposite-vertex id); stored vertex order is
/// rotated so that edge lies between local vertices 1 and 2.
///
/// Throws StructuralError (edge shared by more than two triangles, hanging
/// vertex, bad index), OrientationError (clockwise or degenerate triangle) and
/// LabelingError (boundary edge without label).
Mesh build_connectivity(std::vector<Point> vertices, std::vector<Triangle> triangles,
                        const BoundaryLabels& boundary_labels, std::vector<int> region_ids);

/// Same as build_connectivity, but when `keep_vertex_order` is true the given
/// vertex order is kept and edge (v1, v2) is the refinement edge.
Mesh assemble_mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
                   const BoundaryLabels& boundary_labels, std::vector<int> region_ids,
                   bool keep_vertex_order);

enum class Domain { square, lshape, kellogg_square };

/// Structured right-triangle meshes.
///  - square: (-1,1)^2 with n subdivisions per side, 2 n^2 cells.
///  - lshape: (-1,1)^2 minus (0,1)x(-1,0); n subdivisions per unit side, 6 n^2 cells.
///  - kellogg_square: as square (n even) with region 1 where xy > 0, region 0 elsewhere.
/// All boundary edges are Dirichlet.
Mesh generate_structured_mesh(Domain domain, int n);

/// Newest-vertex bisection of the marked cells plus the conformity closure.
Mesh refine_nvb(const Mesh& mesh, std::span<const std::size_t> marked);

/// Bisects every cell twice (each cell is split into four).
Mesh refine_uniform(const Mesh& mesh);

/// ASCII format: `nv nc nb`, nv lines `x y`, nc lines `v0 v1 v2 region`,
/// nb lines `va vb label` (label D or N). '#' starts a comment.
Mesh read_mesh(std::istream& in);
Mesh read_mesh_file(const std::string& path);
void write_mesh(const Mesh& mesh, std::ostream& out);

} // namespace hho
