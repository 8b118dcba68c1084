#include "hho/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>

#include "hho/errors.hpp"

namespace hho {

namespace {

double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

double signed_area(const Point& p0, const Point& p1, const Point& p2)
{
  return 0.5 * cross(p1 - p0, p2 - p0);
}

// Rotates t so that its longest edge lies opposite local vertex 0.
Triangle rotate_to_longest_edge(const Triangle& t, const std::vector<Point>& pts)
{
  std::array<double, 3> len{};
  for (int i = 0; i < 3; ++i)
    len[i] = (pts[t[(i + 1) % 3]] - pts[t[(i + 2) % 3]]).norm();
  const double longest = *std::max_element(len.begin(), len.end());
  int best = -1;
  for (int i = 0; i < 3; ++i) {
    if (len[i] < longest * (1.0 - 1e-12))
      continue;
    if (best < 0 || t[i] < t[best])
      best = i;
  }
  return {t[best], t[(best + 1) % 3], t[(best + 2) % 3]};
}

struct EdgeUse {
  std::size_t cell;
  int local;
  std::size_t from; // traversal direction within the counterclockwise cell
  std::size_t to;
};

void check_hanging_vertices(const std::vector<Point>& pts, const std::vector<EdgeKey>& edges)
{
  std::vector<std::size_t> candidates;
  for (const auto& [a, b] : edges) {
    candidates.push_back(a);
    candidates.push_back(b);
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

  for (const auto& [a, b] : edges) {
    const Point d = pts[b] - pts[a];
    const double len2 = d.squaredNorm();
    for (const std::size_t w : candidates) {
      if (w == a || w == b)
        continue;
      const Point rel = pts[w] - pts[a];
      const double t = rel.dot(d) / len2;
      if (t <= 1e-12 || t >= 1.0 - 1e-12)
        continue;
      if ((rel - t * d).norm() <= 1e-10 * std::sqrt(len2))
        throw StructuralError("hanging vertex " + std::to_string(w) + " on edge (" +
                              std::to_string(a) + ", " + std::to_string(b) + ")");
    }
  }
}

} // namespace

std::size_t Mesh::num_interior_faces() const { return count_faces(FaceKind::interior); }

std::size_t Mesh::count_faces(FaceKind kind) const
{
  return static_cast<std::size_t>(
      std::count_if(faces_.begin(), faces_.end(), [kind](const Face& f) { return f.kind == kind; }));
}

std::span<const std::size_t> Mesh::cells_around_vertex(std::size_t v) const
{
  return {star_cells_.data() + star_offsets_[v], star_offsets_[v + 1] - star_offsets_[v]};
}

TriangleGeometry Mesh::cell_geometry(std::size_t cell) const
{
  const Cell& c = cells_[cell];
  TriangleGeometry g;
  for (int i = 0; i < 3; ++i)
    g.vertices[i] = vertices_[c.vertices[i]];
  g.centroid = (g.vertices[0] + g.vertices[1] + g.vertices[2]) / 3.0;
  g.area = c.area;
  g.diameter = c.diameter;
  return g;
}

SegmentGeometry Mesh::face_geometry(std::size_t face) const
{
  const Face& f = faces_[face];
  return {vertices_[f.vertices[0]], vertices_[f.vertices[1]], f.length};
}

Point Mesh::outward_normal(std::size_t cell, int local_face) const
{
  const Cell& c = cells_[cell];
  return static_cast<double>(c.face_signs[local_face]) * faces_[c.faces[local_face]].normal;
}

int Mesh::local_face_index(std::size_t cell, std::size_t face) const
{
  const Cell& c = cells_[cell];
  for (int i = 0; i < 3; ++i)
    if (c.faces[i] == face)
      return i;
  return -1;
}

std::vector<Triangle> Mesh::triangles() const
{
  std::vector<Triangle> out;
  out.reserve(cells_.size());
  for (const Cell& c : cells_)
    out.push_back(c.vertices);
  return out;
}

std::vector<int> Mesh::regions() const
{
  std::vector<int> out;
  out.reserve(cells_.size());
  for (const Cell& c : cells_)
    out.push_back(c.region);
  return out;
}

double Mesh::total_area() const
{
  double a = 0.0;
  for (const Cell& c : cells_)
    a += c.area;
  return a;
}

double Mesh::min_angle() const
{
  double best = std::numbers::pi;
  for (const Cell& c : cells_) {
    for (int i = 0; i < 3; ++i) {
      const Point e1 = vertices_[c.vertices[(i + 1) % 3]] - vertices_[c.vertices[i]];
      const Point e2 = vertices_[c.vertices[(i + 2) % 3]] - vertices_[c.vertices[i]];
      const double cosine = std::clamp(e1.dot(e2) / (e1.norm() * e2.norm()), -1.0, 1.0);
      best = std::min(best, std::acos(cosine));
    }
  }
  return best;
}

Mesh assemble_mesh(std::vector<Point> vertices, std::vector<Triangle> triangles,
                   const BoundaryLabels& boundary_labels, std::vector<int> region_ids,
                   bool keep_vertex_order)
{
  if (triangles.empty())
    throw StructuralError("mesh has no triangles");
  if (region_ids.empty())
    region_ids.assign(triangles.size(), 0);
  if (region_ids.size() != triangles.size())
    throw StructuralError("region id count does not match triangle count");
  for (const Point& p : vertices)
    if (!std::isfinite(p.x()) || !std::isfinite(p.y()))
      throw GeometryError("non-finite vertex coordinate");

  for (std::size_t c = 0; c < triangles.size(); ++c) {
    Triangle& t = triangles[c];
    for (const std::size_t v : t)
      if (v >= vertices.size())
        throw StructuralError("triangle " + std::to_string(c) + " references vertex " +
                              std::to_string(v) + " out of range");
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2])
      throw StructuralError("triangle " + std::to_string(c) + " repeats a vertex");
    if (!(signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0))
      throw OrientationError("triangle " + std::to_string(c) +
                             " is not counterclockwise (non-positive signed area)");
    if (!keep_vertex_order)
      t = rotate_to_longest_edge(t, vertices);
  }

  std::map<EdgeKey, std::vector<EdgeUse>> uses;
  for (std::size_t c = 0; c < triangles.size(); ++c) {
    const Triangle& t = triangles[c];
    for (int i = 0; i < 3; ++i) {
      const std::size_t from = t[(i + 1) % 3];
      const std::size_t to = t[(i + 2) % 3];
      uses[make_edge_key(from, to)].push_back({c, i, from, to});
    }
  }

  std::vector<EdgeKey> single_edges;
  for (const auto& [key, list] : uses) {
    if (list.size() > 2)
      throw StructuralError("edge (" + std::to_string(key.first) + ", " +
                            std::to_string(key.second) + ") shared by more than two triangles");
    if (list.size() == 2 && list[0].from == list[1].from)
      throw StructuralError("inconsistent orientation across edge (" +
                            std::to_string(key.first) + ", " + std::to_string(key.second) + ")");
    if (list.size() == 1)
      single_edges.push_back(key);
  }
  check_hanging_vertices(vertices, single_edges);

  Mesh mesh;
  mesh.cells_.resize(triangles.size());
  for (std::size_t c = 0; c < triangles.size(); ++c) {
    Cell& cell = mesh.cells_[c];
    cell.vertices = triangles[c];
    cell.region = region_ids[c];
    cell.refinement_edge = 0;
    const auto& t = triangles[c];
    cell.area = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    double diam = 0.0;
    for (int i = 0; i < 3; ++i)
      diam = std::max(diam, (vertices[t[(i + 1) % 3]] - vertices[t[(i + 2) % 3]]).norm());
    cell.diameter = diam;
  }

  mesh.faces_.reserve(uses.size());
  for (const auto& [key, list] : uses) {
    // list is in ascending cell order by construction
    const EdgeUse& first = list[0];
    Face face;
    face.vertices = {first.from, first.to};
    const Point d = vertices[first.to] - vertices[first.from];
    face.length = d.norm();
    face.normal = Point(d.y(), -d.x()) / face.length;
    face.cells[0] = first.cell;
    face.cells[1] = first.cell;
    if (list.size() == 2) {
      face.kind = FaceKind::interior;
      face.cells[1] = list[1].cell;
    } else {
      const auto label = boundary_labels.find(key);
      if (label == boundary_labels.end())
        throw LabelingError("boundary edge (" + std::to_string(key.first) + ", " +
                            std::to_string(key.second) + ") has no label");
      face.kind = label->second == BoundaryKind::dirichlet ? FaceKind::dirichlet : FaceKind::neumann;
      mesh.labels_.emplace(key, label->second);
    }
    const std::size_t id = mesh.faces_.size();
    mesh.faces_.push_back(face);
    for (std::size_t u = 0; u < list.size(); ++u) {
      Cell& cell = mesh.cells_[list[u].cell];
      cell.faces[list[u].local] = id;
      cell.face_signs[list[u].local] = u == 0 ? 1 : -1;
    }
  }

  mesh.vertices_ = std::move(vertices);
  const std::size_t nv = mesh.vertices_.size();
  mesh.star_offsets_.assign(nv + 1, 0);
  for (const Cell& c : mesh.cells_)
    for (const std::size_t v : c.vertices)
      ++mesh.star_offsets_[v + 1];
  for (std::size_t v = 0; v < nv; ++v)
    mesh.star_offsets_[v + 1] += mesh.star_offsets_[v];
  mesh.star_cells_.resize(mesh.star_offsets_[nv]);
  std::vector<std::size_t> fill(mesh.star_offsets_.begin(), mesh.star_offsets_.end() - 1);
  for (std::size_t c = 0; c < mesh.cells_.size(); ++c)
    for (const std::size_t v : mesh.cells_[c].vertices)
      mesh.star_cells_[fill[v]++] = c;

  return mesh;
}

Mesh build_connectivity(std::vector<Point> vertices, std::vector<Triangle> triangles,
                        const BoundaryLabels& boundary_labels, std::vector<int> region_ids)
{
  return assemble_mesh(std::move(vertices), std::move(triangles), boundary_labels,
                       std::move(region_ids), false);
}

Mesh generate_structured_mesh(Domain domain, int n)
{
  if (n < 1)
    throw ParameterError("structured mesh needs n >= 1 subdivisions");
  if (domain == Domain::kellogg_square && n % 2 != 0)
    throw ParameterError("kellogg mesh needs an even n so that cells do not straddle the axes");

  const int per_side = domain == Domain::lshape ? 2 * n : n;
  const double step = 2.0 / per_side;
  auto removed = [&](int i, int j) {
    // square (i, j) lies in the quadrant (0,1)x(-1,0)
    return domain == Domain::lshape && 2 * i >= per_side && 2 * j < per_side;
  };

  std::vector<long> index((per_side + 1) * (per_side + 1), -1);
  auto grid = [&](int i, int j) -> long& { return index[j * (per_side + 1) + i]; };
  for (int j = 0; j < per_side; ++j)
    for (int i = 0; i < per_side; ++i)
      if (!removed(i, j))
        for (int dj = 0; dj < 2; ++dj)
          for (int di = 0; di < 2; ++di)
            grid(i + di, j + dj) = 0;

  std::vector<Point> pts;
  for (int j = 0; j <= per_side; ++j)
    for (int i = 0; i <= per_side; ++i)
      if (grid(i, j) >= 0) {
        grid(i, j) = static_cast<long>(pts.size());
        pts.emplace_back(-1.0 + i * step, -1.0 + j * step);
      }
  // exact zeros on the axes keep the Kellogg regions and the L-shape corner clean
  for (Point& p : pts) {
    if (std::abs(p.x()) < 0.25 * step)
      p.x() = 0.0;
    if (std::abs(p.y()) < 0.25 * step)
      p.y() = 0.0;
  }

  std::vector<Triangle> tris;
  std::vector<int> regions;
  for (int j = 0; j < per_side; ++j) {
    for (int i = 0; i < per_side; ++i) {
      if (removed(i, j))
        continue;
      const auto p00 = static_cast<std::size_t>(grid(i, j));
      const auto p10 = static_cast<std::size_t>(grid(i + 1, j));
      const auto p01 = static_cast<std::size_t>(grid(i, j + 1));
      const auto p11 = static_cast<std::size_t>(grid(i + 1, j + 1));
      tris.push_back({p00, p10, p11});
      tris.push_back({p00, p11, p01});
      int region = 0;
      if (domain == Domain::kellogg_square) {
        const double cx = -1.0 + (i + 0.5) * step;
        const double cy = -1.0 + (j + 0.5) * step;
        region = cx * cy > 0.0 ? 1 : 0;
      }
      regions.push_back(region);
      regions.push_back(region);
    }
  }

  std::map<EdgeKey, int> count;
  for (const Triangle& t : tris)
    for (int e = 0; e < 3; ++e)
      ++count[make_edge_key(t[e], t[(e + 1) % 3])];
  BoundaryLabels labels;
  for (const auto& [key, c] : count)
    if (c == 1)
      labels.emplace(key, BoundaryKind::dirichlet);

  return build_connectivity(std::move(pts), std::move(tris), labels, std::move(regions));
}

Mesh refine_nvb(const Mesh& mesh, std::span<const std::size_t> marked)
{
  const auto& cells = mesh.cells();
  const auto& faces = mesh.faces();
  std::vector<char> face_marked(faces.size(), 0);
  std::vector<std::size_t> queue;

  auto mark_face = [&](std::size_t f) {
    if (face_marked[f])
      return;
    face_marked[f] = 1;
    queue.push_back(faces[f].cells[0]);
    if (!faces[f].is_boundary())
      queue.push_back(faces[f].cells[1]);
  };

  for (const std::size_t c : marked) {
    if (c >= cells.size())
      throw ParameterError("marked cell " + std::to_string(c) + " out of range");
    mark_face(cells[c].faces[0]);
  }
  if (queue.empty())
    return mesh;

  // closure: a cell with any marked edge must also bisect its refinement edge
  while (!queue.empty()) {
    const std::size_t c = queue.back();
    queue.pop_back();
    const Cell& cell = cells[c];
    if (face_marked[cell.faces[0]])
      continue;
    if (face_marked[cell.faces[1]] || face_marked[cell.faces[2]])
      mark_face(cell.faces[0]);
  }

  std::vector<Point> pts = mesh.vertices();
  std::map<EdgeKey, std::size_t> midpoint;
  for (std::size_t f = 0; f < faces.size(); ++f) {
    if (!face_marked[f])
      continue;
    const auto [a, b] = faces[f].vertices;
    midpoint.emplace(make_edge_key(a, b), pts.size());
    pts.push_back(0.5 * (pts[a] + pts[b]));
  }

  std::vector<Triangle> tris;
  std::vector<int> regions;
  tris.reserve(cells.size() + 2 * midpoint.size());

  // (p0, p1, p2): refinement edge p1-p2. Children inherit the parent's outer
  // edges as refinement edges, so recursion depth is at most two.
  auto bisect = [&](auto&& self, const Triangle& t, int region) -> void {
    const auto mid = midpoint.find(make_edge_key(t[1], t[2]));
    if (mid == midpoint.end()) {
      tris.push_back(t);
      regions.push_back(region);
      return;
    }
    const std::size_t m = mid->second;
    self(self, Triangle{m, t[0], t[1]}, region);
    self(self, Triangle{m, t[2], t[0]}, region);
  };
  for (const Cell& cell : cells)
    bisect(bisect, cell.vertices, cell.region);

  BoundaryLabels labels;
  for (const auto& [key, kind] : mesh.boundary_labels()) {
    const auto mid = midpoint.find(key);
    if (mid == midpoint.end()) {
      labels.emplace(key, kind);
    } else {
      labels.emplace(make_edge_key(key.first, mid->second), kind);
      labels.emplace(make_edge_key(mid->second, key.second), kind);
    }
  }

  return assemble_mesh(std::move(pts), std::move(tris), labels, std::move(regions), true);
}

Mesh refine_uniform(const Mesh& mesh)
{
  std::vector<std::size_t> all(mesh.num_cells());
  for (std::size_t c = 0; c < all.size(); ++c)
    all[c] = c;
  const Mesh once = refine_nvb(mesh, all);
  all.resize(once.num_cells());
  for (std::size_t c = 0; c < all.size(); ++c)
    all[c] = c;
  return refine_nvb(once, all);
}

} // namespace hho
