#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

#include "hho/errors.hpp"
#include "hho/mesh.hpp"

namespace hho {

namespace {

// Whitespace tokenizer that drops everything after '#' on a line.
class TokenReader {
public:
  explicit TokenReader(std::istream& in)
  {
    std::string line;
    std::string all;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos)
        line.erase(hash);
      all += line;
      all += '\n';
    }
    stream_.str(all);
  }

  template <class T>
  T next(const char* what)
  {
    T value{};
    if (!(stream_ >> value))
      throw IoError(std::string("mesh file: failed to read ") + what);
    return value;
  }

private:
  std::istringstream stream_;
};

} // namespace

Mesh read_mesh(std::istream& in)
{
  TokenReader tokens(in);
  const auto nv = tokens.next<std::size_t>("vertex count");
  const auto nc = tokens.next<std::size_t>("cell count");
  const auto nb = tokens.next<std::size_t>("boundary edge count");

  std::vector<Point> vertices(nv);
  for (auto& p : vertices) {
    p.x() = tokens.next<double>("vertex x");
    p.y() = tokens.next<double>("vertex y");
  }
  std::vector<Triangle> tris(nc);
  std::vector<int> regions(nc);
  for (std::size_t c = 0; c < nc; ++c) {
    for (auto& v : tris[c])
      v = tokens.next<std::size_t>("cell vertex");
    const long region = tokens.next<long>("cell region");
    if (region < 0)
      throw IoError("mesh file: negative region id");
    regions[c] = static_cast<int>(region);
  }
  BoundaryLabels labels;
  for (std::size_t b = 0; b < nb; ++b) {
    const auto va = tokens.next<std::size_t>("boundary vertex");
    const auto vb = tokens.next<std::size_t>("boundary vertex");
    const auto label = tokens.next<std::string>("boundary label");
    if (label == "D")
      labels[make_edge_key(va, vb)] = BoundaryKind::dirichlet;
    else if (label == "N")
      labels[make_edge_key(va, vb)] = BoundaryKind::neumann;
    else
      throw IoError("mesh file: boundary label must be D or N, got '" + label + "'");
  }
  return build_connectivity(std::move(vertices), std::move(tris), labels, std::move(regions));
}

Mesh read_mesh_file(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open mesh file '" + path + "'");
  return read_mesh(in);
}

void write_mesh(const Mesh& mesh, std::ostream& out)
{
  const auto old_precision = out.precision(std::numeric_limits<double>::max_digits10);
  out << mesh.num_vertices() << ' ' << mesh.num_cells() << ' ' << mesh.boundary_labels().size()
      << '\n';
  for (const Point& p : mesh.vertices())
    out << p.x() << ' ' << p.y() << '\n';
  for (const Cell& c : mesh.cells())
    out << c.vertices[0] << ' ' << c.vertices[1] << ' ' << c.vertices[2] << ' ' << c.region
        << '\n';
  for (const auto& [key, kind] : mesh.boundary_labels())
    out << key.first << ' ' << key.second << ' ' << (kind == BoundaryKind::dirichlet ? 'D' : 'N')
        << '\n';
  out.precision(old_precision);
}

} // namespace hho
