#include "hho/vtu.hpp"

#include <fstream>
#include <limits>
#include <regex>
#include <sstream>

#include "hho/errors.hpp"

namespace hho {

void export_vtu(const Mesh& mesh, const std::vector<CellField>& fields, const std::string& path)
{
  for (const auto& [name, values] : fields)
    if (values.size() != mesh.num_cells())
      throw ParameterError("cell field '" + name + "' has " + std::to_string(values.size()) +
                           " entries for " + std::to_string(mesh.num_cells()) + " cells");

  std::ofstream out(path);
  if (!out)
    throw IoError("cannot write '" + path + "'");
  out.precision(std::numeric_limits<double>::max_digits10);

  out << "<?xml version=\"1.0\"?>\n"
      << "<VTKFile type=\"UnstructuredGrid\" version=\"0.1\" byte_order=\"LittleEndian\">\n"
      << "  <UnstructuredGrid>\n"
      << "    <Piece NumberOfPoints=\"" << mesh.num_vertices() << "\" NumberOfCells=\""
      << mesh.num_cells() << "\">\n";

  out << "      <Points>\n"
      << "        <DataArray type=\"Float64\" NumberOfComponents=\"3\" format=\"ascii\">\n";
  for (const Point& p : mesh.vertices())
    out << "          " << p.x() << ' ' << p.y() << " 0\n";
  out << "        </DataArray>\n      </Points>\n";

  out << "      <Cells>\n"
      << "        <DataArray type=\"Int64\" Name=\"connectivity\" format=\"ascii\">\n";
  for (const Cell& c : mesh.cells())
    out << "          " << c.vertices[0] << ' ' << c.vertices[1] << ' ' << c.vertices[2] << '\n';
  out << "        </DataArray>\n"
      << "        <DataArray type=\"Int64\" Name=\"offsets\" format=\"ascii\">\n";
  for (std::size_t i = 0; i < mesh.num_cells(); ++i)
    out << "          " << 3 * (i + 1) << '\n';
  out << "        </DataArray>\n"
      << "        <DataArray type=\"UInt8\" Name=\"types\" format=\"ascii\">\n";
  for (std::size_t i = 0; i < mesh.num_cells(); ++i)
    out << "          5\n";
  out << "        </DataArray>\n      </Cells>\n";

  out << "      <CellData>\n";
  for (const auto& [name, values] : fields) {
    out << "        <DataArray type=\"Float64\" Name=\"" << name << "\" format=\"ascii\">\n";
    for (const double v : values)
      out << "          " << v << '\n';
    out << "        </DataArray>\n";
  }
  out << "      </CellData>\n"
      << "    </Piece>\n  </UnstructuredGrid>\n</VTKFile>\n";
  if (!out)
    throw IoError("failed writing '" + path + "'");
}

VtuContents read_vtu(const std::string& path)
{
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();

  VtuContents out;
  std::smatch m;
  static const std::regex piece(R"rx(NumberOfPoints="(\d+)"\s+NumberOfCells="(\d+)")rx");
  if (!std::regex_search(text, m, piece))
    throw IoError("'" + path + "' has no Piece header");
  out.num_points = std::stoul(m[1]);
  out.num_cells = std::stoul(m[2]);

  const auto data_begin = text.find("<CellData>");
  const auto data_end = text.find("</CellData>");
  if (data_begin == std::string::npos || data_end == std::string::npos)
    return out;
  const std::string cell_data = text.substr(data_begin, data_end - data_begin);
  static const std::regex array(R"rx(<DataArray[^>]*Name="([^"]*)"[^>]*>([^<]*)</DataArray>)rx");
  for (auto it = std::sregex_iterator(cell_data.begin(), cell_data.end(), array);
       it != std::sregex_iterator(); ++it) {
    CellField field{(*it)[1], {}};
    std::istringstream values((*it)[2].str());
    for (double v; values >> v;)
      field.second.push_back(v);
    out.fields.push_back(std::move(field));
  }
  return out;
}

} // namespace hho
