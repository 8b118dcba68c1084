#pragma once

#include <string>
#include <utility>
#include <vector>

#include "hho/mesh.hpp"

namespace hho {

using CellField = std::pair<std::string, std::vector<double>>;

/// ASCII VTK XML unstructured grid with one Float64 cell-data array per field.
/// Throws ParameterError when a field length differs from the cell count and
/// IoError when the file cannot be written.
void export_vtu(const Mesh& mesh, const std::vector<CellField>& fields, const std::string& path);

struct VtuContents {
  std::size_t num_points = 0;
  std::size_t num_cells = 0;
  std::vector<CellField> fields;
};

/// Reads back files written by export_vtu (not a general VTU reader).
VtuContents read_vtu(const std::string& path);

} // namespace hho
