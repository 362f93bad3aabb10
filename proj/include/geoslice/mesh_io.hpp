#pragma once

#include "geoslice/tet_mesh.hpp"

#include <string>
#include <vector>

namespace geoslice {

enum class TetFormat { TetgenNodeEle, VtkLegacyAscii };

TetFormat tet_format_from_string(const std::string& s);

// path: for tetgen-node-ele, either the .node or the .ele file (the sibling
// is derived); for VTK, the .vtk file.
TetMesh load_tet_mesh(const std::string& path, TetFormat format);

// TetGen ASCII pair. base_path without extension; writes base.node/base.ele.
void write_tetgen(const TetMesh& mesh, const std::string& base_path);

// VTK legacy ASCII unstructured grid (cell type 10), with optional per-vertex
// scalar fields appended as POINT_DATA.
void write_vtk(const TetMesh& mesh, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_fields = {});

} // namespace geoslice
