#include "geoslice/mesh_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace geoslice {

TetFormat tet_format_from_string(const std::string& s) {
    if (s == "tetgen" || s == "tetgen-node-ele" || s == "node-ele") return TetFormat::TetgenNodeEle;
    if (s == "vtk" || s == "vtk-legacy-ascii") return TetFormat::VtkLegacyAscii;
    throw Error("unknown mesh format '" + s + "' (expected tetgen or vtk)");
}

namespace {

std::string strip_comment(const std::string& line) {
    auto pos = line.find('#');
    return pos == std::string::npos ? line : line.substr(0, pos);
}

// Next non-empty, non-comment line as a token stream.
bool next_data_line(std::istream& in, std::istringstream& out) {
    std::string line;
    while (std::getline(in, line)) {
        std::string data = strip_comment(line);
        std::istringstream ss(data);
        std::string tok;
        if (ss >> tok) {
            out = std::istringstream(data);
            return true;
        }
    }
    return false;
}

std::pair<std::string, std::string> tetgen_pair(const std::string& path) {
    std::string base = path;
    if (base.size() > 5 && base.substr(base.size() - 5) == ".node")
        base = base.substr(0, base.size() - 5);
    else if (base.size() > 4 && base.substr(base.size() - 4) == ".ele")
        base = base.substr(0, base.size() - 4);
    return {base + ".node", base + ".ele"};
}

TetMesh load_tetgen(const std::string& path) {
    auto [node_path, ele_path] = tetgen_pair(path);
    std::ifstream nodes(node_path);
    if (!nodes) throw Error("cannot open " + node_path);
    std::ifstream eles(ele_path);
    if (!eles) throw Error("cannot open " + ele_path);

    std::istringstream ss;
    if (!next_data_line(nodes, ss)) throw Error(node_path + ": missing header");
    long n_points = 0;
    int dim = 3;
    ss >> n_points >> dim;
    if (n_points <= 0 || dim != 3) throw Error(node_path + ": bad header (need 3D points)");

    std::vector<Vec3> verts(n_points);
    long first_index = -1;
    for (long i = 0; i < n_points; ++i) {
        if (!next_data_line(nodes, ss)) throw Error(node_path + ": truncated point list");
        long idx;
        Vec3 p;
        if (!(ss >> idx >> p.x() >> p.y() >> p.z())) throw Error(node_path + ": parse failure at point " + std::to_string(i));
        if (first_index < 0) first_index = idx; // 0- or 1-based autodetect
        long slot = idx - first_index;
        if (slot < 0 || slot >= n_points) throw Error(node_path + ": point index out of range");
        verts[slot] = p;
    }

    if (!next_data_line(eles, ss)) throw Error(ele_path + ": missing header");
    long n_tets = 0;
    int nodes_per_tet = 4;
    ss >> n_tets >> nodes_per_tet;
    if (n_tets <= 0) throw Error(ele_path + ": bad header");
    if (nodes_per_tet != 4) throw Error(ele_path + ": only 4-node tetrahedra are supported");

    std::vector<std::array<int, 4>> tets(n_tets);
    for (long i = 0; i < n_tets; ++i) {
        if (!next_data_line(eles, ss)) throw Error(ele_path + ": truncated element list");
        long idx;
        std::array<long, 4> v;
        if (!(ss >> idx >> v[0] >> v[1] >> v[2] >> v[3]))
            throw Error(ele_path + ": parse failure at element " + std::to_string(i));
        for (int k = 0; k < 4; ++k) {
            long t = v[k] - first_index;
            if (t < 0 || t >= n_points)
                throw Error(ele_path + ": element " + std::to_string(i) + " references vertex " +
                            std::to_string(v[k]) + " (index out of range)");
            tets[i][k] = int(t);
        }
    }
    return make_tet_mesh(std::move(verts), std::move(tets));
}

TetMesh load_vtk(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    std::string line;
    bool grid_seen = false;
    std::vector<Vec3> verts;
    std::vector<std::array<int, 4>> tets;
    std::vector<std::vector<int>> cells;

    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        if (!(ss >> tag)) continue;
        if (tag == "DATASET") {
            std::string kind;
            ss >> kind;
            if (kind != "UNSTRUCTURED_GRID") throw Error(path + ": DATASET must be UNSTRUCTURED_GRID");
            grid_seen = true;
        } else if (tag == "POINTS") {
            long n = 0;
            ss >> n;
            if (n <= 0) throw Error(path + ": bad POINTS count");
            verts.resize(n);
            long got = 0;
            while (got < 3 * n) {
                double v;
                if (!(in >> v)) throw Error(path + ": truncated POINTS block");
                verts[got / 3][got % 3] = v;
                ++got;
            }
        } else if (tag == "CELLS") {
            long n = 0, total = 0;
            ss >> n >> total;
            cells.resize(n);
            for (long i = 0; i < n; ++i) {
                long cnt;
                if (!(in >> cnt)) throw Error(path + ": truncated CELLS block");
                cells[i].resize(cnt);
                for (long k = 0; k < cnt; ++k)
                    if (!(in >> cells[i][k])) throw Error(path + ": truncated CELLS block");
            }
        } else if (tag == "CELL_TYPES") {
            long n = 0;
            ss >> n;
            if (std::size_t(n) != cells.size()) throw Error(path + ": CELL_TYPES count mismatch");
            for (long i = 0; i < n; ++i) {
                int type;
                if (!(in >> type)) throw Error(path + ": truncated CELL_TYPES block");
                if (type != 10) throw Error(path + ": cell " + std::to_string(i) + " has type " +
                                            std::to_string(type) + " (only tetrahedra, type 10, are supported)");
                if (cells[i].size() != 4) throw Error(path + ": tetrahedron cell with " +
                                                      std::to_string(cells[i].size()) + " points");
                tets.push_back({cells[i][0], cells[i][1], cells[i][2], cells[i][3]});
            }
        }
    }
    if (!grid_seen) throw Error(path + ": not a VTK unstructured grid");
    if (verts.empty() || tets.empty()) throw Error(path + ": missing POINTS or CELLS");
    return make_tet_mesh(std::move(verts), std::move(tets));
}

} // namespace

TetMesh load_tet_mesh(const std::string& path, TetFormat format) {
    switch (format) {
    case TetFormat::TetgenNodeEle: return load_tetgen(path);
    case TetFormat::VtkLegacyAscii: return load_vtk(path);
    }
    throw Error("unreachable");
}

void write_tetgen(const TetMesh& mesh, const std::string& base_path) {
    {
        std::ofstream out(base_path + ".node");
        if (!out) throw Error("cannot open " + base_path + ".node for writing");
        out << mesh.vertex_count() << " 3 0 0\n";
        char line[256];
        for (int v = 0; v < mesh.vertex_count(); ++v) {
            const Vec3& p = mesh.vertices[v];
            std::snprintf(line, sizeof(line), "%d %.12g %.12g %.12g\n", v, p.x(), p.y(), p.z());
            out << line;
        }
    }
    std::ofstream out(base_path + ".ele");
    if (!out) throw Error("cannot open " + base_path + ".ele for writing");
    out << mesh.tet_count() << " 4 0\n";
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets[t];
        out << t << ' ' << tet[0] << ' ' << tet[1] << ' ' << tet[2] << ' ' << tet[3] << '\n';
    }
}

void write_vtk(const TetMesh& mesh, const std::string& path,
               const std::vector<std::pair<std::string, std::vector<double>>>& point_fields) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << "# vtk DataFile Version 3.0\ngeoslice tetrahedral mesh\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.vertex_count() << " double\n";
    char line[256];
    for (const Vec3& p : mesh.vertices) {
        std::snprintf(line, sizeof(line), "%.12g %.12g %.12g\n", p.x(), p.y(), p.z());
        out << line;
    }
    out << "CELLS " << mesh.tet_count() << ' ' << mesh.tet_count() * 5 << '\n';
    for (const auto& tet : mesh.tets)
        out << "4 " << tet[0] << ' ' << tet[1] << ' ' << tet[2] << ' ' << tet[3] << '\n';
    out << "CELL_TYPES " << mesh.tet_count() << '\n';
    for (int t = 0; t < mesh.tet_count(); ++t) out << "10\n";
    if (!point_fields.empty()) {
        out << "POINT_DATA " << mesh.vertex_count() << '\n';
        for (const auto& [name, values] : point_fields) {
            if (int(values.size()) != mesh.vertex_count())
                throw Error("point field '" + name + "' size mismatch");
            out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
            for (double v : values) {
                std::snprintf(line, sizeof(line), "%.12g\n", v);
                out << line;
            }
        }
    }
}

} // namespace geoslice
