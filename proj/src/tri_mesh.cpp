#include "geoslice/tri_mesh.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace geoslice {

Vec3 TriMesh::triangle_normal(int t) const {
    const auto& tri = triangles[t];
    Vec3 n = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
    double len = n.norm();
    if (len < 1e-300) return Vec3::Zero();
    return n / len;
}

double TriMesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    return 0.5 * (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]).norm();
}

double TriMesh::area() const {
    double a = 0.0;
    for (int t = 0; t < triangle_count(); ++t) a += triangle_area(t);
    return a;
}

Vec3 TriMesh::centroid() const {
    Vec3 c = Vec3::Zero();
    double total = 0.0;
    for (int t = 0; t < triangle_count(); ++t) {
        const auto& tri = triangles[t];
        double a = triangle_area(t);
        c += a * (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
        total += a;
    }
    if (total < 1e-300) {
        if (vertices.empty()) return Vec3::Zero();
        c = Vec3::Zero();
        for (const Vec3& v : vertices) c += v;
        return c / double(vertices.size());
    }
    return c / total;
}

namespace {

// edge key -> (count, first directed occurrence, owning triangle)
struct EdgeInfo {
    int count = 0;
    int a = -1, b = -1;
};

std::map<std::pair<int, int>, EdgeInfo> collect_edges(const TriMesh& m) {
    std::map<std::pair<int, int>, EdgeInfo> edges;
    for (const auto& tri : m.triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            auto key = std::minmax(a, b);
            EdgeInfo& info = edges[{key.first, key.second}];
            if (info.count == 0) {
                info.a = a;
                info.b = b;
            }
            info.count++;
        }
    }
    return edges;
}

} // namespace

std::vector<std::pair<int, int>> TriMesh::boundary_edges() const {
    std::vector<std::pair<int, int>> result;
    for (const auto& [key, info] : collect_edges(*this))
        if (info.count == 1) result.emplace_back(info.a, info.b);
    return result;
}

std::vector<std::vector<int>> TriMesh::boundary_loops() const {
    auto edges = boundary_edges();
    // next vertex along the boundary, following triangle winding
    std::map<int, int> next;
    for (const auto& [a, b] : edges) next[a] = b;

    std::vector<std::vector<int>> loops;
    std::map<int, bool> used;
    for (const auto& [a, b] : edges) {
        if (used[a]) continue;
        std::vector<int> loop;
        int v = a;
        while (true) {
            loop.push_back(v);
            used[v] = true;
            auto it = next.find(v);
            if (it == next.end()) break; // open chain (non-closed boundary)
            v = it->second;
            if (v == a) break;
            if (used.count(v) && used[v]) break;
        }
        loops.push_back(std::move(loop));
    }
    // deterministic order: largest loop first, ties by first vertex index
    std::sort(loops.begin(), loops.end(), [](const auto& x, const auto& y) {
        if (x.size() != y.size()) return x.size() > y.size();
        return x < y;
    });
    return loops;
}

bool TriMesh::is_edge_manifold() const {
    for (const auto& [key, info] : collect_edges(*this))
        if (info.count > 2) return false;
    return true;
}

bool TriMesh::has_consistent_orientation() const {
    // interior edges must appear once per direction
    std::map<std::pair<int, int>, int> directed;
    for (const auto& tri : triangles) {
        for (int e = 0; e < 3; ++e) {
            int a = tri[e], b = tri[(e + 1) % 3];
            if (++directed[{a, b}] > 1) return false;
        }
    }
    return true;
}

void TriMesh::compute_vertex_normals() {
    normals.assign(vertices.size(), Vec3::Zero());
    for (int t = 0; t < triangle_count(); ++t) {
        const auto& tri = triangles[t];
        Vec3 n = (vertices[tri[1]] - vertices[tri[0]]).cross(vertices[tri[2]] - vertices[tri[0]]);
        for (int k = 0; k < 3; ++k) normals[tri[k]] += n; // area-weighted
    }
    for (Vec3& n : normals) {
        double len = n.norm();
        if (len > 1e-300) n /= len;
    }
}

void TriMesh::validate() const {
    const int nv = vertex_count();
    for (std::size_t t = 0; t < triangles.size(); ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k)
            if (tri[k] < 0 || tri[k] >= nv)
                throw Error("triangle " + std::to_string(t) + ": vertex index out of range");
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw Error("triangle " + std::to_string(t) + ": repeated vertex");
    }
    if (!is_edge_manifold()) throw Error("surface is not edge-manifold");
    if (!has_consistent_orientation()) throw Error("surface orientation is inconsistent");
}

void write_obj(const TriMesh& m, std::ostream& out) {
    char line[256];
    for (const Vec3& v : m.vertices) {
        std::snprintf(line, sizeof(line), "v %.9f %.9f %.9f\n", v.x(), v.y(), v.z());
        out << line;
    }
    for (const auto& t : m.triangles) {
        std::snprintf(line, sizeof(line), "f %d %d %d\n", t[0] + 1, t[1] + 1, t[2] + 1);
        out << line;
    }
}

void write_obj(const TriMesh& m, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    write_obj(m, out);
}

TriMesh read_obj(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path);
    TriMesh m;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream ss(line);
        std::string tag;
        ss >> tag;
        if (tag == "v") {
            Vec3 v;
            ss >> v.x() >> v.y() >> v.z();
            m.vertices.push_back(v);
        } else if (tag == "f") {
            std::array<int, 3> tri;
            for (int k = 0; k < 3; ++k) {
                std::string tok;
                ss >> tok;
                tri[k] = std::stoi(tok.substr(0, tok.find('/'))) - 1;
            }
            m.triangles.push_back(tri);
        }
    }
    return m;
}

} // namespace geoslice
