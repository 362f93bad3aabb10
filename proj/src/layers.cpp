#include "geoslice/layers.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

namespace geoslice {

std::vector<const IGDS*> LayerSet::layer(int i) const {
    std::vector<const IGDS*> out;
    for (const IGDS& s : surfaces)
        if (s.layer_index == i) out.push_back(&s);
    return out;
}

const IGDS* LayerSet::find(int i, int j) const {
    for (const IGDS& s : surfaces)
        if (s.layer_index == i && s.component_index == j) return &s;
    return nullptr;
}

Vec3 interpolate_point(const Vec3& vi, const Vec3& vj, double phi_i, double phi_j, double phi) {
    double denom = std::abs(phi_i - phi_j);
    if (denom < 1e-300) throw Error("interpolation on an edge with equal field values");
    double lo = std::min(phi_i, phi_j), hi = std::max(phi_i, phi_j);
    if (phi < lo || phi > hi) throw Error("interpolation value outside the edge range");
    return (std::abs(phi_i - phi) * vj + std::abs(phi_j - phi) * vi) / denom;
}

namespace {

struct MarchOutput {
    std::vector<Vec3> vertices;
    std::vector<std::pair<int, int>> source_edges; // per vertex
    std::vector<std::array<int, 3>> triangles;
    std::vector<int> source_tets; // per triangle
};

// Whole-mesh marching tetrahedra: shared interpolation vertices keyed by the
// generating tet-mesh edge, triangles oriented toward increasing field.
MarchOutput march(const TetMesh& mesh, const std::vector<double>& values, double phi, double tie_eps) {
    MarchOutput out;
    std::map<std::pair<int, int>, int> edge_vertex;

    auto effective = [&](int v) {
        double f = values[v];
        if (std::abs(f - phi) < tie_eps) return phi + tie_eps;
        return f;
    };
    auto vertex_on_edge = [&](int a, int b) {
        auto key = std::minmax(a, b);
        auto it = edge_vertex.find(key);
        if (it != edge_vertex.end()) return it->second;
        int id = int(out.vertices.size());
        out.vertices.push_back(
            interpolate_point(mesh.vertices[key.first], mesh.vertices[key.second],
                              effective(key.first), effective(key.second), phi));
        out.source_edges.push_back(key);
        edge_vertex.emplace(key, id);
        return id;
    };

    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets[t];
        int above[4], below[4];
        int na = 0, nb = 0;
        for (int k = 0; k < 4; ++k) {
            if (effective(tet[k]) > phi)
                above[na++] = tet[k];
            else
                below[nb++] = tet[k];
        }
        if (na == 0 || na == 4) continue;

        // gradient of the linear field in this tet orients the triangles
        Eigen::Matrix3d M;
        M.row(0) = mesh.vertices[tet[0]] - mesh.vertices[tet[3]];
        M.row(1) = mesh.vertices[tet[1]] - mesh.vertices[tet[3]];
        M.row(2) = mesh.vertices[tet[2]] - mesh.vertices[tet[3]];
        Vec3 du(values[tet[0]] - values[tet[3]], values[tet[1]] - values[tet[3]],
                values[tet[2]] - values[tet[3]]);
        Vec3 grad = M.partialPivLu().solve(du);

        auto emit = [&](int v0, int v1, int v2) {
            Vec3 n = (out.vertices[v1] - out.vertices[v0]).cross(out.vertices[v2] - out.vertices[v0]);
            if (n.dot(grad) < 0.0) std::swap(v1, v2);
            out.triangles.push_back({v0, v1, v2});
            out.source_tets.push_back(t);
        };

        if (na == 1 || na == 3) {
            int apex = (na == 1) ? above[0] : below[0];
            const int* others = (na == 1) ? below : above;
            int p0 = vertex_on_edge(apex, others[0]);
            int p1 = vertex_on_edge(apex, others[1]);
            int p2 = vertex_on_edge(apex, others[2]);
            emit(p0, p1, p2);
        } else {
            // 2-2 split: quad over the four crossing edges, ring order
            // (a0,b0) (a0,b1) (a1,b1) (a1,b0), split along its shorter diagonal
            int q0 = vertex_on_edge(above[0], below[0]);
            int q1 = vertex_on_edge(above[0], below[1]);
            int q2 = vertex_on_edge(above[1], below[1]);
            int q3 = vertex_on_edge(above[1], below[0]);
            double d02 = (out.vertices[q0] - out.vertices[q2]).squaredNorm();
            double d13 = (out.vertices[q1] - out.vertices[q3]).squaredNorm();
            if (d02 <= d13) {
                emit(q0, q1, q2);
                emit(q0, q2, q3);
            } else {
                emit(q1, q2, q3);
                emit(q1, q3, q0);
            }
        }
    }
    return out;
}

} // namespace

std::vector<IGDS> extract_igds(const TetMesh& mesh, const ScalarField& field, double phi,
                               double tie_eps) {
    if (tie_eps <= 0.0) tie_eps = 1e-9 * std::max(field.range(), 1e-30);
    MarchOutput m = march(mesh, field.values, phi, tie_eps);
    if (m.triangles.empty()) return {};

    // connected components over shared edges
    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        const auto& tri = m.triangles[t];
        for (int e = 0; e < 3; ++e)
            edge_tris[std::minmax(tri[e], tri[(e + 1) % 3])].push_back(int(t));
    }

    std::vector<int> comp(m.triangles.size(), -1);
    int comp_count = 0;
    for (std::size_t seed = 0; seed < m.triangles.size(); ++seed) {
        if (comp[seed] != -1) continue;
        std::vector<int> stack{int(seed)};
        comp[seed] = comp_count;
        while (!stack.empty()) {
            int t = stack.back();
            stack.pop_back();
            const auto& tri = m.triangles[t];
            for (int e = 0; e < 3; ++e)
                for (int other : edge_tris[std::minmax(tri[e], tri[(e + 1) % 3])])
                    if (comp[other] == -1) {
                        comp[other] = comp_count;
                        stack.push_back(other);
                    }
        }
        ++comp_count;
    }

    std::vector<IGDS> result(comp_count);
    std::vector<std::vector<int>> vmap(comp_count, std::vector<int>(m.vertices.size(), -1));
    for (std::size_t t = 0; t < m.triangles.size(); ++t) {
        IGDS& s = result[comp[t]];
        std::array<int, 3> tri;
        for (int k = 0; k < 3; ++k) {
            int v = m.triangles[t][k];
            int& mapped = vmap[comp[t]][v];
            if (mapped == -1) {
                mapped = s.surface.vertex_count();
                s.surface.vertices.push_back(m.vertices[v]);
                s.source_edges.push_back(m.source_edges[v]);
            }
            tri[k] = mapped;
        }
        s.surface.triangles.push_back(tri);
        s.source_tets.push_back(m.source_tets[t]);
    }

    for (IGDS& s : result) {
        s.phi = phi;
        s.surface.compute_vertex_normals();
        s.boundary_loops = s.surface.boundary_loops();
    }

    // deterministic component order: centroid lexicographic
    std::sort(result.begin(), result.end(), [](const IGDS& a, const IGDS& b) {
        Vec3 ca = a.surface.centroid(), cb = b.surface.centroid();
        if (ca.x() != cb.x()) return ca.x() < cb.x();
        if (ca.y() != cb.y()) return ca.y() < cb.y();
        return ca.z() < cb.z();
    });
    for (int j = 0; j < int(result.size()); ++j) result[j].component_index = j + 1;
    return result;
}

LayerSet decompose(const TetMesh& mesh, const ScalarField& field, double interval) {
    if (!(interval > 0.0)) throw Error("geodesic interval must be positive");
    double phi_max = field.max();
    if (interval >= phi_max)
        throw Error("geodesic interval " + std::to_string(interval) +
                    " is not below the field maximum " + std::to_string(phi_max) + " (zero layers)");

    LayerSet layers;
    layers.interval = interval;
    layers.mesh = &mesh;
    layers.field = field;
    layers.layer_count = int(std::floor(phi_max / interval));

    double tie_eps = 1e-9 * interval;
    for (int i = 1; i <= layers.layer_count; ++i) {
        auto components = extract_igds(mesh, field, i * interval, tie_eps);
        for (IGDS& s : components) {
            s.layer_index = i;
            layers.surfaces.push_back(std::move(s));
        }
    }
    return layers;
}

std::string layer_obj_name(const IGDS& s) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "layer_%04d_%02d.obj", s.layer_index, s.component_index);
    return buf;
}

void write_layer_manifest(const LayerSet& layers, const std::string& path) {
    nlohmann::ordered_json j;
    j["interval_mm"] = layers.interval;
    j["layer_count"] = layers.layer_count;
    j["igds_count"] = layers.surfaces.size();
    auto arr = nlohmann::ordered_json::array();
    for (const IGDS& s : layers.surfaces) {
        Vec3 c = s.surface.centroid();
        arr.push_back({{"i", s.layer_index},
                       {"j", s.component_index},
                       {"phi", s.phi},
                       {"vertex_count", s.surface.vertex_count()},
                       {"triangle_count", s.surface.triangle_count()},
                       {"area", s.surface.area()},
                       {"centroid", {c.x(), c.y(), c.z()}},
                       {"file", layer_obj_name(s)}});
    }
    j["layers"] = std::move(arr);
    std::ofstream out(path);
    if (!out) throw Error("cannot open " + path + " for writing");
    out << j.dump(2) << '\n';
}

} // namespace geoslice
