#include "geoslice/remesh.hpp"

#include "geoslice/geodesic_field.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace geoslice {

namespace {

// Editable triangle soup with adjacency rebuilt on demand. Remeshing batches
// are small enough that rebuild cost does not matter here.
struct EditMesh {
    std::vector<Vec3> verts;
    std::vector<std::array<int, 3>> tris;
    std::vector<char> on_boundary;

    std::map<std::pair<int, int>, std::vector<int>> edge_tris;
    std::vector<std::set<int>> vertex_ring;

    void rebuild() {
        edge_tris.clear();
        vertex_ring.assign(verts.size(), {});
        for (std::size_t t = 0; t < tris.size(); ++t) {
            for (int e = 0; e < 3; ++e) {
                int a = tris[t][e], b = tris[t][(e + 1) % 3];
                edge_tris[std::minmax(a, b)].push_back(int(t));
                vertex_ring[a].insert(b);
                vertex_ring[b].insert(a);
            }
        }
        std::vector<char> bnd(verts.size(), 0);
        for (const auto& [e, ts] : edge_tris)
            if (ts.size() == 1) {
                bnd[e.first] = 1;
                bnd[e.second] = 1;
            }
        on_boundary = std::move(bnd);
    }

    int valence(int v) const { return int(vertex_ring[v].size()); }

    void drop_degenerate() {
        std::vector<std::array<int, 3>> keep;
        for (const auto& t : tris)
            if (t[0] != t[1] && t[1] != t[2] && t[0] != t[2]) keep.push_back(t);
        tris = std::move(keep);
    }
};

struct Projector {
    const TetMesh& mesh;
    const ScalarField& field;
    const TetLocator& locator;
    const TriGrid& boundary_grid;
    double phi;

    // move p along the local field gradient back onto the iso-surface
    Vec3 to_isosurface(const Vec3& p) const {
        Vec3 q = p;
        for (int iter = 0; iter < 10; ++iter) {
            int tet = locator.locate(q);
            if (tet < 0) tet = locator.locate_or_nearest(q);
            double f = locator.interpolate(tet, q, field.values);
            double err = f - phi;
            if (std::abs(err) < 1e-12 * std::max(std::abs(phi), 1.0)) break;
            const auto& tv = mesh.tets[tet];
            Eigen::Matrix3d M;
            M.row(0) = mesh.vertices[tv[0]] - mesh.vertices[tv[3]];
            M.row(1) = mesh.vertices[tv[1]] - mesh.vertices[tv[3]];
            M.row(2) = mesh.vertices[tv[2]] - mesh.vertices[tv[3]];
            Vec3 du(field.values[tv[0]] - field.values[tv[3]], field.values[tv[1]] - field.values[tv[3]],
                    field.values[tv[2]] - field.values[tv[3]]);
            Vec3 g = M.partialPivLu().solve(du);
            double g2 = g.squaredNorm();
            if (g2 < 1e-24) break;
            q -= g * (err / g2);
        }
        return q;
    }

    Vec3 to_boundary(const Vec3& p) const {
        Vec3 c;
        boundary_grid.closest_point(p, &c);
        return c;
    }
};

void split_long_edges(EditMesh& m, const Projector& proj, double max_len) {
    m.rebuild();
    // snapshot: edits invalidate edge_tris incrementally, so process a frozen list
    std::vector<std::pair<int, int>> edges;
    for (const auto& [e, ts] : m.edge_tris) edges.push_back(e);
    for (const auto& e : edges) {
        auto it = m.edge_tris.find(e);
        if (it == m.edge_tris.end()) continue;
        if ((m.verts[e.first] - m.verts[e.second]).norm() <= max_len) continue;
        bool boundary_edge = it->second.size() == 1;
        Vec3 mid = 0.5 * (m.verts[e.first] + m.verts[e.second]);
        mid = boundary_edge ? proj.to_boundary(mid) : proj.to_isosurface(mid);
        int nv = int(m.verts.size());
        m.verts.push_back(mid);
        for (int t : it->second) {
            auto tri = m.tris[t];
            // replace tri by two, swapping e.second for nv and e.first for nv
            auto tri2 = tri;
            for (int k = 0; k < 3; ++k) {
                if (tri[k] == e.second) tri[k] = nv;
                if (tri2[k] == e.first) tri2[k] = nv;
            }
            m.tris[t] = tri;
            m.tris.push_back(tri2);
        }
        m.rebuild(); // conservative: re-derive adjacency after each split
    }
}

void collapse_short_edges(EditMesh& m, const Projector& proj, double min_len, double max_len) {
    m.rebuild();
    std::vector<std::pair<int, int>> edges;
    for (const auto& [e, ts] : m.edge_tris) edges.push_back(e);
    std::vector<char> touched(m.verts.size(), 0);
    std::vector<int> remap(m.verts.size());
    for (std::size_t i = 0; i < remap.size(); ++i) remap[i] = int(i);

    for (const auto& e : edges) {
        int a = e.first, b = e.second;
        if (touched[a] || touched[b]) continue;
        if (m.on_boundary[a] || m.on_boundary[b]) continue;
        double len = (m.verts[a] - m.verts[b]).norm();
        if (len >= min_len) continue;
        // collapsing must not create overlong edges
        Vec3 mid = proj.to_isosurface(0.5 * (m.verts[a] + m.verts[b]));
        bool ok = true;
        for (int v : m.vertex_ring[a])
            if (v != b && (m.verts[v] - mid).norm() > max_len) ok = false;
        for (int v : m.vertex_ring[b])
            if (v != a && (m.verts[v] - mid).norm() > max_len) ok = false;
        // link condition: shared ring of a and b must be exactly the edge's
        // opposite vertices, otherwise the collapse pinches the surface
        std::vector<int> shared;
        for (int v : m.vertex_ring[a])
            if (m.vertex_ring[b].count(v)) shared.push_back(v);
        if (shared.size() > 2) ok = false;
        if (!ok) continue;
        m.verts[a] = mid;
        remap[b] = a;
        touched[a] = touched[b] = 1;
        for (int v : m.vertex_ring[a]) touched[v] = 1;
        for (int v : m.vertex_ring[b]) touched[v] = 1;
    }
    for (auto& tri : m.tris)
        for (int k = 0; k < 3; ++k) tri[k] = remap[tri[k]];
    m.drop_degenerate();
    m.rebuild();
}

void flip_edges(EditMesh& m) {
    m.rebuild();
    auto deviation = [&](int v) {
        int target = m.on_boundary[v] ? 4 : 6;
        int d = m.valence(v) - target;
        return d * d;
    };
    std::vector<std::pair<int, int>> edges;
    for (const auto& [e, ts] : m.edge_tris)
        if (ts.size() == 2) edges.push_back(e);
    bool changed = false;
    for (const auto& e : edges) {
        auto it = m.edge_tris.find(e);
        if (it == m.edge_tris.end() || it->second.size() != 2) continue;
        int t0 = it->second[0], t1 = it->second[1];
        auto opposite = [&](int t) {
            for (int k = 0; k < 3; ++k) {
                int v = m.tris[t][k];
                if (v != e.first && v != e.second) return v;
            }
            return -1;
        };
        int c = opposite(t0), d = opposite(t1);
        if (c < 0 || d < 0 || c == d) continue;
        if (m.vertex_ring[c].count(d)) continue; // flip would duplicate edge (c,d)
        int before = deviation(e.first) + deviation(e.second) + deviation(c) + deviation(d);
        // simulate
        int after = 0;
        {
            auto dev = [&](int v, int delta) {
                int target = m.on_boundary[v] ? 4 : 6;
                int val = m.valence(v) + delta - target;
                return val * val;
            };
            after = dev(e.first, -1) + dev(e.second, -1) + dev(c, +1) + dev(d, +1);
        }
        if (after >= before) continue;
        // geometric guard: reject flips that invert the local orientation
        Vec3 n0 = (m.verts[e.second] - m.verts[e.first]).cross(m.verts[c] - m.verts[e.first]);
        Vec3 n1 = (m.verts[d] - m.verts[e.first]).cross(m.verts[e.second] - m.verts[e.first]);
        Vec3 m0 = (m.verts[d] - m.verts[c]).cross(m.verts[e.first] - m.verts[c]);
        Vec3 m1 = (m.verts[e.second] - m.verts[c]).cross(m.verts[d] - m.verts[c]);
        if (n0.dot(n1) <= 0.0 || m0.dot(m1) <= 0.0) continue;

        auto orient = [&](int t, int keep, int from, int to) {
            for (int k = 0; k < 3; ++k)
                if (m.tris[t][k] == from) m.tris[t][k] = to;
            (void)keep;
        };
        // (e0,e1,c) + (e1,e0,d) -> (c,d with shared diag)
        orient(t0, c, e.first, d);
        orient(t1, d, e.second, c);
        changed = true;
        m.rebuild();
    }
    if (changed) m.rebuild();
}

void tangential_relax(EditMesh& m, const Projector& proj) {
    m.rebuild();
    std::vector<Vec3> moved = m.verts;
    for (std::size_t v = 0; v < m.verts.size(); ++v) {
        if (m.on_boundary[v] || m.vertex_ring[v].empty()) continue;
        Vec3 c = Vec3::Zero();
        for (int u : m.vertex_ring[v]) c += m.verts[u];
        c /= double(m.vertex_ring[v].size());
        moved[v] = proj.to_isosurface(c);
    }
    m.verts = std::move(moved);
}

// push-back Laplacian smoothing: relax toward neighbor means, then subtract
// the mean displacement so the surface does not shrink
void pushback_smooth(EditMesh& m, const Projector& proj, int passes) {
    const double beta = 0.5;
    for (int pass = 0; pass < passes; ++pass) {
        m.rebuild();
        std::vector<Vec3> relaxed = m.verts;
        for (std::size_t v = 0; v < m.verts.size(); ++v) {
            if (m.vertex_ring[v].empty()) continue;
            if (m.on_boundary[v]) {
                // slide along the boundary: average only boundary neighbors
                Vec3 c = Vec3::Zero();
                int count = 0;
                for (int u : m.vertex_ring[v])
                    if (m.on_boundary[u]) {
                        c += m.verts[u];
                        ++count;
                    }
                if (count >= 2) relaxed[v] = proj.to_boundary(0.5 * (m.verts[v] + c / double(count)));
                continue;
            }
            Vec3 c = Vec3::Zero();
            for (int u : m.vertex_ring[v]) c += m.verts[u];
            relaxed[v] = c / double(m.vertex_ring[v].size());
        }
        std::vector<Vec3> diff(m.verts.size());
        for (std::size_t v = 0; v < m.verts.size(); ++v) diff[v] = relaxed[v] - m.verts[v];
        for (std::size_t v = 0; v < m.verts.size(); ++v) {
            if (m.on_boundary[v] || m.vertex_ring[v].empty()) {
                m.verts[v] = relaxed[v];
                continue;
            }
            Vec3 ring_diff = Vec3::Zero();
            for (int u : m.vertex_ring[v]) ring_diff += diff[u];
            ring_diff /= double(m.vertex_ring[v].size());
            Vec3 corrected = relaxed[v] - (beta * diff[v] + (1.0 - beta) * ring_diff);
            m.verts[v] = proj.to_isosurface(corrected);
        }
    }
}

} // namespace

IGDS remesh_and_smooth(const IGDS& s, const TetMesh& mesh, const ScalarField& field,
                       const TetLocator& locator, const TriGrid& boundary_grid,
                       const RemeshParams& params) {
    if (!params.enabled()) return s;
    double target = params.target_edge;
    if (target <= 0.0) {
        double sum = 0.0;
        int count = 0;
        for (const auto& tri : s.surface.triangles)
            for (int e = 0; e < 3; ++e) {
                sum += (s.surface.vertices[tri[e]] - s.surface.vertices[tri[(e + 1) % 3]]).norm();
                ++count;
            }
        target = count ? sum / count : 1.0;
    }

    Projector proj{mesh, field, locator, boundary_grid, s.phi};
    EditMesh m;
    m.verts = s.surface.vertices;
    m.tris = s.surface.triangles;

    for (int iter = 0; iter < params.iterations; ++iter) {
        split_long_edges(m, proj, 4.0 / 3.0 * target);
        collapse_short_edges(m, proj, 4.0 / 5.0 * target, 4.0 / 3.0 * target);
        flip_edges(m);
        tangential_relax(m, proj);
    }
    pushback_smooth(m, proj, params.smoothing_passes);

    if (m.tris.size() < 4) throw Error("remeshing collapsed IGDS " + s.id() + " below 4 triangles");

    IGDS out;
    out.phi = s.phi;
    out.layer_index = s.layer_index;
    out.component_index = s.component_index;
    out.surface.vertices = std::move(m.verts);
    out.surface.triangles = std::move(m.tris);

    // compact unused vertices
    std::vector<int> used(out.surface.vertices.size(), -1);
    std::vector<Vec3> packed;
    for (auto& tri : out.surface.triangles)
        for (int k = 0; k < 3; ++k) {
            int v = tri[k];
            if (used[v] == -1) {
                used[v] = int(packed.size());
                packed.push_back(out.surface.vertices[v]);
            }
            tri[k] = used[v];
        }
    out.surface.vertices = std::move(packed);
    out.surface.compute_vertex_normals();

    // re-orient normals toward increasing phi (smoothing never flips winding,
    // but recompute guards against collapsed slivers)
    out.boundary_loops = out.surface.boundary_loops();
    return out;
}

} // namespace geoslice
