#include "geoslice/tet_mesh.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <thread>

namespace geoslice {

int max_threads() {
    static int cached = [] {
        int hw = static_cast<int>(std::thread::hardware_concurrency());
        if (hw < 1) hw = 1;
        if (const char* env = std::getenv("GEOSLICE_THREADS")) {
            int cap = std::atoi(env);
            if (cap >= 1 && cap < hw) hw = cap;
        }
        return hw;
    }();
    return cached;
}

void parallel_for(int n, const std::function<void(int)>& body) {
    int threads = std::min(max_threads(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= n) break;
                body(i);
            }
        });
    }
    for (auto& th : pool) th.join();
}

bool VertexSet::contains(int v) const {
    return std::binary_search(indices.begin(), indices.end(), v);
}

VertexSet VertexSet::from(std::vector<int> ids, int vertex_count) {
    for (int v : ids)
        if (v < 0 || v >= vertex_count)
            throw Error("vertex index " + std::to_string(v) + " out of range (mesh has " +
                        std::to_string(vertex_count) + " vertices)");
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    if (ids.empty()) throw Error("empty vertex set");
    return VertexSet{std::move(ids)};
}

double tet_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).cross(c - a).dot(d - a) / 6.0;
}

Vec3 TetMesh::tet_centroid(int t) const {
    const auto& tet = tets[t];
    return (vertices[tet[0]] + vertices[tet[1]] + vertices[tet[2]] + vertices[tet[3]]) * 0.25;
}

double TetMesh::field_at_centroid(int t, const std::vector<double>& field) const {
    const auto& tet = tets[t];
    return 0.25 * (field[tet[0]] + field[tet[1]] + field[tet[2]] + field[tet[3]]);
}

std::array<double, 2> TetMesh::z_range() const {
    double lo = 1e300, hi = -1e300;
    for (const Vec3& v : vertices) {
        lo = std::min(lo, v.z());
        hi = std::max(hi, v.z());
    }
    return {lo, hi};
}

std::array<Vec3, 2> TetMesh::bounding_box() const {
    Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
    for (const Vec3& v : vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return {lo, hi};
}

void TetMesh::finalize() {
    const int nv = vertex_count();
    const int nt = tet_count();
    if (nv < 4 || nt < 1) throw Error("mesh needs at least 4 vertices and 1 tetrahedron");

    for (int t = 0; t < nt; ++t) {
        auto& tet = tets[t];
        for (int k = 0; k < 4; ++k)
            if (tet[k] < 0 || tet[k] >= nv)
                throw Error("tet " + std::to_string(t) + ": vertex index " + std::to_string(tet[k]) +
                            " out of range");
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                if (tet[a] == tet[b]) throw Error("tet " + std::to_string(t) + ": repeated vertex");
    }

    // orientation repair + volumes
    tet_volumes.assign(nt, 0.0);
    total_volume = 0.0;
    for (int t = 0; t < nt; ++t) {
        auto& tet = tets[t];
        double vol = tet_signed_volume(vertices[tet[0]], vertices[tet[1]], vertices[tet[2]], vertices[tet[3]]);
        if (vol < 0.0) {
            std::swap(tet[0], tet[1]);
            vol = -vol;
        }
        if (vol < 1e-12)
            throw Error("tet " + std::to_string(t) + ": zero or degenerate volume (" + std::to_string(vol) + " mm^3)");
        tet_volumes[t] = vol;
        total_volume += vol;
    }

    vertex_tets.assign(nv, {});
    for (int t = 0; t < nt; ++t)
        for (int k = 0; k < 4; ++k) vertex_tets[tets[t][k]].push_back(t);

    // face incidence: key = sorted triple -> incident (tet, opposite corner)
    std::map<std::array<int, 3>, std::vector<std::pair<int, int>>> faces;
    for (int t = 0; t < nt; ++t) {
        const auto& tet = tets[t];
        for (int k = 0; k < 4; ++k) {
            std::array<int, 3> f{tet[(k + 1) % 4], tet[(k + 2) % 4], tet[(k + 3) % 4]};
            std::sort(f.begin(), f.end());
            faces[f].emplace_back(t, k);
        }
    }
    tet_neighbors.assign(nt, {-1, -1, -1, -1});
    for (const auto& [f, inc] : faces) {
        if (inc.size() > 2)
            throw Error("non-manifold face shared by " + std::to_string(inc.size()) + " tets");
        if (inc.size() == 2) {
            tet_neighbors[inc[0].first][inc[0].second] = inc[1].first;
            tet_neighbors[inc[1].first][inc[1].second] = inc[0].first;
        }
    }

    // unique edges for the mean edge length (heat time step)
    std::set<std::pair<int, int>> edges;
    for (const auto& tet : tets)
        for (int a = 0; a < 4; ++a)
            for (int b = a + 1; b < 4; ++b)
                edges.insert(std::minmax(tet[a], tet[b]));
    edge_count = edges.size();
    double sum = 0.0;
    for (const auto& [a, b] : edges) sum += (vertices[a] - vertices[b]).norm();
    mean_edge_length = sum / double(edge_count);
}

TetMesh make_tet_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets) {
    TetMesh m;
    m.vertices = std::move(vertices);
    m.tets = std::move(tets);
    m.finalize();
    return m;
}

std::vector<double> vertex_volumes(const TetMesh& mesh) {
    std::vector<double> vol(mesh.vertex_count(), 0.0);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        double q = mesh.tet_volumes[t] * 0.25;
        for (int k = 0; k < 4; ++k) vol[mesh.tets[t][k]] += q;
    }
    return vol;
}

TriMesh boundary_surface(const TetMesh& mesh) {
    TriMesh surf;
    // outward faces of a positively oriented tet (a,b,c,d)
    static const int outward[4][3] = {{0, 2, 1}, {0, 1, 3}, {1, 2, 3}, {0, 3, 2}};
    // face in slot k is opposite corner: {3, 2, 0, 1}
    static const int slot_of_face[4] = {3, 2, 0, 1};

    std::vector<int> vmap(mesh.vertex_count(), -1);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets[t];
        for (int f = 0; f < 4; ++f) {
            if (mesh.tet_neighbors[t][slot_of_face[f]] != -1) continue;
            std::array<int, 3> tri;
            for (int k = 0; k < 3; ++k) {
                int v = tet[outward[f][k]];
                if (vmap[v] == -1) {
                    vmap[v] = surf.vertex_count();
                    surf.vertices.push_back(mesh.vertices[v]);
                }
                tri[k] = vmap[v];
            }
            surf.triangles.push_back(tri);
        }
    }
    surf.compute_vertex_normals();
    return surf;
}

VertexSet select_bottom_vertices(const TetMesh& mesh, double eps) {
    auto [zlo, zhi] = mesh.z_range();
    if (eps <= 0.0) eps = 1e-4 * std::max(zhi - zlo, 1e-30);
    std::vector<int> ids;
    for (int v = 0; v < mesh.vertex_count(); ++v)
        if (mesh.vertices[v].z() <= zlo + eps) ids.push_back(v);
    if (ids.empty()) throw Error("bottom-face selection produced an empty vertex set");
    return VertexSet{std::move(ids)};
}

VertexSet select_explicit_vertices(const TetMesh& mesh, const std::vector<int>& ids) {
    return VertexSet::from(ids, mesh.vertex_count());
}

// ---- TetLocator ----

TetLocator::TetLocator(const TetMesh& mesh) : mesh_(mesh) {
    auto [lo, hi] = mesh.bounding_box();
    Vec3 extent = hi - lo;
    double target_cells = std::cbrt(double(std::max(mesh.tet_count(), 1)));
    cell_ = std::max(extent.maxCoeff() / std::max(target_cells, 1.0), 1e-9);
    origin_ = lo - Vec3::Constant(0.5 * cell_);
    for (int k = 0; k < 3; ++k)
        dims_[k] = std::max(1, int(std::ceil(extent[k] / cell_)) + 1);
    cells_.assign(std::size_t(dims_[0]) * dims_[1] * dims_[2], {});
    for (int t = 0; t < mesh.tet_count(); ++t) {
        Vec3 tlo = Vec3::Constant(1e300), thi = Vec3::Constant(-1e300);
        for (int k = 0; k < 4; ++k) {
            tlo = tlo.cwiseMin(mesh.vertices[mesh.tets[t][k]]);
            thi = thi.cwiseMax(mesh.vertices[mesh.tets[t][k]]);
        }
        int ix0, iy0, iz0, ix1, iy1, iz1;
        cell_coords(tlo, ix0, iy0, iz0);
        cell_coords(thi, ix1, iy1, iz1);
        for (int iz = iz0; iz <= iz1; ++iz)
            for (int iy = iy0; iy <= iy1; ++iy)
                for (int ix = ix0; ix <= ix1; ++ix) cells_[cell_index(ix, iy, iz)].push_back(t);
    }
}

int TetLocator::cell_index(int ix, int iy, int iz) const {
    return (iz * dims_[1] + iy) * dims_[0] + ix;
}

void TetLocator::cell_coords(const Vec3& p, int& ix, int& iy, int& iz) const {
    ix = std::clamp(int((p.x() - origin_.x()) / cell_), 0, dims_[0] - 1);
    iy = std::clamp(int((p.y() - origin_.y()) / cell_), 0, dims_[1] - 1);
    iz = std::clamp(int((p.z() - origin_.z()) / cell_), 0, dims_[2] - 1);
}

bool TetLocator::barycentric(int tet, const Vec3& p, std::array<double, 4>& w) const {
    const auto& t = mesh_.tets[tet];
    const Vec3& a = mesh_.vertices[t[0]];
    const Vec3& b = mesh_.vertices[t[1]];
    const Vec3& c = mesh_.vertices[t[2]];
    const Vec3& d = mesh_.vertices[t[3]];
    double v = tet_signed_volume(a, b, c, d);
    if (std::abs(v) < 1e-300) return false;
    w[0] = tet_signed_volume(p, b, c, d) / v;
    w[1] = tet_signed_volume(a, p, c, d) / v;
    w[2] = tet_signed_volume(a, b, p, d) / v;
    w[3] = tet_signed_volume(a, b, c, p) / v;
    const double tol = -1e-9;
    return w[0] >= tol && w[1] >= tol && w[2] >= tol && w[3] >= tol;
}

int TetLocator::locate(const Vec3& p) const {
    int ix, iy, iz;
    cell_coords(p, ix, iy, iz);
    std::array<double, 4> w;
    for (int dz = -1; dz <= 1; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
            for (int dx = -1; dx <= 1; ++dx) {
                int jx = ix + dx, jy = iy + dy, jz = iz + dz;
                if (jx < 0 || jy < 0 || jz < 0 || jx >= dims_[0] || jy >= dims_[1] || jz >= dims_[2]) continue;
                for (int t : cells_[cell_index(jx, jy, jz)])
                    if (barycentric(t, p, w)) return t;
            }
    return -1;
}

int TetLocator::locate_or_nearest(const Vec3& p) const {
    int t = locate(p);
    if (t != -1) return t;
    double best = 1e300;
    int best_t = 0;
    for (int i = 0; i < mesh_.tet_count(); ++i) {
        double d = (mesh_.tet_centroid(i) - p).squaredNorm();
        if (d < best) {
            best = d;
            best_t = i;
        }
    }
    return best_t;
}

double TetLocator::interpolate(int tet, const Vec3& p, const std::vector<double>& field) const {
    std::array<double, 4> w;
    barycentric(tet, p, w);
    const auto& t = mesh_.tets[tet];
    return w[0] * field[t[0]] + w[1] * field[t[1]] + w[2] * field[t[2]] + w[3] * field[t[3]];
}

} // namespace geoslice
