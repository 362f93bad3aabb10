#include "geoslice/geom.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace geoslice {

Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    // Ericson, Real-Time Collision Detection, 5.1.5
    Vec3 ab = b - a, ac = c - a, ap = p - a;
    double d1 = ab.dot(ap), d2 = ac.dot(ap);
    if (d1 <= 0.0 && d2 <= 0.0) return a;

    Vec3 bp = p - b;
    double d3 = ab.dot(bp), d4 = ac.dot(bp);
    if (d3 >= 0.0 && d4 <= d3) return b;

    double vc = d1 * d4 - d3 * d2;
    if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) return a + (d1 / (d1 - d3)) * ab;

    Vec3 cp = p - c;
    double d5 = ab.dot(cp), d6 = ac.dot(cp);
    if (d6 >= 0.0 && d5 <= d6) return c;

    double vb = d5 * d2 - d1 * d6;
    if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) return a + (d2 / (d2 - d6)) * ac;

    double va = d3 * d6 - d5 * d4;
    if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
        double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + w * (c - b);
    }

    double denom = 1.0 / (va + vb + vc);
    return a + ab * (vb * denom) + ac * (vc * denom);
}

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
    return (p - closest_point_on_triangle(p, a, b, c)).norm();
}

double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1) {
    // Ericson 5.1.9
    Vec3 d1 = p1 - p0, d2 = q1 - q0, r = p0 - q0;
    double a = d1.squaredNorm(), e = d2.squaredNorm(), f = d2.dot(r);
    double s, t;
    const double eps = 1e-30;
    if (a <= eps && e <= eps) return r.norm();
    if (a <= eps) {
        s = 0.0;
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        double c = d1.dot(r);
        if (e <= eps) {
            t = 0.0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            double b = d1.dot(d2);
            double denom = a * e - b * b;
            s = denom > eps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    return ((p0 + d1 * s) - (q0 + d2 * t)).norm();
}

bool ray_triangle_intersect(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                            const Vec3& c, double& t) {
    const double eps = 1e-12;
    Vec3 ab = b - a, ac = c - a;
    Vec3 pvec = dir.cross(ac);
    double det = ab.dot(pvec);
    if (std::abs(det) < eps) return false;
    double inv = 1.0 / det;
    Vec3 tvec = origin - a;
    double u = tvec.dot(pvec) * inv;
    if (u < -1e-12 || u > 1.0 + 1e-12) return false;
    Vec3 qvec = tvec.cross(ab);
    double v = dir.dot(qvec) * inv;
    if (v < -1e-12 || u + v > 1.0 + 1e-12) return false;
    t = ac.dot(qvec) * inv;
    return t >= 0.0;
}

bool segment_triangle_intersect(const Vec3& s0, const Vec3& s1, const Vec3& a, const Vec3& b, const Vec3& c) {
    Vec3 dir = s1 - s0;
    double len = dir.norm();
    if (len < 1e-300) return point_triangle_distance(s0, a, b, c) < 1e-12;
    double t;
    if (!ray_triangle_intersect(s0, dir / len, a, b, c, t)) return false;
    return t <= len + 1e-12;
}

double segment_triangle_distance(const Vec3& s0, const Vec3& s1, const Vec3& a, const Vec3& b, const Vec3& c) {
    if (segment_triangle_intersect(s0, s1, a, b, c)) return 0.0;
    double d = std::min(point_triangle_distance(s0, a, b, c), point_triangle_distance(s1, a, b, c));
    d = std::min(d, segment_segment_distance(s0, s1, a, b));
    d = std::min(d, segment_segment_distance(s0, s1, b, c));
    d = std::min(d, segment_segment_distance(s0, s1, c, a));
    // interior closest points are covered: either segment crosses the plane
    // inside the triangle (intersection) or the minimum is on an edge/endpoint
    return d;
}

bool triangle_triangle_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                                 const Vec3& b1, const Vec3& b2) {
    return segment_triangle_intersect(a0, a1, b0, b1, b2) || segment_triangle_intersect(a1, a2, b0, b1, b2) ||
           segment_triangle_intersect(a2, a0, b0, b1, b2) || segment_triangle_intersect(b0, b1, a0, a1, a2) ||
           segment_triangle_intersect(b1, b2, a0, a1, a2) || segment_triangle_intersect(b2, b0, a0, a1, a2);
}

// ---- TriGrid ----

TriGrid::TriGrid(const TriMesh& mesh) : mesh_(&mesh) {
    Vec3 lo = Vec3::Constant(1e300), hi = Vec3::Constant(-1e300);
    for (const Vec3& v : mesh.vertices) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    if (mesh.vertices.empty()) lo = hi = Vec3::Zero();
    Vec3 extent = hi - lo;
    double target = std::cbrt(double(std::max(mesh.triangle_count(), 1))) * 0.75;
    cell_ = std::max(extent.maxCoeff() / std::max(target, 1.0), 1e-9);
    origin_ = lo - Vec3::Constant(0.5 * cell_);
    for (int k = 0; k < 3; ++k) dims_[k] = std::max(1, int(std::ceil(extent[k] / cell_)) + 1);
    cells_.assign(std::size_t(dims_[0]) * dims_[1] * dims_[2], {});
    for (int t = 0; t < mesh.triangle_count(); ++t) {
        Vec3 tlo = Vec3::Constant(1e300), thi = Vec3::Constant(-1e300);
        for (int k = 0; k < 3; ++k) {
            const Vec3& v = mesh.vertices[mesh.triangles[t][k]];
            tlo = tlo.cwiseMin(v);
            thi = thi.cwiseMax(v);
        }
        int ix0, iy0, iz0, ix1, iy1, iz1;
        cell_coords(tlo, ix0, iy0, iz0);
        cell_coords(thi, ix1, iy1, iz1);
        for (int iz = iz0; iz <= iz1; ++iz)
            for (int iy = iy0; iy <= iy1; ++iy)
                for (int ix = ix0; ix <= ix1; ++ix) cells_[cell_index(ix, iy, iz)].push_back(t);
    }
}

void TriGrid::cell_coords(const Vec3& p, int& ix, int& iy, int& iz) const {
    ix = std::clamp(int((p.x() - origin_.x()) / cell_), 0, dims_[0] - 1);
    iy = std::clamp(int((p.y() - origin_.y()) / cell_), 0, dims_[1] - 1);
    iz = std::clamp(int((p.z() - origin_.z()) / cell_), 0, dims_[2] - 1);
}

std::vector<int> TriGrid::box_query(const Vec3& lo, const Vec3& hi) const {
    int ix0, iy0, iz0, ix1, iy1, iz1;
    cell_coords(lo, ix0, iy0, iz0);
    cell_coords(hi, ix1, iy1, iz1);
    std::vector<int> out;
    for (int iz = iz0; iz <= iz1; ++iz)
        for (int iy = iy0; iy <= iy1; ++iy)
            for (int ix = ix0; ix <= ix1; ++ix)
                for (int t : cells_[cell_index(ix, iy, iz)]) out.push_back(t);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double TriGrid::closest_point(const Vec3& p, Vec3* closest, int* tri) const {
    double best = 1e300;
    Vec3 best_p = Vec3::Zero();
    int best_t = -1;
    // expand rings of cells until the found distance is safely inside the ring
    for (int ring = 0;; ++ring) {
        double radius = ring * cell_;
        if (best < radius - cell_) break;
        Vec3 lo = p - Vec3::Constant(radius + 0.5 * cell_);
        Vec3 hi = p + Vec3::Constant(radius + 0.5 * cell_);
        int ix0, iy0, iz0, ix1, iy1, iz1;
        cell_coords(lo, ix0, iy0, iz0);
        cell_coords(hi, ix1, iy1, iz1);
        bool full_cover = ix0 == 0 && iy0 == 0 && iz0 == 0 && ix1 == dims_[0] - 1 && iy1 == dims_[1] - 1 &&
                          iz1 == dims_[2] - 1;
        for (int iz = iz0; iz <= iz1; ++iz)
            for (int iy = iy0; iy <= iy1; ++iy)
                for (int ix = ix0; ix <= ix1; ++ix) {
                    bool boundary_ring = ring == 0 || ix == ix0 || ix == ix1 || iy == iy0 || iy == iy1 ||
                                         iz == iz0 || iz == iz1;
                    if (!boundary_ring) continue; // interior was handled by previous rings
                    for (int t : cells_[cell_index(ix, iy, iz)]) {
                        const auto& tr = mesh_->triangles[t];
                        Vec3 q = closest_point_on_triangle(p, mesh_->vertices[tr[0]], mesh_->vertices[tr[1]],
                                                           mesh_->vertices[tr[2]]);
                        double d = (p - q).norm();
                        if (d < best) {
                            best = d;
                            best_p = q;
                            best_t = t;
                        }
                    }
                }
        if (full_cover) break;
    }
    if (closest) *closest = best_p;
    if (tri) *tri = best_t;
    return best;
}

double TriGrid::raycast(const Vec3& origin, const Vec3& dir, double max_t) const {
    // coarse 3D-DDA free walk over the grid cells along the ray
    double best = -1.0;
    Vec3 p = origin;
    double traveled = 0.0;
    std::set<int> tested;
    double step = 0.5 * cell_;
    while (traveled <= max_t) {
        int ix, iy, iz;
        cell_coords(p, ix, iy, iz);
        for (int dz = -1; dz <= 1; ++dz)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dx = -1; dx <= 1; ++dx) {
                    int jx = ix + dx, jy = iy + dy, jz = iz + dz;
                    if (jx < 0 || jy < 0 || jz < 0 || jx >= dims_[0] || jy >= dims_[1] || jz >= dims_[2])
                        continue;
                    for (int t : cells_[cell_index(jx, jy, jz)]) {
                        if (!tested.insert(t).second) continue;
                        const auto& tr = mesh_->triangles[t];
                        double hit;
                        if (ray_triangle_intersect(origin, dir, mesh_->vertices[tr[0]], mesh_->vertices[tr[1]],
                                                   mesh_->vertices[tr[2]], hit) &&
                            hit <= max_t) {
                            if (best < 0.0 || hit < best) best = hit;
                        }
                    }
                }
        if (best >= 0.0 && best <= traveled) break;
        traveled += step;
        p = origin + dir * traveled;
    }
    return best;
}

double TriGrid::segment_distance(const Vec3& s0, const Vec3& s1, double cutoff) const {
    Vec3 lo = s0.cwiseMin(s1) - Vec3::Constant(cutoff);
    Vec3 hi = s0.cwiseMax(s1) + Vec3::Constant(cutoff);
    double best = 1e300;
    for (int t : box_query(lo, hi)) {
        const auto& tr = mesh_->triangles[t];
        best = std::min(best, segment_triangle_distance(s0, s1, mesh_->vertices[tr[0]], mesh_->vertices[tr[1]],
                                                        mesh_->vertices[tr[2]]));
        if (best == 0.0) break;
    }
    return best;
}

bool TriGrid::contains(const Vec3& p) const {
    // fixed irrational-ish direction avoids edge-grazing degeneracy
    static const Vec3 dir = Vec3(0.5773502691896258, 0.30290544787626565, 0.7590127564784836).normalized();
    int crossings = 0;
    for (int t = 0; t < mesh_->triangle_count(); ++t) {
        const auto& tr = mesh_->triangles[t];
        double hit;
        if (ray_triangle_intersect(p, dir, mesh_->vertices[tr[0]], mesh_->vertices[tr[1]],
                                   mesh_->vertices[tr[2]], hit))
            ++crossings;
    }
    return (crossings % 2) == 1;
}

} // namespace geoslice
