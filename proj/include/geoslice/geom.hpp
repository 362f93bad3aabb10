#pragma once

#include "geoslice/tri_mesh.hpp"

namespace geoslice {

// Closest point on triangle (a,b,c) to p.
Vec3 closest_point_on_triangle(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c);

// Closest points between segments p0-p1 and q0-q1; returns distance.
double segment_segment_distance(const Vec3& p0, const Vec3& p1, const Vec3& q0, const Vec3& q1);

// Minimum distance between segment s0-s1 and triangle (a,b,c). Zero if they intersect.
double segment_triangle_distance(const Vec3& s0, const Vec3& s1, const Vec3& a, const Vec3& b, const Vec3& c);

// Ray-triangle intersection (Moller-Trumbore). Hit parameter returned in t (>= 0).
bool ray_triangle_intersect(const Vec3& origin, const Vec3& dir, const Vec3& a, const Vec3& b,
                            const Vec3& c, double& t);

// Segment-triangle proper intersection test.
bool segment_triangle_intersect(const Vec3& s0, const Vec3& s1, const Vec3& a, const Vec3& b, const Vec3& c);

// Triangle-triangle intersection test (via mutual segment crossings).
bool triangle_triangle_intersect(const Vec3& a0, const Vec3& a1, const Vec3& a2, const Vec3& b0,
                                 const Vec3& b1, const Vec3& b2);

// Uniform grid over a TriMesh for proximity and ray queries. The mesh must
// outlive the grid.
class TriGrid {
  public:
    explicit TriGrid(const TriMesh& mesh);

    // Nearest point on the surface; returns distance, sets closest and triangle id.
    double closest_point(const Vec3& p, Vec3* closest = nullptr, int* tri = nullptr) const;

    // First ray hit within max_t; returns hit parameter or a negative value.
    double raycast(const Vec3& origin, const Vec3& dir, double max_t) const;

    // Minimum distance from segment s0-s1 to the surface, early-out at cutoff.
    double segment_distance(const Vec3& s0, const Vec3& s1, double cutoff) const;

    // Parity containment test for a closed surface.
    bool contains(const Vec3& p) const;

    // Triangles whose cells intersect the box [lo,hi] (deduplicated).
    std::vector<int> box_query(const Vec3& lo, const Vec3& hi) const;

    const TriMesh& mesh() const { return *mesh_; }

  private:
    const TriMesh* mesh_;
    Vec3 origin_;
    double cell_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<std::vector<int>> cells_;

    int cell_index(int ix, int iy, int iz) const { return (iz * dims_[1] + iy) * dims_[0] + ix; }
    void cell_coords(const Vec3& p, int& ix, int& iy, int& iz) const;
};

} // namespace geoslice
