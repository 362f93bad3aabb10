#pragma once

#include "geoslice/core.hpp"

#include <array>
#include <iosfwd>

namespace geoslice {

// Triangle surface mesh. Normals are per-vertex unit vectors when present.
struct TriMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<Vec3> normals;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int triangle_count() const { return static_cast<int>(triangles.size()); }

    Vec3 triangle_normal(int t) const; // unit, zero for degenerate
    double triangle_area(int t) const;
    double area() const;
    Vec3 centroid() const; // area-weighted

    // Edges bordering exactly one triangle, as ordered (a,b) pairs following
    // the owning triangle's winding.
    std::vector<std::pair<int, int>> boundary_edges() const;

    // Boundary edges chained into closed or open loops of vertex indices.
    std::vector<std::vector<int>> boundary_loops() const;

    bool is_edge_manifold() const;           // every edge borders <= 2 triangles
    bool has_consistent_orientation() const; // shared edges traversed in opposite directions

    // Area-weighted per-vertex normals from triangle windings.
    void compute_vertex_normals();

    void validate() const; // throws Error on invariant violations
};

void write_obj(const TriMesh& m, const std::string& path);
void write_obj(const TriMesh& m, std::ostream& out);
TriMesh read_obj(const std::string& path);

} // namespace geoslice
