#pragma once

#include "geoslice/core.hpp"
#include "geoslice/tri_mesh.hpp"

#include <array>

namespace geoslice {

// Set of vertex indices into a TetMesh, kept sorted and unique.
struct VertexSet {
    std::vector<int> indices;

    bool empty() const { return indices.empty(); }
    bool contains(int v) const;
    static VertexSet from(std::vector<int> ids, int vertex_count);
};

// Tetrahedral mesh of the solid to slice. Construction validates indices,
// normalizes orientation to positive signed volumes, and builds adjacency.
struct TetMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> tets;

    // Derived (filled by finalize()):
    std::vector<double> tet_volumes;              // positive
    std::vector<std::vector<int>> vertex_tets;    // vertex -> incident tets
    std::vector<std::array<int, 4>> tet_neighbors; // per tet, face opposite corner k -> neighbor or -1
    double total_volume = 0.0;
    double mean_edge_length = 0.0;
    std::size_t edge_count = 0;

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int tet_count() const { return static_cast<int>(tets.size()); }

    // Validates, orients, and builds adjacency. Throws Error on bad input.
    void finalize();

    Vec3 tet_centroid(int t) const;
    double field_at_centroid(int t, const std::vector<double>& field) const;

    std::array<double, 2> z_range() const;
    std::array<Vec3, 2> bounding_box() const;
};

double tet_signed_volume(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d);

TetMesh make_tet_mesh(std::vector<Vec3> vertices, std::vector<std::array<int, 4>> tets);

// Per-vertex volume: one fourth of the volume of all incident tets.
std::vector<double> vertex_volumes(const TetMesh& mesh);

// Faces incident to exactly one tet, oriented outward.
TriMesh boundary_surface(const TetMesh& mesh);

// Vertices with z <= z_min + eps. eps <= 0 selects the default
// (1e-4 x bounding-box height).
VertexSet select_bottom_vertices(const TetMesh& mesh, double eps = 0.0);
VertexSet select_explicit_vertices(const TetMesh& mesh, const std::vector<int>& ids);

// Uniform spatial hash over tets for point location and field evaluation.
class TetLocator {
  public:
    explicit TetLocator(const TetMesh& mesh);

    // Containing tet (barycentric test with tolerance), or -1.
    int locate(const Vec3& p) const;
    // Nearest tet by centroid among grid neighborhood; never -1 for non-empty mesh.
    int locate_or_nearest(const Vec3& p) const;

    bool barycentric(int tet, const Vec3& p, std::array<double, 4>& w) const;
    double interpolate(int tet, const Vec3& p, const std::vector<double>& field) const;

  private:
    const TetMesh& mesh_;
    Vec3 origin_;
    double cell_ = 1.0;
    std::array<int, 3> dims_{1, 1, 1};
    std::vector<std::vector<int>> cells_;

    int cell_index(int ix, int iy, int iz) const;
    void cell_coords(const Vec3& p, int& ix, int& iy, int& iz) const;
};

} // namespace geoslice
