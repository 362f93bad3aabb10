#pragma once

#include "geoslice/geodesic_field.hpp"
#include "geoslice/tri_mesh.hpp"

namespace geoslice {

// One connected iso-geodesic distance surface.
struct IGDS {
    TriMesh surface; // per-vertex normals oriented toward increasing phi
    double phi = 0.0;
    int layer_index = 0;     // i >= 1
    int component_index = 0; // j >= 1
    std::vector<std::vector<int>> boundary_loops;
    // provenance into the tet mesh: generating edge per surface vertex and
    // generating tet per triangle
    std::vector<std::pair<int, int>> source_edges;
    std::vector<int> source_tets;

    bool is_closed() const { return boundary_loops.empty(); }
    std::string id() const {
        return std::to_string(layer_index) + "_" + std::to_string(component_index);
    }
};

struct LayerSet {
    double interval = 0.0; // d
    int layer_count = 0;
    std::vector<IGDS> surfaces; // ordered by (layer_index, component_index)
    const TetMesh* mesh = nullptr;
    ScalarField field;

    std::vector<const IGDS*> layer(int i) const;
    const IGDS* find(int i, int j) const;
};

// Linear interpolation point of Eq-style weights: phi strictly between the
// endpoint values.
Vec3 interpolate_point(const Vec3& vi, const Vec3& vj, double phi_i, double phi_j, double phi);

// Marching tetrahedra at iso value phi. tie_eps > 0 perturbs vertex values
// within tie_eps of phi to the positive side; tie_eps <= 0 selects the
// default 1e-9 * field range.
std::vector<IGDS> extract_igds(const TetMesh& mesh, const ScalarField& field, double phi,
                               double tie_eps = 0.0);

LayerSet decompose(const TetMesh& mesh, const ScalarField& field, double interval);

void write_layer_manifest(const LayerSet& layers, const std::string& path);
std::string layer_obj_name(const IGDS& s);

} // namespace geoslice
