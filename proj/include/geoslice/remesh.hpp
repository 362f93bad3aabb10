#pragma once

#include "geoslice/geom.hpp"
#include "geoslice/layers.hpp"

namespace geoslice {

struct RemeshParams {
    double target_edge = 0.0; // mm; <= 0 means keep the input scale
    int iterations = 0;
    int smoothing_passes = 2;

    bool enabled() const { return iterations > 0; }
};

// Isotropic remeshing (split/collapse/flip/tangential relax) followed by
// push-back Laplacian smoothing. Interior vertices are reprojected onto the
// phi iso-surface; boundary vertices stay on the tet-mesh boundary.
IGDS remesh_and_smooth(const IGDS& s, const TetMesh& mesh, const ScalarField& field,
                       const TetLocator& locator, const TriGrid& boundary_grid,
                       const RemeshParams& params);

} // namespace geoslice
