#pragma once

#include "geoslice/tet_mesh.hpp"

#include <Eigen/Sparse>

namespace geoslice {

enum class FieldKind { Temperature, GeodesicDistance };

// One value per vertex.
struct ScalarField {
    std::vector<double> values;
    FieldKind kind = FieldKind::Temperature;

    double min() const;
    double max() const;
    double range() const { return max() - min(); }
};

// Volumetric cotangent operator: L_c (symmetric, zero row sums) and the
// vertex-volume diagonal.
struct SparseOperator {
    Eigen::SparseMatrix<double> laplacian;  // L_c
    std::vector<double> vertex_volume;      // diagonal of V
    int negative_weight_edges = 0;
    int edge_total = 0;

    int size() const { return int(laplacian.rows()); }
    double negative_weight_fraction() const {
        return edge_total ? double(negative_weight_edges) / double(edge_total) : 0.0;
    }
};

// One unit vector per tetrahedron; invalid where the field is locally constant.
struct GradientField {
    std::vector<Vec3> directions;
    std::vector<char> valid;
};

struct FieldParams {
    double time_scale = 1.0;   // c in t = c * h^2
    double tolerance = 1e-10;  // solver relative residual

    void validate() const;
};

// Edge weights w_ij = 1/6 sum_k l_k cot(theta_k) over tets adjacent to edge
// (i,j); l_k and theta_k are length and dihedral angle of the opposite edge.
SparseOperator build_laplacian(const TetMesh& mesh);

// Backward-Euler heat step in symmetric form: (V - tL_c) u = V u0 with
// u0 the indicator of the source set and t = time_scale * h^2.
ScalarField solve_heat(const TetMesh& mesh, const SparseOperator& op, const VertexSet& source,
                       const FieldParams& params);

// Per-tet gradient of the linear interpolant of u. Raw values (no sign flip,
// no normalization); used by tests and by the normalized field below.
std::vector<Vec3> raw_gradient(const TetMesh& mesh, const std::vector<double>& u);

// Normalized field X = -grad(u)/|grad(u)|: unit vectors pointing from hot to
// cold, i.e. toward increasing geodesic distance.
GradientField gradient(const TetMesh& mesh, const ScalarField& u);

// Integrated divergence: b_i = sum over incident tets of -(S_k n_k . g_k)/3,
// with (S_k, n_k) area and away-from-i normal of the face opposite vertex i.
std::vector<double> divergence(const TetMesh& mesh, const GradientField& field);

// Solves L_c phi = b with one source vertex pinned, orients the result so the
// field increases away from the source, and shifts min over source to zero.
ScalarField solve_geodesic(const SparseOperator& op, const std::vector<double>& b,
                           const VertexSet& source, const FieldParams& params);

// Full pipeline of the four steps above.
ScalarField geodesic_distance_field(const TetMesh& mesh, const VertexSet& source,
                                    const FieldParams& params = {});

// Shared symmetric sparse solve: LDLT first, LU fallback, residual checked.
Eigen::VectorXd solve_symmetric(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs,
                                double tolerance);

} // namespace geoslice
