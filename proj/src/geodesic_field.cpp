#include "geoslice/geodesic_field.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

namespace geoslice {

double ScalarField::min() const { return *std::min_element(values.begin(), values.end()); }
double ScalarField::max() const { return *std::max_element(values.begin(), values.end()); }

void FieldParams::validate() const {
    if (!(time_scale > 0.0)) throw Error("field time-scale multiplier must be positive");
    if (!(tolerance > 0.0) || tolerance > 1e-4)
        throw Error("solver tolerance must lie in (0, 1e-4]");
}

namespace {

// cot of the dihedral angle at edge (p,q) of tet (i,j,p,q): angle between the
// in-plane directions from the edge toward i and toward j.
double dihedral_cot(const Vec3& p, const Vec3& q, const Vec3& vi, const Vec3& vj, int tet_index) {
    Vec3 axis = q - p;
    double axis_len = axis.norm();
    if (axis_len < 1e-300) throw Error("tet " + std::to_string(tet_index) + ": degenerate edge");
    axis /= axis_len;
    Vec3 a = vi - p;
    Vec3 b = vj - p;
    a -= axis * a.dot(axis);
    b -= axis * b.dot(axis);
    double cross = a.cross(b).norm();
    double dot = a.dot(b);
    if (cross < 1e-14 * std::max(a.norm() * b.norm(), 1e-300))
        throw Error("tet " + std::to_string(tet_index) + ": dihedral angle of 0 or pi (degenerate)");
    return dot / cross;
}

} // namespace

SparseOperator build_laplacian(const TetMesh& mesh) {
    const int n = mesh.vertex_count();
    // per-tet: edge (i,j) paired with its opposite edge (p,q)
    static const int edge_pairs[6][4] = {
        {0, 1, 2, 3}, {0, 2, 1, 3}, {0, 3, 1, 2}, {1, 2, 0, 3}, {1, 3, 0, 2}, {2, 3, 0, 1}};

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(std::size_t(mesh.tet_count()) * 16);
    std::vector<double> diag(n, 0.0);

    // accumulate per-edge weights to count negative totals
    std::map<std::pair<int, int>, double> edge_weight;

    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets[t];
        for (const auto& ep : edge_pairs) {
            int i = tet[ep[0]], j = tet[ep[1]], p = tet[ep[2]], q = tet[ep[3]];
            double l = (mesh.vertices[p] - mesh.vertices[q]).norm();
            double w = l * dihedral_cot(mesh.vertices[p], mesh.vertices[q], mesh.vertices[i],
                                        mesh.vertices[j], t) / 6.0;
            triplets.emplace_back(i, j, w);
            triplets.emplace_back(j, i, w);
            diag[i] -= w;
            diag[j] -= w;
            edge_weight[std::minmax(i, j)] += w;
        }
    }
    for (int i = 0; i < n; ++i) triplets.emplace_back(i, i, diag[i]);

    SparseOperator op;
    op.laplacian.resize(n, n);
    op.laplacian.setFromTriplets(triplets.begin(), triplets.end());
    op.laplacian.makeCompressed();
    op.vertex_volume = vertex_volumes(mesh);
    op.edge_total = int(edge_weight.size());
    for (const auto& [e, w] : edge_weight)
        if (w < 0.0) op.negative_weight_edges++;
    return op;
}

Eigen::VectorXd solve_symmetric(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& rhs,
                                double tolerance) {
    double rhs_norm = rhs.norm();
    if (rhs_norm == 0.0) return Eigen::VectorXd::Zero(A.rows());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
    if (ldlt.info() == Eigen::Success) {
        Eigen::VectorXd x = ldlt.solve(rhs);
        if (ldlt.info() == Eigen::Success && (A * x - rhs).norm() <= tolerance * rhs_norm) return x;
    }
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    if (lu.info() != Eigen::Success) throw Error("sparse factorization failed (singular system)");
    Eigen::VectorXd x = lu.solve(rhs);
    double residual = (A * x - rhs).norm() / rhs_norm;
    if (lu.info() != Eigen::Success || residual > tolerance)
        throw Error("linear solve did not reach requested residual (got " + std::to_string(residual) + ")");
    return x;
}

ScalarField solve_heat(const TetMesh& mesh, const SparseOperator& op, const VertexSet& source,
                       const FieldParams& params) {
    params.validate();
    if (source.empty()) throw Error("heat source set is empty");
    const int n = op.size();

    double h = mesh.mean_edge_length;
    double t = params.time_scale * h * h;

    // (V - t L_c) u = V u0
    Eigen::SparseMatrix<double> A = -t * op.laplacian;
    for (int i = 0; i < n; ++i) A.coeffRef(i, i) += op.vertex_volume[i];
    A.makeCompressed();

    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (int v : source.indices) rhs[v] = op.vertex_volume[v];

    Eigen::VectorXd u = solve_symmetric(A, rhs, params.tolerance);

    ScalarField field;
    field.kind = FieldKind::Temperature;
    field.values.assign(u.data(), u.data() + n);
    return field;
}

std::vector<Vec3> raw_gradient(const TetMesh& mesh, const std::vector<double>& u) {
    std::vector<Vec3> grads(mesh.tet_count());
    for (int t = 0; t < mesh.tet_count(); ++t) {
        const auto& tet = mesh.tets[t];
        Eigen::Matrix3d M;
        M.row(0) = mesh.vertices[tet[0]] - mesh.vertices[tet[3]];
        M.row(1) = mesh.vertices[tet[1]] - mesh.vertices[tet[3]];
        M.row(2) = mesh.vertices[tet[2]] - mesh.vertices[tet[3]];
        Vec3 du(u[tet[0]] - u[tet[3]], u[tet[1]] - u[tet[3]], u[tet[2]] - u[tet[3]]);
        grads[t] = M.partialPivLu().solve(du);
    }
    return grads;
}

GradientField gradient(const TetMesh& mesh, const ScalarField& u) {
    GradientField field;
    field.directions.assign(mesh.tet_count(), Vec3::Zero());
    field.valid.assign(mesh.tet_count(), 0);
    auto raw = raw_gradient(mesh, u.values);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        double len = raw[t].norm();
        if (len < 1e-12) continue;
        field.directions[t] = -raw[t] / len; // from hot toward cold
        field.valid[t] = 1;
    }
    return field;
}

std::vector<double> divergence(const TetMesh& mesh, const GradientField& field) {
    std::vector<double> b(mesh.vertex_count(), 0.0);
    for (int t = 0; t < mesh.tet_count(); ++t) {
        if (!field.valid[t]) continue;
        const Vec3& g = field.directions[t];
        const auto& tet = mesh.tets[t];
        for (int k = 0; k < 4; ++k) {
            // face opposite corner k, normal oriented away from vertex k
            const Vec3& a = mesh.vertices[tet[(k + 1) % 4]];
            const Vec3& c = mesh.vertices[tet[(k + 2) % 4]];
            const Vec3& d = mesh.vertices[tet[(k + 3) % 4]];
            Vec3 sn = 0.5 * (c - a).cross(d - a); // area-weighted normal
            const Vec3& v = mesh.vertices[tet[k]];
            if (sn.dot(a - v) < 0.0) sn = -sn;
            b[tet[k]] -= sn.dot(g) / 3.0;
        }
    }
    return b;
}

ScalarField solve_geodesic(const SparseOperator& op, const std::vector<double>& b,
                           const VertexSet& source, const FieldParams& params) {
    params.validate();
    if (source.empty()) throw Error("source set is empty");
    const int n = op.size();
    const int pin = source.indices.front();

    // reduced system without the pinned vertex (its value is 0)
    std::vector<int> to_reduced(n, -1);
    int m = 0;
    for (int i = 0; i < n; ++i)
        if (i != pin) to_reduced[i] = m++;

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(op.laplacian.nonZeros());
    for (int col = 0; col < op.laplacian.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(op.laplacian, col); it; ++it) {
            int r = to_reduced[int(it.row())];
            int c = to_reduced[int(it.col())];
            if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
        }
    }
    Eigen::SparseMatrix<double> A(m, m);
    A.setFromTriplets(triplets.begin(), triplets.end());
    A.makeCompressed();

    Eigen::VectorXd rhs(m);
    for (int i = 0; i < n; ++i)
        if (i != pin) rhs[to_reduced[i]] = b[i];

    Eigen::VectorXd x = solve_symmetric(A, rhs, params.tolerance);

    std::vector<double> phi(n, 0.0);
    for (int i = 0; i < n; ++i)
        if (i != pin) phi[i] = x[to_reduced[i]];

    // orient so the field increases away from the source
    double source_mean = 0.0;
    for (int v : source.indices) source_mean += phi[v];
    source_mean /= double(source.indices.size());
    double global_mean = 0.0;
    for (double v : phi) global_mean += v;
    global_mean /= double(n);
    if (source_mean > global_mean)
        for (double& v : phi) v = -v;

    // shift so min over source is zero
    double source_min = phi[source.indices.front()];
    for (int v : source.indices) source_min = std::min(source_min, phi[v]);
    for (double& v : phi) v -= source_min;

    ScalarField field;
    field.kind = FieldKind::GeodesicDistance;
    field.values = std::move(phi);
    return field;
}

ScalarField geodesic_distance_field(const TetMesh& mesh, const VertexSet& source,
                                    const FieldParams& params) {
    SparseOperator op = build_laplacian(mesh);
    if (op.negative_weight_fraction() > 0.05)
        std::cerr << "warning: " << op.negative_weight_edges << " of " << op.edge_total
                  << " edges have negative cotangent weight; mesh quality is low\n";
    ScalarField u = solve_heat(mesh, op, source, params);
    GradientField X = gradient(mesh, u);
    std::vector<double> b = divergence(mesh, X);
    return solve_geodesic(op, b, source, params);
}

} // namespace geoslice
