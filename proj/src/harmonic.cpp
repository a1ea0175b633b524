#include "diskconf/harmonic.hpp"

#include <cmath>
#include <numbers>

namespace diskconf {

namespace {

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
           static_cast<uint32_t>(b);
}

}  // namespace

CotangentWeights::CotangentWeights(const TriangleMesh& mesh) {
    const auto& V = mesh.vertices();
    const auto& F = mesh.faces();
    corner_cots_.resize(F.size());
    weights_.reserve(mesh.edge_count());

    for (size_t t = 0; t < F.size(); ++t) {
        const Face& f = F[t];
        for (int c = 0; c < 3; ++c) {
            const Eigen::Vector3d& apex = V[f[c]];
            Eigen::Vector3d u = V[f[(c + 1) % 3]] - apex;
            Eigen::Vector3d w = V[f[(c + 2) % 3]] - apex;
            double cross = u.cross(w).norm();
            double dot = u.dot(w);
            double angle = std::atan2(cross, dot);
            if (angle < 1e-14 || angle > std::numbers::pi - 1e-14)
                throw DegenerateFaceError("angle at corner " + std::to_string(c) +
                                              " of face " + std::to_string(t) +
                                              " is numerically 0 or pi",
                                          static_cast<int>(t));
            corner_cots_[t][c] = dot / cross;
            weights_[edge_key(f[(c + 1) % 3], f[(c + 2) % 3])] += corner_cots_[t][c];
        }
    }
}

double CotangentWeights::at(int u, int v) const {
    auto it = weights_.find(edge_key(u, v));
    if (it == weights_.end())
        throw Error("no edge between vertices " + std::to_string(u) + " and " +
                    std::to_string(v));
    return it->second;
}

std::vector<Eigen::Triplet<double>> CotangentWeights::laplacian_triplets(
    const TriangleMesh& mesh) const {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(mesh.face_count() * 12);
    const auto& F = mesh.faces();
    for (size_t t = 0; t < F.size(); ++t) {
        const Face& f = F[t];
        for (int c = 0; c < 3; ++c) {
            int i = f[(c + 1) % 3];
            int j = f[(c + 2) % 3];
            double k = corner_cots_[t][c];
            triplets.emplace_back(i, j, -k);
            triplets.emplace_back(j, i, -k);
            triplets.emplace_back(i, i, k);
            triplets.emplace_back(j, j, k);
        }
    }
    return triplets;
}

CotangentWeights cotangent_weights(const TriangleMesh& mesh) {
    return CotangentWeights(mesh);
}

std::vector<double> boundary_angles(const std::vector<double>& lengths) {
    const size_t n = lengths.size();
    double total = 0.0;
    for (double l : lengths) total += l;
    std::vector<double> theta(n);
    double prefix = 0.0;
    for (size_t i = 0; i < n; ++i) {
        theta[i] = 2.0 * std::numbers::pi * prefix / total;
        prefix += lengths[i];
    }
    return theta;
}

PlanarMap harmonic_disk_map(const TriangleMesh& mesh, const CotangentWeights& weights,
                            const std::vector<double>& angles,
                            const SolveOptions& options) {
    const auto& loop = mesh.boundary_loop();
    if (angles.size() != loop.size())
        throw Error("boundary angle count does not match the boundary loop");

    const int nv = mesh.vertex_count();
    PlanarMap map(nv);

    std::vector<int> pinned(loop.begin(), loop.end());
    std::vector<double> bx(loop.size()), by(loop.size());
    for (size_t i = 0; i < loop.size(); ++i) {
        bx[i] = std::cos(angles[i]);
        by[i] = std::sin(angles[i]);
    }

    if (static_cast<int>(loop.size()) == nv) {
        // No interior vertices; boundary placement is the whole map.
        for (size_t i = 0; i < loop.size(); ++i) map[loop[i]] = {bx[i], by[i]};
        return map;
    }

    ConstrainedSpdSolver solver(nv, weights.laplacian_triplets(mesh), pinned, options);

    // The solver sorts constraint indices; reorder pinned values to match.
    std::vector<size_t> order(loop.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](size_t a, size_t b) { return loop[a] < loop[b]; });
    std::vector<double> vx(loop.size()), vy(loop.size());
    for (size_t k = 0; k < order.size(); ++k) {
        vx[k] = bx[order[k]];
        vy[k] = by[order[k]];
    }

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(nv);
    Eigen::VectorXd x = solver.solve(zero, vx);
    Eigen::VectorXd y = solver.solve(zero, vy);
    for (int i = 0; i < nv; ++i) map[i] = {x[i], y[i]};

    // Boundary values exactly as pinned.
    for (size_t i = 0; i < loop.size(); ++i) map[loop[i]] = {bx[i], by[i]};
    return map;
}

PlanarMap harmonic_disk_map(const TriangleMesh& mesh, const SolveOptions& options) {
    CotangentWeights weights(mesh);
    std::vector<double> angles = boundary_angles(mesh.boundary_edge_lengths());
    return harmonic_disk_map(mesh, weights, angles, options);
}

}  // namespace diskconf
