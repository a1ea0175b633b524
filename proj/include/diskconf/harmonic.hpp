#pragma once

#include <unordered_map>
#include <vector>

#include "diskconf/linear_solver.hpp"
#include "diskconf/mesh.hpp"

namespace diskconf {

/// Cotangent edge weights k_uv = cot(alpha) + cot(beta) over the angles
/// opposite edge [u,v]. Interior edges aggregate two cotangents, boundary
/// edges one. Negative weights from obtuse triangles are kept unclamped;
/// later pipeline stages correct any resulting fold-overs and the final map
/// is checked for bijectivity explicitly.
class CotangentWeights {
public:
    explicit CotangentWeights(const TriangleMesh& mesh);

    /// Weight of undirected edge {u, v}; throws if the edge does not exist.
    double at(int u, int v) const;

    /// cot of the angle at corner c of face f (opposite edge (c+1, c+2)).
    double corner_cot(int f, int c) const { return corner_cots_[f][c]; }

    size_t edge_count() const { return weights_.size(); }

    /// Assembles the V x V matrix with A(i,i) = sum_j k_ij and A(i,j) = -k_ij,
    /// the positive semidefinite convention. Deterministic face-order assembly.
    std::vector<Eigen::Triplet<double>> laplacian_triplets(const TriangleMesh& mesh) const;

private:
    std::vector<std::array<double, 3>> corner_cots_;
    std::unordered_map<uint64_t, double> weights_;
};

CotangentWeights cotangent_weights(const TriangleMesh& mesh);

/// theta_i = 2*pi*s_i/s from the prefix sums of the boundary edge lengths.
/// theta_0 = 0, strictly increasing, all in [0, 2*pi).
std::vector<double> boundary_angles(const std::vector<double>& lengths);

/// Discrete harmonic map to the unit disk: boundary vertex v_i goes exactly to
/// (cos theta_i, sin theta_i); interior vertices satisfy the cotangent Laplace
/// equation. The two coordinates are solved against the same matrix.
PlanarMap harmonic_disk_map(const TriangleMesh& mesh, const CotangentWeights& weights,
                            const std::vector<double>& angles,
                            const SolveOptions& options = {});

/// Convenience overload computing weights and angles from the mesh.
PlanarMap harmonic_disk_map(const TriangleMesh& mesh, const SolveOptions& options = {});

}  // namespace diskconf
