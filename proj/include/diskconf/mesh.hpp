#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "diskconf/errors.hpp"

namespace diskconf {

using Face = std::array<int, 3>;

/// Per-vertex complex coordinates in the parameter domain.
using PlanarMap = std::vector<std::complex<double>>;

/// Per-face complex Beltrami coefficients.
using BeltramiField = std::vector<std::complex<double>>;

struct TopologyReport {
    int euler = 0;
    int boundary_loops = 0;
    bool orientable = true;
};

/// Topology diagnostic on raw vertex/face data. Pure: never throws on bad
/// topology; callers convert to TopologyError where the pipeline requires
/// euler == 1, boundary_loops == 1, orientable == true.
TopologyReport validate_topology(std::span<const Eigen::Vector3d> vertices,
                                 std::span<const Face> faces);

struct MeshOptions {
    /// Merge vertices closer than merge_tolerance * bounding-box diagonal
    /// before validation. Off by default: silent welding can change topology.
    bool merge_duplicates = false;
    double merge_tolerance = 1e-12;
};

/// Simply-connected open triangle mesh. Immutable after construction; all
/// queries are pure and safe to share across threads.
///
/// Invariants established by from_data:
///   - every face references three distinct in-range vertices with positive area
///   - every interior edge has exactly two incident faces, every boundary edge one
///   - consistent orientation, single connected component
///   - Euler characteristic V - E + F = 1 and exactly one boundary loop
class TriangleMesh {
public:
    static TriangleMesh from_data(std::vector<Eigen::Vector3d> vertices,
                                  std::vector<Face> faces,
                                  const MeshOptions& options = {});

    int vertex_count() const { return static_cast<int>(vertices_.size()); }
    int face_count() const { return static_cast<int>(faces_.size()); }
    int edge_count() const { return edge_count_; }

    const std::vector<Eigen::Vector3d>& vertices() const { return vertices_; }
    const std::vector<Face>& faces() const { return faces_; }

    /// Ordered boundary loop. Starts at the lowest-index boundary vertex and
    /// follows face orientation, so the interior lies to the left.
    const std::vector<int>& boundary_loop() const { return boundary_; }

    bool is_boundary_vertex(int v) const { return boundary_flag_[v]; }

    /// Euclidean lengths of consecutive boundary edges, with wrap-around.
    std::vector<double> boundary_edge_lengths() const;

    /// True when every vertex has z == 0; such meshes are treated as planar
    /// domains with their xy coordinates as the global chart.
    bool is_planar() const { return planar_; }

    double face_area(int f) const;

    /// Longest bounding-box diagonal; used as the mesh scale in tolerances.
    double bbox_diagonal() const;

private:
    TriangleMesh() = default;

    std::vector<Eigen::Vector3d> vertices_;
    std::vector<Face> faces_;
    std::vector<int> boundary_;
    std::vector<bool> boundary_flag_;
    int edge_count_ = 0;
    bool planar_ = false;
};

/// Merge near-duplicate vertices on raw data. Tolerance is absolute here;
/// from_data scales MeshOptions::merge_tolerance by the bbox diagonal.
void merge_duplicate_vertices(std::vector<Eigen::Vector3d>& vertices,
                              std::vector<Face>& faces, double tolerance);

}  // namespace diskconf
