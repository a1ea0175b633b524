#pragma once

#include <iosfwd>
#include <span>

#include "diskconf/mesh.hpp"

namespace diskconf {

/// Per-face Wirtinger derivatives (df/dz, df/dzbar) of a piecewise-linear map.
struct FaceJets {
    std::vector<std::complex<double>> fz;
    std::vector<std::complex<double>> fzbar;
};

/// Canonical orientation-preserving flattening of a 3D triangle: first vertex
/// at the origin, first edge along the positive real axis, third vertex in
/// the upper half plane. The Beltrami coefficient of a map into the face is
/// independent of this choice because rigid motions are conformal.
std::array<std::complex<double>, 3> flatten_face(const Eigen::Vector3d& p0,
                                                 const Eigen::Vector3d& p1,
                                                 const Eigen::Vector3d& p2);

FaceJets face_jets(std::span<const std::complex<double>> source,
                   std::span<const Face> faces, const PlanarMap& image);

/// mu of the PL map from a planar source to planar image values, per face.
/// Equals the exact Beltrami coefficient of the affine map on each face.
/// Throws DivisionByZeroError (with face index) on a degenerate image face.
BeltramiField face_beltrami_planar(std::span<const std::complex<double>> source,
                                   std::span<const Face> faces,
                                   const PlanarMap& image);
BeltramiField face_beltrami_planar(const TriangleMesh& source, const PlanarMap& image);

/// mu of the PL map from planar domain coordinates onto a surface: each
/// target face is rigidly flattened, then the planar quotient is applied.
BeltramiField face_beltrami_lifted(const PlanarMap& source, const TriangleMesh& target);

/// Non-throwing variant used where folded or collapsed faces must surface as
/// field values (|mu| >= 1, possibly infinite) instead of errors.
BeltramiField face_beltrami_lifted_raw(const PlanarMap& source,
                                       const TriangleMesh& target);

/// Beltrami field of the piecewise-linear inverse of `forward`, computed by
/// swapping the source and image roles per face (exact for affine faces).
/// Throws FoldedFaceError when some face has |mu| >= 1.
BeltramiField inverse_beltrami(const PlanarMap& forward, const TriangleMesh& source);

/// Composition rule: mu_{g o f} from mu_f, the jets of f, and mu_g pulled
/// back to the faces of f.
BeltramiField compose_beltrami(const BeltramiField& mu_f, const FaceJets& jets_f,
                               const BeltramiField& mu_g_pulled);

/// K = (1 + max|mu|) / (1 - max|mu|); throws UnboundedDilationError if
/// max |mu| >= 1.
double maximal_dilation(const BeltramiField& mu);

/// Forward field of the map mesh -> plane (source faces flattened when the
/// mesh is 3D). Non-throwing: degenerate image faces yield infinite entries.
/// Per face, |result| equals |mu| of the PL inverse exactly.
BeltramiField beltrami_of_map(const TriangleMesh& mesh, const PlanarMap& map);

double mean_abs(const BeltramiField& mu);

/// CSV rows "face,re,im".
void write_beltrami_csv(std::ostream& out, const BeltramiField& field);

}  // namespace diskconf
