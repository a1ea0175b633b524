#pragma once

#include <span>

#include "diskconf/beltrami.hpp"
#include "diskconf/linear_solver.hpp"
#include "diskconf/mesh.hpp"

namespace diskconf {

/// Per-face coefficients of the elliptic operator div(M grad .), with
/// M = [[alpha1, alpha2], [alpha2, alpha3]]. M is symmetric positive definite
/// with det M = 1 whenever |mu| < 1.
struct LbsCoefficients {
    std::vector<std::array<double, 3>> alpha;
};

/// Input |mu| is clamped to at most 1 - 1e-3 (direction preserved) before the
/// coefficients are formed: intermediate fields from folded initializations
/// can reach |mu| >= 1 and the operator must stay uniformly elliptic.
/// Non-finite entries fall back to the clamp bound on the real axis.
LbsCoefficients lbs_coefficients(const BeltramiField& mu);

enum class PinKind {
    Point,      // both coordinates fixed to a complex value
    Imaginary,  // only the second coordinate fixed; the first stays free
};

struct VertexConstraint {
    int vertex;
    PinKind kind;
    std::complex<double> value;  // Imaginary pins read value.imag()
};

using BoundaryCondition = std::vector<VertexConstraint>;

/// Stiffness assembly from per-face linear gradients:
///   S(p,q) = sum_T 2 |A_T| grad(phi_p)^T M_T grad(phi_q).
/// With mu = 0 this reproduces the cotangent Laplacian exactly (diagonal
/// sum-of-weights convention).
std::vector<Eigen::Triplet<double>> assemble_lbs_fem(
    std::span<const std::complex<double>> coords, std::span<const Face> faces,
    const LbsCoefficients& coeffs);

/// Equivalent assembly in cyclic-difference form; kept as a guard against
/// index-convention mistakes and tested equal to the gradient form.
std::vector<Eigen::Triplet<double>> assemble_lbs_cyclic(
    std::span<const std::complex<double>> coords, std::span<const Face> faces,
    const LbsCoefficients& coeffs);

/// Reconstructs a quasi-conformal map with the prescribed per-face Beltrami
/// coefficients under the given constraints. The two coordinates solve sparse
/// SPD systems with the same matrix; Imaginary pins constrain only the second
/// coordinate's system.
PlanarMap lbs_solve(std::span<const std::complex<double>> domain,
                    std::span<const Face> faces, const BeltramiField& mu,
                    const BoundaryCondition& bc, const SolveOptions& options = {});

/// Mesh-domain overload. Planar meshes use their xy coordinates as the global
/// chart; 3D meshes assemble from per-face rigid flattenings, in which case
/// `mu` is interpreted per face in that chart (mu = 0 is chart-free and
/// reproduces the cotangent Laplace equation of the surface).
PlanarMap lbs_solve(const TriangleMesh& domain, const BeltramiField& mu,
                    const BoundaryCondition& bc, const SolveOptions& options = {});

}  // namespace diskconf
