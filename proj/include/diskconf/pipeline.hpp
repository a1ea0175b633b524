#pragma once

#include <utility>

#include "diskconf/lbs.hpp"
#include "diskconf/mesh.hpp"
#include "diskconf/metrics.hpp"

namespace diskconf {

/// W(z) = i(1+z)/(1-z), mapping the unit disk onto the upper half plane.
std::complex<double> cayley(std::complex<double> z);

/// W^{-1}(z) = (z-i)/(z+i).
std::complex<double> inverse_cayley(std::complex<double> z);

/// Rescales z onto the unit circle so that the double evaluation of
/// re*re + im*im rounds to exactly 1 (adjusting by at most a few ulp).
std::complex<double> project_to_unit_circle(std::complex<double> z);

/// Face whose image contains `target` (point-in-triangle with 1e-12 relative
/// tolerance, lowest index first); falls back to the face with the nearest
/// image centroid, ties broken by lowest face index.
int select_face_near(const PlanarMap& map, const TriangleMesh& mesh,
                     std::complex<double> target);

/// One-shot correction of interior conformality distortion: transform to the
/// upper half plane, reconstruct against the inverse field with the boundary
/// sliding along the real axis and the face spanning the point z = 1 fixed,
/// then transform back. Returns a map whose boundary stays on the unit circle.
PlanarMap north_pole_step(const TriangleMesh& mesh, const PlanarMap& f,
                          const SolveOptions& solver = {});

/// Extension of the disk parameter domain across the unit circle by the
/// reflection z -> 1/conj(z). Boundary vertices are shared; interior vertices
/// are duplicated. All extended faces are positively oriented; the reflected
/// copy of the face nearest the origin is dropped, its three reflected
/// vertices forming the outer fixed triangle of the resulting big-triangle
/// domain (Euler characteristic 1).
struct ReflectedDomain {
    std::vector<std::complex<double>> coords;  // original vertices, then reflected
    std::vector<Face> faces;                   // original faces, then reflections
    std::vector<int> reflected_of;  // per original vertex; boundary maps to itself
    std::vector<int> source_face;   // per extended face, the original face index
    std::array<int, 3> outer_vertices{};  // extended indices, pinned in place
    int inner_face = -1;                  // face whose reflection is dropped
};

struct ReflectionResult {
    ReflectedDomain domain;
    BeltramiField mu;   // inverse-map field on original faces, extended field on copies
    PlanarMap map;      // possibly recentered copy of the input map
    bool recentered = false;
};

ReflectionResult reflect_extend(const TriangleMesh& mesh, const PlanarMap& g);

struct PipelineOptions {
    double epsilon = 1e-5;
    int max_iter = 20;
    SolveOptions solver;
};

struct PipelineState {
    PlanarMap phi;
    int iteration = 0;
    double prev_mean_mu = 0.0;  // tracker for the stopping rule
    std::vector<double> energy_trace;
    PipelineOptions options;
    bool converged = false;
    bool nondecreasing_warning = false;
    double pre_projection_deviation = 0.0;
};

/// One boundary-correction iteration: reflect, reconstruct with the outer
/// triangle fixed, restrict to the original vertices, reproject the boundary
/// onto the circle, and update the stopping tracker.
std::pair<PlanarMap, PipelineState> south_pole_iteration(const TriangleMesh& mesh,
                                                         const PlanarMap& g,
                                                         PipelineState state);

struct PipelineResult {
    PlanarMap phi;
    QualityReport report;
};

/// Full run: harmonic initialization, one north-pole correction, then
/// south-pole iterations until mean |mu| stops improving by epsilon or the
/// iteration cap is hit. Bijectivity is checked and reported, not enforced.
PipelineResult run_pipeline(const TriangleMesh& mesh, const PipelineOptions& = {});

}  // namespace diskconf
