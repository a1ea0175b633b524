#include "diskconf/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <numbers>

#include "diskconf/beltrami.hpp"
#include "diskconf/harmonic.hpp"

namespace diskconf {

namespace {

using cd = std::complex<double>;

double now_seconds() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

}  // namespace

cd cayley(cd z) {
    if (std::abs(1.0 - z) < 1e-15 * (1.0 + std::abs(z)))
        throw PoleError("Cayley transform is singular at z = 1");
    return cd(0, 1) * (1.0 + z) / (1.0 - z);
}

cd inverse_cayley(cd z) {
    if (std::abs(z + cd(0, 1)) < 1e-15 * (1.0 + std::abs(z)))
        throw PoleError("inverse Cayley transform is singular at z = -i");
    return (z - cd(0, 1)) / (z + cd(0, 1));
}

cd project_to_unit_circle(cd z) {
    double n = std::abs(z);
    if (n == 0.0) return {1.0, 0.0};
    double u = z.real() / n;
    double v = z.imag() / n;
    if (1.0 - (u * u + v * v) == 0.0) return {u, v};

    // Nudge one component by a few ulp; stepping the smaller component gives
    // the finest control over the rounded sum.
    double best_u = u, best_v = v;
    double best_err = std::abs(1.0 - (u * u + v * v));
    auto scan = [&](bool adjust_u) {
        for (int dir = -1; dir <= 1; dir += 2) {
            double uu = u, vv = v;
            for (int k = 0; k < 8; ++k) {
                if (adjust_u)
                    uu = std::nextafter(uu, dir > 0 ? 2.0 : -2.0);
                else
                    vv = std::nextafter(vv, dir > 0 ? 2.0 : -2.0);
                double err = std::abs(1.0 - (uu * uu + vv * vv));
                if (err < best_err) {
                    best_u = uu;
                    best_v = vv;
                    best_err = err;
                }
                if (err == 0.0) return true;
            }
        }
        return false;
    };
    bool u_smaller = std::abs(u) < std::abs(v);
    if (scan(u_smaller) || scan(!u_smaller)) return {best_u, best_v};

    // Exact-complement fallback: with b = fl(big^2) >= 1/2 the difference
    // 1 - b is exact (Sterbenz), so a small component s with fl(s*s) == 1 - b
    // makes fl(s*s + b) == 1 exactly. Candidates around sqrt(1 - b) reach it.
    const bool u_is_big = std::abs(u) >= std::abs(v);
    double big = u_is_big ? u : v;
    double small = u_is_big ? v : u;
    for (int db = -1; db <= 1; ++db) {
        double bb = db == 0 ? big : std::nextafter(big, db > 0 ? 2.0 : -2.0);
        double b2 = bb * bb;
        double rem = 1.0 - b2;
        if (rem < 0.0) continue;
        double s0 = std::copysign(std::sqrt(rem), small == 0.0 ? 1.0 : small);
        if (small == 0.0 && rem == 0.0) s0 = 0.0;
        for (int ds = -2; ds <= 2; ++ds) {
            double ss = s0;
            for (int k = 0; k < std::abs(ds); ++k)
                ss = std::nextafter(ss, ds > 0 ? 2.0 : -2.0);
            double err = std::abs(1.0 - (ss * ss + b2));
            if (err < best_err) {
                best_u = u_is_big ? bb : ss;
                best_v = u_is_big ? ss : bb;
                best_err = err;
            }
            if (err == 0.0) return {best_u, best_v};
        }
    }
    return {best_u, best_v};
}

int select_face_near(const PlanarMap& map, const TriangleMesh& mesh, cd target) {
    if (mesh.face_count() == 0) throw FaceSelectionError("mesh has no faces");
    const auto& F = mesh.faces();
    for (int t = 0; t < mesh.face_count(); ++t) {
        const cd& a = map[F[t][0]];
        const cd& b = map[F[t][1]];
        const cd& c = map[F[t][2]];
        auto cross = [](cd u, cd v) {
            return u.real() * v.imag() - u.imag() * v.real();
        };
        double s0 = cross(b - a, target - a);
        double s1 = cross(c - b, target - b);
        double s2 = cross(a - c, target - c);
        double area = cross(b - a, c - a);
        double tol = 1e-12 * std::abs(area);
        if (area > 0.0) {
            if (s0 >= -tol && s1 >= -tol && s2 >= -tol) return t;
        } else if (area < 0.0) {
            if (s0 <= tol && s1 <= tol && s2 <= tol) return t;
        }
    }
    int best = 0;
    double best_dist = std::numeric_limits<double>::infinity();
    for (int t = 0; t < mesh.face_count(); ++t) {
        cd centroid = (map[F[t][0]] + map[F[t][1]] + map[F[t][2]]) / 3.0;
        double d = std::abs(centroid - target);
        if (d < best_dist) {
            best_dist = d;
            best = t;
        }
    }
    return best;
}

namespace {

// The arc-length boundary condition places a vertex exactly at z = 1, the
// Cayley pole. Rotating the disk so that 1 falls at the midpoint of the
// widest boundary arc keeps all vertex images well away from the pole; the
// rotation is undone afterwards and, being conformal, leaves the field
// untouched.
struct PoleRotation {
    cd rotation;      // multiply f by this before the transform
    int gap_start;    // boundary loop position opening the widest arc
    double gap_size;  // angular width of that arc
};

PoleRotation widest_gap_rotation(const TriangleMesh& mesh, const PlanarMap& f) {
    const auto& loop = mesh.boundary_loop();
    const int n = static_cast<int>(loop.size());
    double best_gap = -1.0;
    double best_mid = 0.0;
    int best_i = 0;
    const double two_pi = 2.0 * std::numbers::pi;
    for (int i = 0; i < n; ++i) {
        double a0 = std::arg(f[loop[i]]);
        double a1 = std::arg(f[loop[(i + 1) % n]]);
        double gap = a1 - a0;
        while (gap <= 0.0) gap += two_pi;
        if (gap > best_gap) {
            best_gap = gap;
            best_mid = a0 + 0.5 * gap;
            best_i = i;
        }
    }
    return {std::polar(1.0, -best_mid), best_i, best_gap};
}

int face_of_directed_edge(const TriangleMesh& mesh, int a, int b) {
    const auto& F = mesh.faces();
    for (int t = 0; t < mesh.face_count(); ++t)
        for (int e = 0; e < 3; ++e)
            if (F[t][e] == a && F[t][(e + 1) % 3] == b) return t;
    throw FaceSelectionError("no face owns the boundary edge (" + std::to_string(a) +
                             "," + std::to_string(b) + ")");
}

double signed_area2(std::span<const cd> coords, const Face& f) {
    const cd& a = coords[f[0]];
    const cd& b = coords[f[1]];
    const cd& c = coords[f[2]];
    return (b.real() - a.real()) * (c.imag() - a.imag()) -
           (c.real() - a.real()) * (b.imag() - a.imag());
}

// Field values are untrustworthy where the vertex-sampled transform breaks
// down: on folded faces (role-swap |mu| >= 1), on non-positively oriented
// domain faces, and in the far region where face size rivals the distance to
// the singular point. Zeroing the coefficient there prescribes a plain
// Laplace term instead, so those faces relax smoothly and can unfold.
void sanitize_field(std::span<const cd> coords, std::span<const Face> faces,
                    double far_radius, BeltramiField& mu) {
    for (size_t t = 0; t < faces.size(); ++t) {
        if (!(std::abs(mu[t]) < 1.0)) {
            mu[t] = 0.0;
            continue;
        }
        if (signed_area2(coords, faces[t]) <= 0.0) {
            mu[t] = 0.0;
            continue;
        }
        const Face& f = faces[t];
        double r = std::min({std::abs(coords[f[0]]), std::abs(coords[f[1]]),
                             std::abs(coords[f[2]])});
        if (r >= far_radius) mu[t] = 0.0;
    }
}

// Barycentric coordinates of the origin within the face image; all three
// positive means the origin lies strictly inside.
std::array<double, 3> origin_barycentric(const PlanarMap& map, const Face& f) {
    cd a = map[f[0]], b = map[f[1]], c = map[f[2]];
    auto cross = [](cd u, cd v) { return u.real() * v.imag() - u.imag() * v.real(); };
    double total = cross(b - a, c - a);
    if (total == 0.0) return {0.0, 0.0, 0.0};
    return {cross(b, c) / total, cross(c, a) / total, cross(a, b) / total};
}

}  // namespace

PlanarMap north_pole_step(const TriangleMesh& mesh, const PlanarMap& f,
                          const SolveOptions& solver) {
    const auto& loop = mesh.boundary_loop();
    const int n = static_cast<int>(loop.size());
    const int nv = mesh.vertex_count();

    // With no interior vertices there is no interior distortion to correct,
    // and the transformed domain would collapse onto the real axis.
    if (n == nv) return f;

    PoleRotation rot = widest_gap_rotation(mesh, f);

    PlanarMap wf(nv);
    for (int v = 0; v < nv; ++v) wf[v] = cayley(rot.rotation * f[v]);

    // The face spanning the arc through z = 1 degenerates under the
    // vertex-sampled transform; pinning all three of its vertices removes it
    // from the reduced system. Faces within a few arc gaps of the pole carry
    // O(h/d) sampling error in their field values, so the field is zeroed
    // beyond far_radius; that pole patch maps to a small boundary region,
    // which the reflection iterations own.
    int pole_face = face_of_directed_edge(mesh, loop[rot.gap_start],
                                          loop[(rot.gap_start + 1) % n]);
    const double far_radius = 0.5 / rot.gap_size;

    BeltramiField mu = face_beltrami_lifted_raw(wf, mesh);
    sanitize_field(wf, mesh.faces(), far_radius, mu);

    BoundaryCondition bc;
    bc.reserve(n + 3);
    std::vector<char> point_pinned(nv, 0);
    for (int v : mesh.faces()[pole_face]) {
        bc.push_back({v, PinKind::Point, wf[v]});
        point_pinned[v] = 1;
    }
    for (int v : loop)
        if (!point_pinned[v]) bc.push_back({v, PinKind::Imaginary, cd(0.0, 0.0)});

    PlanarMap h = lbs_solve(wf, mesh.faces(), mu, bc, solver);

    PlanarMap g(nv);
    cd undo = std::conj(rot.rotation);
    for (int v = 0; v < nv; ++v) g[v] = undo * inverse_cayley(h[v]);
    return g;
}

ReflectionResult reflect_extend(const TriangleMesh& mesh, const PlanarMap& g) {
    const int nv = mesh.vertex_count();
    ReflectionResult result;
    result.map = g;

    // The reflection sends points near the origin far out, so the face that
    // anchors the outer triangle must contain the origin with a healthy
    // margin; a vertex image at the origin would even reflect to infinity.
    // Recentering with a disk automorphism places the origin at that face's
    // centroid. Automorphisms are conformal, so the field is untouched.
    int inner_face = select_face_near(result.map, mesh, cd(0.0, 0.0));
    for (int attempt = 0; attempt < 5; ++attempt) {
        auto bary = origin_barycentric(result.map, mesh.faces()[inner_face]);
        if (std::min({bary[0], bary[1], bary[2]}) >= 0.1) break;
        const Face& f = mesh.faces()[inner_face];
        cd centroid = (result.map[f[0]] + result.map[f[1]] + result.map[f[2]]) / 3.0;
        cd c = -centroid;
        for (int v = 0; v < nv; ++v)
            result.map[v] = (result.map[v] + c) / (1.0 + std::conj(c) * result.map[v]);
        for (int v : mesh.boundary_loop())
            result.map[v] = project_to_unit_circle(result.map[v]);
        result.recentered = true;
        inner_face = select_face_near(result.map, mesh, cd(0.0, 0.0));
    }
    const PlanarMap& phi = result.map;

    ReflectedDomain& dom = result.domain;
    dom.inner_face = inner_face;

    dom.coords.assign(phi.begin(), phi.end());
    dom.reflected_of.resize(nv);
    for (int v = 0; v < nv; ++v) {
        if (mesh.is_boundary_vertex(v)) {
            dom.reflected_of[v] = v;  // fixed points of the reflection
        } else {
            dom.reflected_of[v] = static_cast<int>(dom.coords.size());
            dom.coords.push_back(1.0 / std::conj(phi[v]));
        }
    }

    const auto& F = mesh.faces();
    const int nf = mesh.face_count();
    dom.faces.assign(F.begin(), F.end());
    dom.source_face.resize(nf);
    for (int t = 0; t < nf; ++t) dom.source_face[t] = t;

    BeltramiField inverse_mu = face_beltrami_lifted_raw(phi, mesh);
    result.mu = inverse_mu;
    result.mu.reserve(2 * nf);
    dom.faces.reserve(2 * nf);
    for (int t = 0; t < nf; ++t) {
        if (t == dom.inner_face) continue;
        const Face& f = F[t];
        // Orientation flips under the reflection; reversing the vertex order
        // keeps the extended faces positively oriented.
        dom.faces.push_back(
            {dom.reflected_of[f[0]], dom.reflected_of[f[2]], dom.reflected_of[f[1]]});
        dom.source_face.push_back(t);
        cd factor = 0.0;
        for (int c = 0; c < 3; ++c) {
            cd z = phi[f[c]];
            cd ratio = z / std::conj(z);
            factor += ratio * ratio;
        }
        factor /= 3.0;
        result.mu.push_back(factor * std::conj(inverse_mu[t]));
    }

    const Face& inner = F[dom.inner_face];
    dom.outer_vertices = {dom.reflected_of[inner[0]], dom.reflected_of[inner[1]],
                          dom.reflected_of[inner[2]]};
    return result;
}

std::pair<PlanarMap, PipelineState> south_pole_iteration(const TriangleMesh& mesh,
                                                         const PlanarMap& g,
                                                         PipelineState state) {
    ReflectionResult rr = reflect_extend(mesh, g);

    // Reflections of faces near the origin are sampled too poorly to trust,
    // so the whole outermost region of the extended domain is held in place,
    // not only the outer triangle: every reflected copy is pinned. The
    // boundary ring is shared with the original disk and stays free, coupled
    // to the well-resolved first layer of reflected faces.
    sanitize_field(rr.domain.coords, rr.domain.faces,
                   std::numeric_limits<double>::infinity(), rr.mu);

    BoundaryCondition bc;
    for (size_t v = rr.map.size(); v < rr.domain.coords.size(); ++v)
        bc.push_back({static_cast<int>(v), PinKind::Point, rr.domain.coords[v]});
    // Tiny meshes may have boundary vertices in the inner face; their
    // reflections coincide with themselves and are pinned as the outer
    // triangle demands.
    for (int v : rr.domain.outer_vertices)
        if (v < mesh.vertex_count())
            bc.push_back({v, PinKind::Point, rr.domain.coords[v]});

    PlanarMap extended = lbs_solve(rr.domain.coords, rr.domain.faces, rr.mu, bc,
                                   state.options.solver);

    PlanarMap phi(extended.begin(), extended.begin() + mesh.vertex_count());

    state.pre_projection_deviation = 0.0;
    for (int v : mesh.boundary_loop())
        state.pre_projection_deviation += std::abs(1.0 - std::norm(phi[v]));
    for (int v : mesh.boundary_loop()) phi[v] = project_to_unit_circle(phi[v]);

    double mean_curr = mean_abs(beltrami_of_map(mesh, phi));
    state.iteration++;
    state.energy_trace.push_back(mean_curr);
    double decrease = state.prev_mean_mu - mean_curr;
    if (mean_curr > state.prev_mean_mu + 1e-12) state.nondecreasing_warning = true;
    if (decrease < state.options.epsilon) state.converged = true;
    state.prev_mean_mu = mean_curr;
    state.phi = phi;
    return {std::move(phi), std::move(state)};
}

PipelineResult run_pipeline(const TriangleMesh& mesh, const PipelineOptions& options) {
    StageTimings timings;
    double t_start = now_seconds();

    double t0 = now_seconds();
    PlanarMap f = harmonic_disk_map(mesh, options.solver);
    timings.harmonic_s = now_seconds() - t0;

    PipelineState state;
    state.options = options;
    state.energy_trace.push_back(mean_abs(beltrami_of_map(mesh, f)));

    t0 = now_seconds();
    PlanarMap g = north_pole_step(mesh, f, options.solver);
    timings.north_pole_s = now_seconds() - t0;

    for (int v : mesh.boundary_loop()) g[v] = project_to_unit_circle(g[v]);
    double mean_north = mean_abs(beltrami_of_map(mesh, g));
    state.energy_trace.push_back(mean_north);
    state.prev_mean_mu = mean_north;
    state.phi = g;

    t0 = now_seconds();
    PlanarMap phi = g;
    while (state.iteration < options.max_iter) {
        std::tie(phi, state) = south_pole_iteration(mesh, phi, std::move(state));
        if (state.converged) break;
    }
    timings.south_pole_s = now_seconds() - t0;

    t0 = now_seconds();
    QualityReport report = compute_report(mesh, phi, state.energy_trace, timings);
    report.iterations = state.iteration;
    report.converged = state.converged;
    report.nondecreasing_warning = state.nondecreasing_warning;
    report.pre_projection_deviation = state.pre_projection_deviation;
    timings.metrics_s = now_seconds() - t0;
    timings.total_s = now_seconds() - t_start;
    report.timings = timings;

    return {std::move(phi), std::move(report)};
}

}  // namespace diskconf
