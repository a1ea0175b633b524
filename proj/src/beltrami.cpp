#include "diskconf/beltrami.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace diskconf {

namespace {

using cd = std::complex<double>;

// Numerator 2*fzbar and denominator 2*fz of the PL map z -> w, scaled by
// 2*Area(source); the quotient is mu. With z_j = a_j + i b_j:
//   P = sum_j w_j * (b_{j+1} - b_{j+2}) = 2A * df/dx
//   Q = sum_j w_j * (a_{j+2} - a_{j+1}) = 2A * df/dy
// so 2A*2*fz = P - iQ and 2A*2*fzbar = P + iQ.
struct FaceQuotient {
    cd num;  // P + iQ
    cd den;  // P - iQ
    double two_area;
};

FaceQuotient face_quotient(const std::array<cd, 3>& z, const std::array<cd, 3>& w) {
    double a1 = z[0].real(), b1 = z[0].imag();
    double a2 = z[1].real(), b2 = z[1].imag();
    double a3 = z[2].real(), b3 = z[2].imag();
    cd P = w[0] * (b2 - b3) + w[1] * (b3 - b1) + w[2] * (b1 - b2);
    cd Q = w[0] * (a3 - a2) + w[1] * (a1 - a3) + w[2] * (a2 - a1);
    double two_area = (a2 - a1) * (b3 - b1) - (a3 - a1) * (b2 - b1);
    return {P + cd(0, 1) * Q, P - cd(0, 1) * Q, two_area};
}

cd face_mu_raw(const std::array<cd, 3>& z, const std::array<cd, 3>& w) {
    FaceQuotient q = face_quotient(z, w);
    double scale = std::abs(q.num) + std::abs(q.den);
    if (scale == 0.0 || std::abs(q.den) < 1e-14 * scale)
        return {std::numeric_limits<double>::infinity(), 0.0};
    return q.num / q.den;
}

std::array<cd, 3> face_source(std::span<const cd> coords, const Face& f) {
    return {coords[f[0]], coords[f[1]], coords[f[2]]};
}

std::array<cd, 3> face_image(const PlanarMap& map, const Face& f) {
    return {map[f[0]], map[f[1]], map[f[2]]};
}

}  // namespace

std::array<cd, 3> flatten_face(const Eigen::Vector3d& p0, const Eigen::Vector3d& p1,
                               const Eigen::Vector3d& p2) {
    Eigen::Vector3d e1 = p1 - p0;
    Eigen::Vector3d e2 = p2 - p0;
    double len1 = e1.norm();
    Eigen::Vector3d xhat = e1 / len1;
    double x2 = e2.dot(xhat);
    double y2 = (e2 - x2 * xhat).norm();
    return {cd(0.0, 0.0), cd(len1, 0.0), cd(x2, y2)};
}

FaceJets face_jets(std::span<const cd> source, std::span<const Face> faces,
                   const PlanarMap& image) {
    FaceJets jets;
    jets.fz.resize(faces.size());
    jets.fzbar.resize(faces.size());
    for (size_t t = 0; t < faces.size(); ++t) {
        FaceQuotient q = face_quotient(face_source(source, faces[t]),
                                       face_image(image, faces[t]));
        jets.fz[t] = q.den / (2.0 * q.two_area);
        jets.fzbar[t] = q.num / (2.0 * q.two_area);
    }
    return jets;
}

BeltramiField face_beltrami_planar(std::span<const cd> source,
                                   std::span<const Face> faces,
                                   const PlanarMap& image) {
    BeltramiField mu(faces.size());
    for (size_t t = 0; t < faces.size(); ++t) {
        mu[t] = face_mu_raw(face_source(source, faces[t]), face_image(image, faces[t]));
        if (!std::isfinite(mu[t].real()))
            throw DivisionByZeroError(
                "degenerate image face " + std::to_string(t) + " (f_z vanishes)",
                static_cast<int>(t));
    }
    return mu;
}

BeltramiField face_beltrami_planar(const TriangleMesh& source, const PlanarMap& image) {
    PlanarMap coords(source.vertex_count());
    for (int v = 0; v < source.vertex_count(); ++v)
        coords[v] = {source.vertices()[v].x(), source.vertices()[v].y()};
    return face_beltrami_planar(coords, source.faces(), image);
}

namespace {

BeltramiField lifted_field(const PlanarMap& source, const TriangleMesh& target,
                           bool strict) {
    const auto& F = target.faces();
    const auto& V = target.vertices();
    BeltramiField mu(F.size());
    for (size_t t = 0; t < F.size(); ++t) {
        std::array<cd, 3> z = face_source(source, F[t]);
        std::array<cd, 3> w = flatten_face(V[F[t][0]], V[F[t][1]], V[F[t][2]]);
        mu[t] = face_mu_raw(z, w);
        if (strict && !std::isfinite(mu[t].real()))
            throw DivisionByZeroError(
                "degenerate face " + std::to_string(t) + " in lifted quotient",
                static_cast<int>(t));
    }
    return mu;
}

}  // namespace

BeltramiField face_beltrami_lifted(const PlanarMap& source, const TriangleMesh& target) {
    return lifted_field(source, target, true);
}

BeltramiField face_beltrami_lifted_raw(const PlanarMap& source,
                                       const TriangleMesh& target) {
    return lifted_field(source, target, false);
}

BeltramiField inverse_beltrami(const PlanarMap& forward, const TriangleMesh& source) {
    BeltramiField mu = lifted_field(forward, source, false);
    for (size_t t = 0; t < mu.size(); ++t) {
        double m = std::abs(mu[t]);
        if (!(m < 1.0))
            throw FoldedFaceError("face " + std::to_string(t) +
                                      " has |mu| >= 1; forward map folds there",
                                  static_cast<int>(t));
    }
    return mu;
}

BeltramiField compose_beltrami(const BeltramiField& mu_f, const FaceJets& jets_f,
                               const BeltramiField& mu_g_pulled) {
    BeltramiField out(mu_f.size());
    for (size_t t = 0; t < mu_f.size(); ++t) {
        cd theta = std::conj(jets_f.fz[t]) / jets_f.fz[t];
        cd num = mu_f[t] + theta * mu_g_pulled[t];
        cd den = 1.0 + theta * std::conj(mu_f[t]) * mu_g_pulled[t];
        if (std::abs(den) < 1e-14 * (1.0 + std::abs(num)))
            throw DivisionByZeroError(
                "composition denominator vanishes on face " + std::to_string(t),
                static_cast<int>(t));
        out[t] = num / den;
    }
    return out;
}

double maximal_dilation(const BeltramiField& mu) {
    double m = 0.0;
    for (const cd& v : mu) m = std::max(m, std::abs(v));
    if (!(m < 1.0))
        throw UnboundedDilationError("max |mu| = " + std::to_string(m) + " >= 1");
    return (1.0 + m) / (1.0 - m);
}

BeltramiField beltrami_of_map(const TriangleMesh& mesh, const PlanarMap& map) {
    const auto& F = mesh.faces();
    const auto& V = mesh.vertices();
    BeltramiField mu(F.size());
    const bool planar = mesh.is_planar();
    for (size_t t = 0; t < F.size(); ++t) {
        std::array<cd, 3> z;
        if (planar) {
            z = {cd(V[F[t][0]].x(), V[F[t][0]].y()), cd(V[F[t][1]].x(), V[F[t][1]].y()),
                 cd(V[F[t][2]].x(), V[F[t][2]].y())};
        } else {
            z = flatten_face(V[F[t][0]], V[F[t][1]], V[F[t][2]]);
        }
        mu[t] = face_mu_raw(z, face_image(map, F[t]));
    }
    return mu;
}

double mean_abs(const BeltramiField& mu) {
    if (mu.empty()) return 0.0;
    double sum = 0.0;
    for (const cd& v : mu) sum += std::abs(v);
    return sum / static_cast<double>(mu.size());
}

void write_beltrami_csv(std::ostream& out, const BeltramiField& field) {
    out << "face,re,im\n";
    char buf[96];
    for (size_t t = 0; t < field.size(); ++t) {
        std::snprintf(buf, sizeof(buf), "%zu,%.17g,%.17g\n", t, field[t].real(),
                      field[t].imag());
        out << buf;
    }
}

}  // namespace diskconf
