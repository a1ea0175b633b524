#include "diskconf/lbs.hpp"

#include <algorithm>
#include <cmath>

namespace diskconf {

namespace {

using cd = std::complex<double>;

constexpr double kClampBound = 1.0 - 1e-3;

std::array<double, 3> coefficients_for(cd mu) {
    if (!std::isfinite(mu.real()) || !std::isfinite(mu.imag()))
        mu = cd(kClampBound, 0.0);
    double m = std::abs(mu);
    if (m > kClampBound) mu *= kClampBound / m;
    double rho = mu.real();
    double eta = mu.imag();
    double d = 1.0 - rho * rho - eta * eta;
    if (d <= 0.0)
        throw SingularCoefficientError("1 - |mu|^2 <= 0 after clamping");
    return {((rho - 1.0) * (rho - 1.0) + eta * eta) / d, -2.0 * eta / d,
            (1.0 + 2.0 * rho + rho * rho + eta * eta) / d};
}

struct FaceChart {
    std::array<cd, 3> z;
    double signed_two_area;
};

FaceChart chart_of(std::span<const cd> coords, const Face& f) {
    FaceChart c;
    c.z = {coords[f[0]], coords[f[1]], coords[f[2]]};
    c.signed_two_area = (c.z[1].real() - c.z[0].real()) * (c.z[2].imag() - c.z[0].imag()) -
                        (c.z[2].real() - c.z[0].real()) * (c.z[1].imag() - c.z[0].imag());
    return c;
}

template <typename ChartFn>
std::vector<Eigen::Triplet<double>> assemble_fem_impl(size_t n_faces,
                                                      std::span<const Face> faces,
                                                      const LbsCoefficients& coeffs,
                                                      ChartFn&& chart_of_face) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n_faces * 9);
    for (size_t t = 0; t < n_faces; ++t) {
        FaceChart c = chart_of_face(t);
        // Gradients use the signed area (correct for either orientation); the
        // quadratic weight uses its magnitude so every face contributes a
        // positive semidefinite block even on folded domains. On positively
        // oriented faces this is the exact piecewise-linear weak form.
        double two_area = c.signed_two_area;
        if (two_area == 0.0)
            throw DegenerateFaceError("zero-area domain face " + std::to_string(t),
                                      static_cast<int>(t));
        const auto& [a1, a2, a3] = coeffs.alpha[t];
        // grad(phi_p) = rot90(z_r - z_q) / (2A) for (p,q,r) cyclic.
        double gx[3], gy[3];
        for (int p = 0; p < 3; ++p) {
            const cd& zq = c.z[(p + 1) % 3];
            const cd& zr = c.z[(p + 2) % 3];
            gx[p] = (zq.imag() - zr.imag()) / two_area;
            gy[p] = (zr.real() - zq.real()) / two_area;
        }
        const Face& f = faces[t];
        for (int p = 0; p < 3; ++p) {
            double mx = a1 * gx[p] + a2 * gy[p];
            double my = a2 * gx[p] + a3 * gy[p];
            for (int q = 0; q < 3; ++q) {
                double val = std::abs(two_area) * (mx * gx[q] + my * gy[q]);
                triplets.emplace_back(f[p], f[q], val);
            }
        }
    }
    return triplets;
}

}  // namespace

LbsCoefficients lbs_coefficients(const BeltramiField& mu) {
    LbsCoefficients coeffs;
    coeffs.alpha.resize(mu.size());
    for (size_t t = 0; t < mu.size(); ++t) coeffs.alpha[t] = coefficients_for(mu[t]);
    return coeffs;
}

std::vector<Eigen::Triplet<double>> assemble_lbs_fem(std::span<const cd> coords,
                                                     std::span<const Face> faces,
                                                     const LbsCoefficients& coeffs) {
    return assemble_fem_impl(faces.size(), faces, coeffs,
                             [&](size_t t) { return chart_of(coords, faces[t]); });
}

std::vector<Eigen::Triplet<double>> assemble_lbs_cyclic(std::span<const cd> coords,
                                                        std::span<const Face> faces,
                                                        const LbsCoefficients& coeffs) {
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(faces.size() * 9);
    for (size_t t = 0; t < faces.size(); ++t) {
        FaceChart c = chart_of(coords, faces[t]);
        if (c.signed_two_area == 0.0)
            throw DegenerateFaceError("zero-area domain face " + std::to_string(t),
                                      static_cast<int>(t));
        const auto& [a1, a2, a3] = coeffs.alpha[t];
        const Face& f = faces[t];
        // Row of vertex p: (1/2A) { (h_j - h_k)(a1*aT + a2*bT) + (g_k - g_j)(a2*aT + a3*bT) }
        // with aT = sum_q u_q (h_{q+1} - h_{q+2}), bT = sum_q u_q (g_{q+2} - g_{q+1}).
        for (int p = 0; p < 3; ++p) {
            double hjk = c.z[(p + 1) % 3].imag() - c.z[(p + 2) % 3].imag();
            double gkj = c.z[(p + 2) % 3].real() - c.z[(p + 1) % 3].real();
            for (int q = 0; q < 3; ++q) {
                double hd = c.z[(q + 1) % 3].imag() - c.z[(q + 2) % 3].imag();
                double gd = c.z[(q + 2) % 3].real() - c.z[(q + 1) % 3].real();
                double val = (hjk * (a1 * hd + a2 * gd) + gkj * (a2 * hd + a3 * gd)) /
                             std::abs(c.signed_two_area);
                triplets.emplace_back(f[p], f[q], val);
            }
        }
    }
    return triplets;
}

namespace {

PlanarMap lbs_solve_from_triplets(int n_vertices,
                                  const std::vector<Eigen::Triplet<double>>& triplets,
                                  const BoundaryCondition& bc,
                                  const SolveOptions& options) {
    // Point pins supersede Imaginary pins at the same vertex.
    std::vector<char> point_pinned(n_vertices, 0);
    for (const VertexConstraint& vc : bc)
        if (vc.kind == PinKind::Point) point_pinned[vc.vertex] = 1;

    std::vector<std::pair<int, double>> cons_u, cons_v;
    for (const VertexConstraint& vc : bc) {
        if (vc.kind == PinKind::Point) {
            cons_u.emplace_back(vc.vertex, vc.value.real());
            cons_v.emplace_back(vc.vertex, vc.value.imag());
        } else if (!point_pinned[vc.vertex]) {
            cons_v.emplace_back(vc.vertex, vc.value.imag());
        }
    }
    auto dedupe = [](std::vector<std::pair<int, double>>& cons) {
        std::sort(cons.begin(), cons.end());
        cons.erase(std::unique(cons.begin(), cons.end(),
                               [](const auto& a, const auto& b) {
                                   return a.first == b.first;
                               }),
                   cons.end());
    };
    dedupe(cons_u);
    dedupe(cons_v);

    if (cons_u.empty() || cons_v.empty() || cons_u.size() + cons_v.size() < 3)
        throw KernelNotRemovedError(
            "boundary conditions leave the system singular (need >= 3 scalar "
            "constraints with each coordinate pinned somewhere)");

    auto indices_of = [](const std::vector<std::pair<int, double>>& cons) {
        std::vector<int> idx;
        idx.reserve(cons.size());
        for (const auto& [i, v] : cons) idx.push_back(i);
        return idx;
    };
    auto values_of = [](const std::vector<std::pair<int, double>>& cons) {
        std::vector<double> vals;
        vals.reserve(cons.size());
        for (const auto& [i, v] : cons) vals.push_back(v);
        return vals;
    };

    Eigen::VectorXd zero = Eigen::VectorXd::Zero(n_vertices);
    Eigen::VectorXd x, y;
    if (indices_of(cons_u) == indices_of(cons_v)) {
        ConstrainedSpdSolver solver(n_vertices, triplets, indices_of(cons_u), options);
        x = solver.solve(zero, values_of(cons_u));
        y = solver.solve(zero, values_of(cons_v));
    } else {
        ConstrainedSpdSolver solver_u(n_vertices, triplets, indices_of(cons_u), options);
        ConstrainedSpdSolver solver_v(n_vertices, triplets, indices_of(cons_v), options);
        x = solver_u.solve(zero, values_of(cons_u));
        y = solver_v.solve(zero, values_of(cons_v));
    }

    PlanarMap map(n_vertices);
    for (int i = 0; i < n_vertices; ++i) map[i] = {x[i], y[i]};
    return map;
}

}  // namespace

PlanarMap lbs_solve(std::span<const cd> domain, std::span<const Face> faces,
                    const BeltramiField& mu, const BoundaryCondition& bc,
                    const SolveOptions& options) {
    LbsCoefficients coeffs = lbs_coefficients(mu);
    auto triplets = assemble_lbs_fem(domain, faces, coeffs);
    return lbs_solve_from_triplets(static_cast<int>(domain.size()), triplets, bc,
                                   options);
}

PlanarMap lbs_solve(const TriangleMesh& domain, const BeltramiField& mu,
                    const BoundaryCondition& bc, const SolveOptions& options) {
    LbsCoefficients coeffs = lbs_coefficients(mu);
    const auto& V = domain.vertices();
    const auto& F = domain.faces();
    std::vector<Eigen::Triplet<double>> triplets;
    if (domain.is_planar()) {
        std::vector<cd> coords(V.size());
        for (size_t i = 0; i < V.size(); ++i) coords[i] = {V[i].x(), V[i].y()};
        triplets = assemble_lbs_fem(coords, F, coeffs);
    } else {
        triplets = assemble_fem_impl(F.size(), F, coeffs, [&](size_t t) {
            FaceChart c;
            c.z = flatten_face(V[F[t][0]], V[F[t][1]], V[F[t][2]]);
            c.signed_two_area =
                (c.z[1].real() - c.z[0].real()) * c.z[2].imag();  // z0 = 0, z1 on +x
            return c;
        });
    }
    return lbs_solve_from_triplets(domain.vertex_count(), triplets, bc, options);
}

}  // namespace diskconf
