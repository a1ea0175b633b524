#include <doctest.h>

#include <numbers>

#include <Eigen/Dense>

#include "diskconf/beltrami.hpp"
#include "diskconf/harmonic.hpp"
#include "fixtures.hpp"

using namespace diskconf;

namespace {

// Independent angle oracle: cotangent from the law of cosines on edge lengths.
double cot_from_lengths(double opp, double adj1, double adj2) {
    double cos_angle = (adj1 * adj1 + adj2 * adj2 - opp * opp) / (2.0 * adj1 * adj2);
    double angle = std::acos(cos_angle);
    return std::cos(angle) / std::sin(angle);
}

// Two triangles sharing edge (0,1) of length 1, with prescribed apex angles.
TriangleMesh wedge_pair(double angle_above, double angle_below) {
    double h1 = 0.5 / std::tan(angle_above / 2.0);
    double h2 = 0.5 / std::tan(angle_below / 2.0);
    return TriangleMesh::from_data(
        {{0, 0, 0}, {1, 0, 0}, {0.5, h1, 0}, {0.5, -h2, 0}},
        {{0, 1, 2}, {1, 0, 3}});
}

}  // namespace

TEST_CASE("cotangent weight of the interior edge of an equilateral pair") {
    TriangleMesh mesh = wedge_pair(std::numbers::pi / 3.0, std::numbers::pi / 3.0);
    CotangentWeights weights(mesh);
    // analytic oracle: cot 60 + cot 60 = 2/sqrt(3)
    double expected = 2.0 / std::sqrt(3.0);
    CHECK(weights.at(0, 1) == doctest::Approx(expected).epsilon(1e-12));
    CHECK(weights.at(0, 1) == doctest::Approx(1.154700538).epsilon(1e-9));
    // per-face length oracle agrees
    double oracle = cot_from_lengths(1.0, 1.0, 1.0) * 2.0;
    CHECK(weights.at(0, 1) == doctest::Approx(oracle).epsilon(1e-12));
}

TEST_CASE("boundary edge opposite a right angle has weight zero") {
    auto mesh = TriangleMesh::from_data({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}},
                                        {{0, 1, 2}});
    CotangentWeights weights(mesh);
    CHECK(weights.at(1, 2) == doctest::Approx(0.0).epsilon(1e-15));  // opposite 90 deg
    CHECK(weights.at(0, 1) == doctest::Approx(1.0).epsilon(1e-14));  // opposite 45 deg
}

TEST_CASE("negative cotangent term is retained, not clamped") {
    double a120 = 2.0 * std::numbers::pi / 3.0;
    double a30 = std::numbers::pi / 6.0;
    TriangleMesh mesh = wedge_pair(a120, a30);
    CotangentWeights weights(mesh);
    double expected = -1.0 / std::sqrt(3.0) + std::sqrt(3.0);
    CHECK(weights.at(0, 1) == doctest::Approx(expected).epsilon(1e-12));

    // strictly negative aggregate weight for a 120/100 pair
    double a100 = 100.0 * std::numbers::pi / 180.0;
    TriangleMesh obtuse = wedge_pair(a120, a100);
    CotangentWeights w2(obtuse);
    CHECK(w2.at(0, 1) < 0.0);
}

TEST_CASE("degenerate angles raise DegenerateFaceError") {
    std::vector<Eigen::Vector3d> vertices = {
        {0, 0, 0}, {1, 0, 0}, {0.5, 2.5e-16, 0}};
    CHECK_THROWS_AS(TriangleMesh::from_data(vertices, {{0, 1, 2}}),
                    DegenerateFaceError);
}

TEST_CASE("boundary angles") {
    SUBCASE("uniform four edges") {
        auto theta = boundary_angles({1.0, 1.0, 1.0, 1.0});
        CHECK(theta[0] == 0.0);
        CHECK(theta[1] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
        CHECK(theta[2] == doctest::Approx(std::numbers::pi).epsilon(1e-15));
        CHECK(theta[3] == doctest::Approx(3 * std::numbers::pi / 2).epsilon(1e-15));
    }
    SUBCASE("lengths (1,1,2)") {
        auto theta = boundary_angles({1.0, 1.0, 2.0});
        CHECK(theta[0] == 0.0);
        CHECK(theta[1] == doctest::Approx(std::numbers::pi / 2).epsilon(1e-15));
        CHECK(theta[2] == doctest::Approx(std::numbers::pi).epsilon(1e-15));
    }
    SUBCASE("scale invariance") {
        auto a = boundary_angles({0.3, 1.7, 2.2, 0.9});
        auto b = boundary_angles({0.6, 3.4, 4.4, 1.8});
        for (size_t i = 0; i < a.size(); ++i)
            CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-15));
    }
    SUBCASE("strictly increasing in [0, 2pi)") {
        auto theta = boundary_angles({2.0, 0.1, 0.4, 3.0, 1.1});
        for (size_t i = 1; i < theta.size(); ++i) CHECK(theta[i] > theta[i - 1]);
        CHECK(theta.back() < 2 * std::numbers::pi);
    }
}

TEST_CASE("symmetric hexagon fan maps its center to the origin") {
    auto mesh = fixtures::fan(6);
    PlanarMap f = harmonic_disk_map(mesh);
    CHECK(std::abs(f[0]) <= 1e-14);
}

TEST_CASE("boundary image lies exactly at (cos, sin) of the arc-length angles") {
    auto mesh = fixtures::hemisphere(4);
    CotangentWeights weights(mesh);
    auto angles = boundary_angles(mesh.boundary_edge_lengths());
    PlanarMap f = harmonic_disk_map(mesh, weights, angles);
    const auto& loop = mesh.boundary_loop();
    for (size_t i = 0; i < loop.size(); ++i) {
        CHECK(f[loop[i]].real() == std::cos(angles[i]));
        CHECK(f[loop[i]].imag() == std::sin(angles[i]));
    }
}

TEST_CASE("single triangle: boundary placement only") {
    auto mesh = TriangleMesh::from_data({{0, 0, 0}, {3, 0, 0}, {0, 4, 0}},
                                        {{0, 1, 2}});
    // loop [0,1,2], lengths (3,5,4), s=12
    PlanarMap f = harmonic_disk_map(mesh);
    CHECK(f[0] == std::complex<double>(std::cos(0.0), std::sin(0.0)));
    double t1 = 2 * std::numbers::pi * 3.0 / 12.0;
    CHECK(f[1].real() == doctest::Approx(std::cos(t1)).epsilon(1e-15));
    CHECK(f[1].imag() == doctest::Approx(std::sin(t1)).epsilon(1e-15));
    double t2 = 2 * std::numbers::pi * 8.0 / 12.0;
    CHECK(f[2].real() == doctest::Approx(std::cos(t2)).epsilon(1e-15));
    CHECK(f[2].imag() == doctest::Approx(std::sin(t2)).epsilon(1e-15));
}

TEST_CASE("flat disk mesh: dense oracle agreement and small distortion") {
    auto mesh = fixtures::disk_fan(5);
    CotangentWeights weights(mesh);
    auto angles = boundary_angles(mesh.boundary_edge_lengths());
    PlanarMap f = harmonic_disk_map(mesh, weights, angles);

    // Dense oracle: assemble the full cotangent system with an independent
    // length-based cot computation and solve with dense LDLT.
    const int nv = mesh.vertex_count();
    Eigen::MatrixXd laplacian = Eigen::MatrixXd::Zero(nv, nv);
    for (const Face& face : mesh.faces()) {
        const auto& V = mesh.vertices();
        for (int c = 0; c < 3; ++c) {
            int i = face[(c + 1) % 3];
            int j = face[(c + 2) % 3];
            double opp = (V[i] - V[j]).norm();
            double adj1 = (V[face[c]] - V[i]).norm();
            double adj2 = (V[face[c]] - V[j]).norm();
            double k = cot_from_lengths(opp, adj1, adj2);
            laplacian(i, j) -= k;
            laplacian(j, i) -= k;
            laplacian(i, i) += k;
            laplacian(j, j) += k;
        }
    }
    const auto& loop = mesh.boundary_loop();
    std::vector<char> pinned(nv, 0);
    for (int v : loop) pinned[v] = 1;
    std::vector<int> free_list;
    for (int v = 0; v < nv; ++v)
        if (!pinned[v]) free_list.push_back(v);
    const int m = static_cast<int>(free_list.size());
    Eigen::MatrixXd reduced(m, m);
    Eigen::VectorXd bx = Eigen::VectorXd::Zero(m), by = Eigen::VectorXd::Zero(m);
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b) reduced(a, b) = laplacian(free_list[a], free_list[b]);
    for (int a = 0; a < m; ++a)
        for (size_t i = 0; i < loop.size(); ++i) {
            bx[a] -= laplacian(free_list[a], loop[i]) * std::cos(angles[i]);
            by[a] -= laplacian(free_list[a], loop[i]) * std::sin(angles[i]);
        }
    Eigen::VectorXd x = reduced.ldlt().solve(bx);
    Eigen::VectorXd y = reduced.ldlt().solve(by);
    for (int a = 0; a < m; ++a) {
        CHECK(f[free_list[a]].real() == doctest::Approx(x[a]).epsilon(1e-10));
        CHECK(f[free_list[a]].imag() == doctest::Approx(y[a]).epsilon(1e-10));
    }

    BeltramiField mu = face_beltrami_planar(mesh, f);
    CHECK(mean_abs(mu) < 0.1);
}

TEST_CASE("discrete harmonicity residual at interior vertices") {
    auto mesh = fixtures::bumpy_hemisphere(8);
    CotangentWeights weights(mesh);
    auto angles = boundary_angles(mesh.boundary_edge_lengths());
    PlanarMap f = harmonic_disk_map(mesh, weights, angles);

    double max_residual = 0.0;
    const auto& F = mesh.faces();
    std::vector<std::complex<double>> residual(mesh.vertex_count(), 0.0);
    for (size_t t = 0; t < F.size(); ++t) {
        for (int c = 0; c < 3; ++c) {
            int i = F[t][(c + 1) % 3];
            int j = F[t][(c + 2) % 3];
            double k = weights.corner_cot(static_cast<int>(t), c);
            residual[i] += k * (f[i] - f[j]);
            residual[j] += k * (f[j] - f[i]);
        }
    }
    for (int u = 0; u < mesh.vertex_count(); ++u)
        if (!mesh.is_boundary_vertex(u))
            max_residual = std::max(max_residual, std::abs(residual[u]));
    CHECK(max_residual <= 1e-8 * mesh.bbox_diagonal());
}

TEST_CASE("assembled matrix equals the per-face FEM gradient oracle") {
    auto mesh = fixtures::hemisphere(4);
    CotangentWeights weights(mesh);
    const int nv = mesh.vertex_count();

    Eigen::SparseMatrix<double> from_weights(nv, nv);
    {
        auto triplets = weights.laplacian_triplets(mesh);
        from_weights.setFromTriplets(triplets.begin(), triplets.end());
    }

    // FEM oracle: per face, flatten isometrically and accumulate
    // 2 * A * grad(phi_p) . grad(phi_q).
    Eigen::MatrixXd fem = Eigen::MatrixXd::Zero(nv, nv);
    for (const Face& face : mesh.faces()) {
        const auto& V = mesh.vertices();
        auto z = flatten_face(V[face[0]], V[face[1]], V[face[2]]);
        double two_area = z[1].real() * z[2].imag();
        double gx[3], gy[3];
        for (int p = 0; p < 3; ++p) {
            auto zq = z[(p + 1) % 3];
            auto zr = z[(p + 2) % 3];
            gx[p] = (zq.imag() - zr.imag()) / two_area;
            gy[p] = (zr.real() - zq.real()) / two_area;
        }
        for (int p = 0; p < 3; ++p)
            for (int q = 0; q < 3; ++q)
                fem(face[p], face[q]) += two_area * (gx[p] * gx[q] + gy[p] * gy[q]);
    }

    Eigen::MatrixXd dense = Eigen::MatrixXd(from_weights);
    CHECK((dense - fem).cwiseAbs().maxCoeff() <= 1e-12);
}
