#pragma once

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "diskconf/beltrami.hpp"
#include "diskconf/mesh.hpp"

namespace fixtures {

using diskconf::Face;
using diskconf::PlanarMap;
using diskconf::TriangleMesh;

inline TriangleMesh single_triangle() {
    return TriangleMesh::from_data(
        {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}}, {{0, 1, 2}});
}

inline TriangleMesh unit_square() {
    return TriangleMesh::from_data(
        {{0.0, 0.0, 0.0}, {1.0, 0.0, 0.0}, {1.0, 1.0, 0.0}, {0.0, 1.0, 0.0}},
        {{0, 1, 2}, {0, 2, 3}});
}

/// Center vertex 0 with a regular n-gon ring 1..n of unit circumradius.
inline TriangleMesh fan(int n = 6) {
    std::vector<Eigen::Vector3d> vertices;
    vertices.emplace_back(0.0, 0.0, 0.0);
    for (int i = 0; i < n; ++i) {
        double a = 2.0 * std::numbers::pi * i / n;
        vertices.emplace_back(std::cos(a), std::sin(a), 0.0);
    }
    std::vector<Face> faces;
    for (int i = 0; i < n; ++i)
        faces.push_back({0, 1 + i, 1 + (i + 1) % n});
    return TriangleMesh::from_data(std::move(vertices), std::move(faces));
}

/// Structured planar disk triangulation: rings of radius k/K with 6k vertices
/// on ring k. F = 6K^2 faces.
inline void disk_fan_data(int rings, std::vector<Eigen::Vector3d>& vertices,
                          std::vector<Face>& faces) {
    vertices.clear();
    faces.clear();
    vertices.emplace_back(0.0, 0.0, 0.0);
    std::vector<int> ring_start{0};
    for (int k = 1; k <= rings; ++k) {
        ring_start.push_back(static_cast<int>(vertices.size()));
        int m = 6 * k;
        double r = static_cast<double>(k) / rings;
        for (int i = 0; i < m; ++i) {
            double a = 2.0 * std::numbers::pi * i / m;
            vertices.emplace_back(r * std::cos(a), r * std::sin(a), 0.0);
        }
    }
    for (int k = 1; k <= rings; ++k) {
        int outer = ring_start[k];
        int n_outer = 6 * k;
        if (k == 1) {
            for (int i = 0; i < 6; ++i)
                faces.push_back({0, outer + i, outer + (i + 1) % 6});
            continue;
        }
        int inner = ring_start[k - 1];
        int n_inner = 6 * (k - 1);
        // March around both rings, keeping the triangulation aligned sector by
        // sector: each of the 6 sectors pairs k outer edges with k-1 inner ones.
        for (int s = 0; s < 6; ++s) {
            int oi = s * k;
            int ii = s * (k - 1);
            for (int j = 0; j < k; ++j) {
                faces.push_back({inner + (ii % n_inner), outer + (oi % n_outer),
                                 outer + ((oi + 1) % n_outer)});
                oi++;
                if (j < k - 1) {
                    faces.push_back({inner + (ii % n_inner), outer + (oi % n_outer),
                                     inner + ((ii + 1) % n_inner)});
                    ii++;
                }
            }
        }
    }
}

inline TriangleMesh disk_fan(int rings) {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Face> faces;
    disk_fan_data(rings, vertices, faces);
    return TriangleMesh::from_data(std::move(vertices), std::move(faces));
}

/// Unit hemisphere with the boundary on the equator; the disk fan lifted by
/// polar angle proportional to radius.
inline TriangleMesh hemisphere(int rings) {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Face> faces;
    disk_fan_data(rings, vertices, faces);
    for (auto& p : vertices) {
        double r = std::hypot(p.x(), p.y());
        double phi = r * std::numbers::pi / 2.0;
        double theta = std::atan2(p.y(), p.x());
        p = {std::sin(phi) * std::cos(theta), std::sin(phi) * std::sin(theta),
             std::cos(phi)};
    }
    return TriangleMesh::from_data(std::move(vertices), std::move(faces));
}

/// Hemisphere with asymmetric radial bumps; still simply connected and
/// fold-free.
inline TriangleMesh bumpy_hemisphere(int rings, double amplitude = 0.25) {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Face> faces;
    disk_fan_data(rings, vertices, faces);
    for (auto& p : vertices) {
        double r = std::hypot(p.x(), p.y());
        double phi = r * std::numbers::pi / 2.0;
        double theta = std::atan2(p.y(), p.x());
        double radius = 1.0 + amplitude * std::sin(3.0 * phi) * std::cos(4.0 * theta) +
                        0.6 * amplitude * std::sin(2.0 * phi) * std::sin(theta + 0.7);
        p = {radius * std::sin(phi) * std::cos(theta),
             radius * std::sin(phi) * std::sin(theta), radius * std::cos(phi)};
    }
    return TriangleMesh::from_data(std::move(vertices), std::move(faces));
}

/// Hemisphere of an axis-aligned ellipsoid. The elliptic boundary makes the
/// arc-length initialization genuinely distorted, unlike the round hemisphere
/// whose initialization already sits at the sampling floor.
inline TriangleMesh stretched_hemisphere(int rings, double ax = 1.5, double by = 1.0,
                                         double cz = 1.0) {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Face> faces;
    disk_fan_data(rings, vertices, faces);
    for (auto& p : vertices) {
        double r = std::hypot(p.x(), p.y());
        double phi = r * std::numbers::pi / 2.0;
        double theta = std::atan2(p.y(), p.x());
        p = {ax * std::sin(phi) * std::cos(theta), by * std::sin(phi) * std::sin(theta),
             cz * std::cos(phi)};
    }
    return TriangleMesh::from_data(std::move(vertices), std::move(faces));
}

/// Anisotropically stretched saddle patch over the unit disk.
inline TriangleMesh saddle(int rings, double stretch = 1.8, double height = 0.8) {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Face> faces;
    disk_fan_data(rings, vertices, faces);
    for (auto& p : vertices) {
        double x = stretch * p.x();
        double y = p.y();
        p = {x, y, height * (x * x - y * y)};
    }
    return TriangleMesh::from_data(std::move(vertices), std::move(faces));
}

/// Planar disk mesh Mobius-shifted so the origin sits strictly inside a face
/// rather than on the center vertex.
inline TriangleMesh offset_disk(int rings) {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Face> faces;
    disk_fan_data(rings, vertices, faces);
    // Shift a point of the first face onto the origin; 1.25x the centroid
    // keeps the origin clear of the neighbor circumcircles, which otherwise
    // pass exactly through the centroid in this symmetric fan.
    std::complex<double> c(0, 0);
    for (int v : faces[0]) c += std::complex<double>(vertices[v].x(), vertices[v].y());
    c = c / 3.0 * 1.25;
    for (auto& p : vertices) {
        std::complex<double> z(p.x(), p.y());
        z = (z - c) / (1.0 - std::conj(c) * z);
        p = {z.real(), z.imag(), 0.0};
    }
    return TriangleMesh::from_data(std::move(vertices), std::move(faces));
}

inline PlanarMap planar_coords(const TriangleMesh& mesh) {
    PlanarMap map(mesh.vertex_count());
    for (int v = 0; v < mesh.vertex_count(); ++v)
        map[v] = {mesh.vertices()[v].x(), mesh.vertices()[v].y()};
    return map;
}

/// Random PL perturbation of a planar mesh with every per-face |mu| below
/// `mu_bound`. Displacements shrink until the bound holds.
inline PlanarMap random_pl_map(const TriangleMesh& mesh, std::mt19937& rng,
                               double mu_bound = 0.6, bool move_boundary = true) {
    PlanarMap base = planar_coords(mesh);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);

    double min_edge = std::numeric_limits<double>::infinity();
    for (const Face& f : mesh.faces())
        for (int e = 0; e < 3; ++e)
            min_edge = std::min(min_edge,
                                std::abs(base[f[e]] - base[f[(e + 1) % 3]]));

    std::vector<std::complex<double>> dir(base.size());
    for (auto& d : dir) d = {unit(rng), unit(rng)};

    double scale = 0.35 * min_edge;
    for (int attempt = 0; attempt < 60; ++attempt) {
        PlanarMap map = base;
        for (size_t v = 0; v < map.size(); ++v) {
            if (!move_boundary && mesh.is_boundary_vertex(static_cast<int>(v)))
                continue;
            map[v] += scale * dir[v];
        }
        diskconf::BeltramiField mu = diskconf::beltrami_of_map(mesh, map);
        double maxm = 0.0;
        for (const auto& m : mu) maxm = std::max(maxm, std::abs(m));
        if (maxm < mu_bound) return map;
        scale *= 0.7;
    }
    return base;  // unreachable for sane meshes
}

}  // namespace fixtures
