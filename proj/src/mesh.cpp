#include "diskconf/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <unordered_map>

namespace diskconf {

namespace {

uint64_t edge_key(int a, int b) {
    if (a > b) std::swap(a, b);
    return (static_cast<uint64_t>(static_cast<uint32_t>(a)) << 32) |
           static_cast<uint32_t>(b);
}

struct EdgeInfo {
    int count = 0;          // incident faces
    int forward = 0;        // occurrences as (min, max)
    int backward = 0;       // occurrences as (max, min)
};

std::unordered_map<uint64_t, EdgeInfo> build_edges(std::span<const Face> faces) {
    std::unordered_map<uint64_t, EdgeInfo> edges;
    edges.reserve(faces.size() * 2);
    for (const Face& f : faces) {
        for (int e = 0; e < 3; ++e) {
            int a = f[e];
            int b = f[(e + 1) % 3];
            EdgeInfo& info = edges[edge_key(a, b)];
            info.count++;
            if (a < b)
                info.forward++;
            else
                info.backward++;
        }
    }
    return edges;
}

// Walks boundary half-edges (face-oriented edges without a twin) into loops.
// Returns the loop count; fills `loop` with the loop through the smallest
// boundary vertex when exactly one loop exists.
int walk_boundary_loops(int vertex_count, std::span<const Face> faces,
                        const std::unordered_map<uint64_t, EdgeInfo>& edges,
                        std::vector<int>* loop) {
    std::vector<int> next(vertex_count, -1);
    std::vector<char> is_boundary_vertex(vertex_count, 0);
    bool next_conflict = false;
    for (const Face& f : faces) {
        for (int e = 0; e < 3; ++e) {
            int a = f[e];
            int b = f[(e + 1) % 3];
            if (edges.at(edge_key(a, b)).count == 1) {
                if (next[a] != -1) next_conflict = true;
                next[a] = b;
                is_boundary_vertex[a] = 1;
                is_boundary_vertex[b] = 1;
            }
        }
    }
    if (next_conflict) return -1;  // pinched vertex; caller reports non-manifold

    std::vector<char> visited(vertex_count, 0);
    int loops = 0;
    int start_of_first = -1;
    for (int v = 0; v < vertex_count; ++v) {
        if (!is_boundary_vertex[v] || visited[v]) continue;
        loops++;
        if (start_of_first < 0) start_of_first = v;
        int cur = v;
        int steps = 0;
        while (cur != -1 && !visited[cur] && steps <= vertex_count) {
            visited[cur] = 1;
            cur = next[cur];
            steps++;
        }
    }
    if (loops == 1 && loop) {
        loop->clear();
        int cur = start_of_first;
        do {
            loop->push_back(cur);
            cur = next[cur];
        } while (cur != start_of_first && cur != -1 &&
                 static_cast<int>(loop->size()) <= vertex_count);
    }
    return loops;
}

int connected_components(int vertex_count, std::span<const Face> faces) {
    std::vector<int> parent(vertex_count);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (const Face& f : faces) {
        int a = find(f[0]);
        int b = find(f[1]);
        int c = find(f[2]);
        parent[b] = a;
        parent[find(c)] = find(a);
    }
    int components = 0;
    std::vector<char> used(vertex_count, 0);
    for (const Face& f : faces)
        for (int v : f) used[v] = 1;
    for (int v = 0; v < vertex_count; ++v)
        if (used[v] && find(v) == v) components++;
    return components;
}

double triangle_area(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                     const Eigen::Vector3d& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

}  // namespace

TopologyReport validate_topology(std::span<const Eigen::Vector3d> vertices,
                                 std::span<const Face> faces) {
    TopologyReport report;
    auto edges = build_edges(faces);
    report.euler = static_cast<int>(vertices.size()) -
                   static_cast<int>(edges.size()) +
                   static_cast<int>(faces.size());
    for (const auto& [key, info] : edges) {
        // An undirected edge traversed twice in the same direction means the
        // two incident faces disagree on orientation.
        if (info.forward > 1 || info.backward > 1) report.orientable = false;
    }
    int loops = walk_boundary_loops(static_cast<int>(vertices.size()), faces,
                                    edges, nullptr);
    report.boundary_loops = std::max(loops, 0);
    if (loops < 0) report.orientable = false;  // pinched boundary vertex
    return report;
}

TriangleMesh TriangleMesh::from_data(std::vector<Eigen::Vector3d> vertices,
                                     std::vector<Face> faces,
                                     const MeshOptions& options) {
    if (options.merge_duplicates) {
        double diag = 0.0;
        if (!vertices.empty()) {
            Eigen::Vector3d lo = vertices[0], hi = vertices[0];
            for (const auto& v : vertices) {
                lo = lo.cwiseMin(v);
                hi = hi.cwiseMax(v);
            }
            diag = (hi - lo).norm();
        }
        merge_duplicate_vertices(vertices, faces, options.merge_tolerance * diag);
    }

    const int nv = static_cast<int>(vertices.size());
    const int nf = static_cast<int>(faces.size());
    if (nv < 3 || nf < 1)
        throw TopologyError("mesh needs at least 3 vertices and 1 face");

    for (int t = 0; t < nf; ++t) {
        const Face& f = faces[t];
        for (int v : f)
            if (v < 0 || v >= nv)
                throw TopologyError("face " + std::to_string(t) +
                                    " references out-of-range vertex " +
                                    std::to_string(v));
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw DegenerateFaceError(
                "face " + std::to_string(t) + " repeats a vertex", t);
        double area = triangle_area(vertices[f[0]], vertices[f[1]], vertices[f[2]]);
        double longest = std::max({(vertices[f[1]] - vertices[f[0]]).norm(),
                                   (vertices[f[2]] - vertices[f[1]]).norm(),
                                   (vertices[f[0]] - vertices[f[2]]).norm()});
        if (!(area > 1e-14 * longest * longest))
            throw DegenerateFaceError(
                "face " + std::to_string(t) + " has zero area", t);
    }

    auto edges = build_edges(faces);
    for (const auto& [key, info] : edges) {
        int a = static_cast<int>(key >> 32);
        int b = static_cast<int>(key & 0xffffffffu);
        if (info.count > 2)
            throw TopologyError("non-manifold edge (" + std::to_string(a) + "," +
                                std::to_string(b) + ") with " +
                                std::to_string(info.count) + " incident faces");
        if (info.forward > 1 || info.backward > 1)
            throw TopologyError("inconsistent orientation across edge (" +
                                std::to_string(a) + "," + std::to_string(b) + ")");
    }

    const int ne = static_cast<int>(edges.size());
    const int euler = nv - ne + nf;

    std::vector<char> used(nv, 0);
    for (const Face& f : faces)
        for (int v : f) used[v] = 1;
    for (int v = 0; v < nv; ++v)
        if (!used[v])
            throw TopologyError("isolated vertex " + std::to_string(v));

    if (connected_components(nv, faces) != 1)
        throw TopologyError("mesh is not connected");

    std::vector<int> loop;
    int loops = walk_boundary_loops(nv, faces, edges, &loop);
    if (loops < 0) throw TopologyError("non-manifold (pinched) boundary vertex");
    if (loops != 1)
        throw TopologyError("expected exactly one boundary loop, found " +
                            std::to_string(loops) +
                            " (chi=" + std::to_string(euler) + ")");
    if (euler != 1)
        throw TopologyError("Euler characteristic V-E+F = " +
                            std::to_string(euler) + ", need 1 (disk topology)");

    // Rotate the loop to start at its smallest vertex index.
    auto min_it = std::min_element(loop.begin(), loop.end());
    std::rotate(loop.begin(), min_it, loop.end());

    TriangleMesh mesh;
    mesh.vertices_ = std::move(vertices);
    mesh.faces_ = std::move(faces);
    mesh.boundary_ = std::move(loop);
    mesh.edge_count_ = ne;
    mesh.boundary_flag_.assign(nv, false);
    for (int v : mesh.boundary_) mesh.boundary_flag_[v] = true;
    mesh.planar_ = std::all_of(mesh.vertices_.begin(), mesh.vertices_.end(),
                               [](const Eigen::Vector3d& p) { return p.z() == 0.0; });
    return mesh;
}

std::vector<double> TriangleMesh::boundary_edge_lengths() const {
    std::vector<double> lengths(boundary_.size());
    const int n = static_cast<int>(boundary_.size());
    for (int i = 0; i < n; ++i) {
        int a = boundary_[i];
        int b = boundary_[(i + 1) % n];
        lengths[i] = (vertices_[b] - vertices_[a]).norm();
    }
    return lengths;
}

double TriangleMesh::face_area(int f) const {
    const Face& face = faces_[f];
    return triangle_area(vertices_[face[0]], vertices_[face[1]], vertices_[face[2]]);
}

double TriangleMesh::bbox_diagonal() const {
    Eigen::Vector3d lo = vertices_[0], hi = vertices_[0];
    for (const auto& v : vertices_) {
        lo = lo.cwiseMin(v);
        hi = hi.cwiseMax(v);
    }
    return (hi - lo).norm();
}

void merge_duplicate_vertices(std::vector<Eigen::Vector3d>& vertices,
                              std::vector<Face>& faces, double tolerance) {
    if (vertices.empty()) return;
    const int nv = static_cast<int>(vertices.size());
    std::vector<int> remap(nv, -1);

    if (tolerance <= 0.0) {
        std::map<std::array<double, 3>, int> seen;
        for (int v = 0; v < nv; ++v) {
            std::array<double, 3> key{vertices[v].x(), vertices[v].y(), vertices[v].z()};
            auto [it, inserted] = seen.emplace(key, v);
            remap[v] = it->second;
        }
    } else {
        // Bucket by cell; compare against the 27 neighboring cells.
        std::unordered_map<uint64_t, std::vector<int>> grid;
        auto cell_of = [&](const Eigen::Vector3d& p, int dx, int dy, int dz) {
            auto hash = [](int64_t a, int64_t b, int64_t c) {
                uint64_t h = 1469598103934665603ull;
                for (uint64_t x : {static_cast<uint64_t>(a), static_cast<uint64_t>(b),
                                   static_cast<uint64_t>(c)}) {
                    h ^= x;
                    h *= 1099511628211ull;
                }
                return h;
            };
            return hash(static_cast<int64_t>(std::floor(p.x() / tolerance)) + dx,
                        static_cast<int64_t>(std::floor(p.y() / tolerance)) + dy,
                        static_cast<int64_t>(std::floor(p.z() / tolerance)) + dz);
        };
        for (int v = 0; v < nv; ++v) {
            int target = -1;
            for (int dx = -1; dx <= 1 && target < 0; ++dx)
                for (int dy = -1; dy <= 1 && target < 0; ++dy)
                    for (int dz = -1; dz <= 1 && target < 0; ++dz) {
                        auto it = grid.find(cell_of(vertices[v], dx, dy, dz));
                        if (it == grid.end()) continue;
                        for (int u : it->second)
                            if ((vertices[u] - vertices[v]).norm() <= tolerance) {
                                target = u;
                                break;
                            }
                    }
            if (target < 0) {
                target = v;
                grid[cell_of(vertices[v], 0, 0, 0)].push_back(v);
            }
            remap[v] = target;
        }
    }

    // Compact surviving vertices, preserving order.
    std::vector<int> compact(nv, -1);
    std::vector<Eigen::Vector3d> out;
    out.reserve(nv);
    for (int v = 0; v < nv; ++v) {
        if (remap[v] == v) {
            compact[v] = static_cast<int>(out.size());
            out.push_back(vertices[v]);
        }
    }
    for (Face& f : faces)
        for (int& v : f) v = compact[remap[v]];
    vertices = std::move(out);
}

}  // namespace diskconf
