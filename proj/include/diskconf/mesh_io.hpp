#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "diskconf/mesh.hpp"

namespace diskconf {

enum class MeshFormat { OBJ, OFF, PLY };

/// Raw file contents before validation.
struct MeshData {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<Face> faces;
    std::vector<std::complex<double>> uv;  // per-vertex; empty unless every vertex has one
    int vt_count = 0;                      // raw `vt` records seen
};

/// Picks the format from the file extension; throws ParseError otherwise.
MeshFormat format_from_path(const std::string& path);

MeshData read_obj(std::istream& in);
MeshData read_off(std::istream& in);
MeshData read_ply(std::istream& in);

MeshData read_mesh_data(const std::string& path, MeshFormat format);

/// Load and validate. Vertex order is preserved from the file.
TriangleMesh load_mesh(const std::string& path, MeshFormat format,
                       const MeshOptions& options = {});
TriangleMesh load_mesh(const std::string& path, const MeshOptions& options = {});

/// Writers mirror the readers. Text formats print 17 significant digits so
/// coordinates round-trip bit-exactly; binary PLY is bit-exact by construction.
void write_obj(std::ostream& out, const TriangleMesh& mesh);
void write_off(std::ostream& out, const TriangleMesh& mesh);
void write_ply(std::ostream& out, const TriangleMesh& mesh, bool binary);

void save_mesh(const std::string& path, const TriangleMesh& mesh, MeshFormat format,
               bool binary_ply = true);

/// OBJ with `vt u v` records and `f v/vt` indexing, vt index == vertex index.
void write_obj_with_uv(std::ostream& out, const TriangleMesh& mesh,
                       const PlanarMap& uv);

/// CSV rows "vertex,u,v" with a header line.
void write_uv_csv(std::ostream& out, const PlanarMap& uv);

/// Reads a parameterization produced by write_obj_with_uv or write_uv_csv
/// (chosen by extension). Throws MismatchedVertexCountError when the UV set
/// does not cover [0, expected_vertices).
PlanarMap read_uv(const std::string& path, int expected_vertices);

}  // namespace diskconf
