#include "diskconf/mesh_io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

namespace diskconf {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// %.17g round-trips IEEE doubles exactly.
std::string fmt_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

int parse_face_index(const std::string& token, size_t n_vertices, int line_no,
                     int* vt_index = nullptr) {
    // OBJ face tokens may be v, v/vt, v/vt/vn or v//vn.
    size_t slash = token.find('/');
    std::string head = token.substr(0, slash);
    int idx;
    try {
        idx = std::stoi(head);
    } catch (const std::exception&) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": bad face index '" + token + "'");
    }
    if (idx < 0) idx = static_cast<int>(n_vertices) + idx + 1;  // relative index
    if (idx < 1 || idx > static_cast<int>(n_vertices))
        throw ParseError("line " + std::to_string(line_no) +
                         ": face index out of range: " + token);
    if (vt_index && slash != std::string::npos) {
        std::string rest = token.substr(slash + 1);
        size_t slash2 = rest.find('/');
        std::string vt = rest.substr(0, slash2);
        if (!vt.empty()) {
            try {
                *vt_index = std::stoi(vt);
            } catch (const std::exception&) {
                *vt_index = 0;
            }
        }
    }
    return idx - 1;
}

}  // namespace

MeshFormat format_from_path(const std::string& path) {
    size_t dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : lowercase(path.substr(dot + 1));
    if (ext == "obj") return MeshFormat::OBJ;
    if (ext == "off") return MeshFormat::OFF;
    if (ext == "ply") return MeshFormat::PLY;
    throw ParseError("cannot infer mesh format from path: " + path);
}

MeshData read_obj(std::istream& in) {
    MeshData data;
    std::vector<std::complex<double>> vt_pool;
    std::vector<std::pair<int, int>> vt_assignments;  // (vertex, vt index)
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        line_no++;
        std::istringstream ls(line);
        std::string tag;
        if (!(ls >> tag) || tag[0] == '#') continue;
        if (tag == "v") {
            double x, y, z = 0.0;
            if (!(ls >> x >> y)) throw ParseError("line " + std::to_string(line_no) + ": bad vertex");
            ls >> z;
            data.vertices.emplace_back(x, y, z);
        } else if (tag == "vt") {
            double u, v = 0.0;
            if (!(ls >> u)) throw ParseError("line " + std::to_string(line_no) + ": bad vt");
            ls >> v;
            vt_pool.emplace_back(u, v);
        } else if (tag == "f") {
            std::vector<int> idx;
            std::string token;
            while (ls >> token) {
                int vt = 0;
                idx.push_back(parse_face_index(token, data.vertices.size(), line_no, &vt));
                if (vt > 0) vt_assignments.emplace_back(idx.back(), vt - 1);
            }
            if (idx.size() != 3)
                throw ParseError("line " + std::to_string(line_no) +
                                 ": only triangle faces are supported (got " +
                                 std::to_string(idx.size()) + " vertices)");
            data.faces.push_back({idx[0], idx[1], idx[2]});
        }
        // o/g/s/usemtl/mtllib/vn are ignored
    }
    data.vt_count = static_cast<int>(vt_pool.size());
    if (!vt_pool.empty() && !vt_assignments.empty()) {
        data.uv.assign(data.vertices.size(), {0.0, 0.0});
        std::vector<char> has(data.vertices.size(), 0);
        for (auto [v, vt] : vt_assignments) {
            if (vt < static_cast<int>(vt_pool.size())) {
                data.uv[v] = vt_pool[vt];
                has[v] = 1;
            }
        }
        if (std::find(has.begin(), has.end(), 0) != has.end()) data.uv.clear();
    }
    return data;
}

MeshData read_off(std::istream& in) {
    auto next_content_line = [&](std::string& line) {
        while (std::getline(in, line)) {
            size_t p = line.find_first_not_of(" \t\r");
            if (p == std::string::npos || line[p] == '#') continue;
            return true;
        }
        return false;
    };
    std::string line;
    if (!next_content_line(line)) throw ParseError("empty OFF file");
    {
        std::istringstream ls(line);
        std::string magic;
        ls >> magic;
        if (magic != "OFF") throw ParseError("missing OFF header");
    }
    if (!next_content_line(line)) throw ParseError("missing OFF counts");
    size_t nv, nf, ne;
    {
        std::istringstream ls(line);
        if (!(ls >> nv >> nf >> ne)) throw ParseError("bad OFF counts line");
    }
    MeshData data;
    data.vertices.reserve(nv);
    for (size_t i = 0; i < nv; ++i) {
        if (!next_content_line(line)) throw ParseError("truncated OFF vertex list");
        std::istringstream ls(line);
        double x, y, z;
        if (!(ls >> x >> y >> z)) throw ParseError("bad OFF vertex");
        data.vertices.emplace_back(x, y, z);
    }
    data.faces.reserve(nf);
    for (size_t i = 0; i < nf; ++i) {
        if (!next_content_line(line)) throw ParseError("truncated OFF face list");
        std::istringstream ls(line);
        int n;
        if (!(ls >> n)) throw ParseError("bad OFF face");
        if (n != 3) throw ParseError("only triangle faces are supported in OFF");
        Face f;
        for (int k = 0; k < 3; ++k) {
            if (!(ls >> f[k]) || f[k] < 0 || f[k] >= static_cast<int>(nv))
                throw ParseError("OFF face index out of range");
        }
        data.faces.push_back(f);
    }
    return data;
}

namespace {

struct PlyProperty {
    std::string name;
    std::string type;
    bool is_list = false;
    std::string count_type;
};

struct PlyElement {
    std::string name;
    size_t count = 0;
    std::vector<PlyProperty> properties;
};

size_t ply_type_size(const std::string& t) {
    if (t == "char" || t == "uchar" || t == "int8" || t == "uint8") return 1;
    if (t == "short" || t == "ushort" || t == "int16" || t == "uint16") return 2;
    if (t == "int" || t == "uint" || t == "int32" || t == "uint32" || t == "float" ||
        t == "float32")
        return 4;
    if (t == "double" || t == "float64") return 8;
    throw ParseError("unknown PLY type: " + t);
}

double read_binary_scalar(std::istream& in, const std::string& type) {
    char buf[8];
    size_t n = ply_type_size(type);
    if (!in.read(buf, static_cast<std::streamsize>(n)))
        throw ParseError("truncated binary PLY data");
    auto as = [&buf]<typename T>() {
        T v;
        std::memcpy(&v, buf, sizeof(T));
        return static_cast<double>(v);
    };
    if (type == "char" || type == "int8") return as.operator()<int8_t>();
    if (type == "uchar" || type == "uint8") return as.operator()<uint8_t>();
    if (type == "short" || type == "int16") return as.operator()<int16_t>();
    if (type == "ushort" || type == "uint16") return as.operator()<uint16_t>();
    if (type == "int" || type == "int32") return as.operator()<int32_t>();
    if (type == "uint" || type == "uint32") return as.operator()<uint32_t>();
    if (type == "float" || type == "float32") return as.operator()<float>();
    return as.operator()<double>();
}

}  // namespace

MeshData read_ply(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw ParseError("empty PLY file");
    if (line.rfind("ply", 0) != 0) throw ParseError("missing ply magic");

    bool binary = false;
    std::vector<PlyElement> elements;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream ls(line);
        std::string tag;
        ls >> tag;
        if (tag == "comment" || tag == "obj_info") continue;
        if (tag == "format") {
            std::string fmt;
            ls >> fmt;
            if (fmt == "ascii")
                binary = false;
            else if (fmt == "binary_little_endian")
                binary = true;
            else
                throw ParseError("unsupported PLY format: " + fmt);
        } else if (tag == "element") {
            PlyElement el;
            ls >> el.name >> el.count;
            elements.push_back(el);
        } else if (tag == "property") {
            if (elements.empty()) throw ParseError("PLY property before element");
            PlyProperty prop;
            std::string t;
            ls >> t;
            if (t == "list") {
                prop.is_list = true;
                ls >> prop.count_type >> prop.type >> prop.name;
            } else {
                prop.type = t;
                ls >> prop.name;
            }
            elements.back().properties.push_back(prop);
        } else if (tag == "end_header") {
            break;
        } else if (!tag.empty()) {
            throw ParseError("unexpected PLY header line: " + line);
        }
    }

    MeshData data;
    for (const PlyElement& el : elements) {
        const bool is_vertex = el.name == "vertex";
        const bool is_face = el.name == "face";
        int xi = -1, yi = -1, zi = -1;
        if (is_vertex) {
            for (size_t p = 0; p < el.properties.size(); ++p) {
                if (el.properties[p].name == "x") xi = static_cast<int>(p);
                if (el.properties[p].name == "y") yi = static_cast<int>(p);
                if (el.properties[p].name == "z") zi = static_cast<int>(p);
            }
            if (xi < 0 || yi < 0 || zi < 0)
                throw ParseError("PLY vertex element lacks x/y/z properties");
        }
        for (size_t i = 0; i < el.count; ++i) {
            std::istringstream ascii_line;
            if (!binary) {
                if (!std::getline(in, line)) throw ParseError("truncated PLY data");
                ascii_line.str(line);
            }
            auto read_scalar = [&](const std::string& type) {
                if (binary) return read_binary_scalar(in, type);
                double v;
                if (!(ascii_line >> v)) throw ParseError("bad PLY data row");
                return v;
            };
            double coords[3] = {0, 0, 0};
            std::vector<int> face_idx;
            for (size_t p = 0; p < el.properties.size(); ++p) {
                const PlyProperty& prop = el.properties[p];
                if (prop.is_list) {
                    int n = static_cast<int>(read_scalar(prop.count_type));
                    // The first list property of a face element holds the indices.
                    const bool collect = is_face && face_idx.empty();
                    for (int k = 0; k < n; ++k) {
                        double v = read_scalar(prop.type);
                        if (collect) face_idx.push_back(static_cast<int>(v));
                    }
                } else {
                    double v = read_scalar(prop.type);
                    if (is_vertex) {
                        if (static_cast<int>(p) == xi) coords[0] = v;
                        if (static_cast<int>(p) == yi) coords[1] = v;
                        if (static_cast<int>(p) == zi) coords[2] = v;
                    }
                }
            }
            if (is_vertex) data.vertices.emplace_back(coords[0], coords[1], coords[2]);
            if (is_face) {
                if (face_idx.size() != 3)
                    throw ParseError("only triangle faces are supported in PLY");
                for (int v : face_idx)
                    if (v < 0 || v >= static_cast<int>(data.vertices.size()))
                        throw ParseError("PLY face index out of range");
                data.faces.push_back({face_idx[0], face_idx[1], face_idx[2]});
            }
        }
    }
    return data;
}

MeshData read_mesh_data(const std::string& path, MeshFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    switch (format) {
        case MeshFormat::OBJ: return read_obj(in);
        case MeshFormat::OFF: return read_off(in);
        case MeshFormat::PLY: return read_ply(in);
    }
    throw ParseError("unknown format");
}

TriangleMesh load_mesh(const std::string& path, MeshFormat format,
                       const MeshOptions& options) {
    MeshData data = read_mesh_data(path, format);
    return TriangleMesh::from_data(std::move(data.vertices), std::move(data.faces),
                                   options);
}

TriangleMesh load_mesh(const std::string& path, const MeshOptions& options) {
    return load_mesh(path, format_from_path(path), options);
}

void write_obj(std::ostream& out, const TriangleMesh& mesh) {
    for (const auto& v : mesh.vertices())
        out << "v " << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
            << fmt_double(v.z()) << '\n';
    for (const Face& f : mesh.faces())
        out << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

void write_off(std::ostream& out, const TriangleMesh& mesh) {
    out << "OFF\n"
        << mesh.vertex_count() << ' ' << mesh.face_count() << ' '
        << mesh.edge_count() << '\n';
    for (const auto& v : mesh.vertices())
        out << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
            << fmt_double(v.z()) << '\n';
    for (const Face& f : mesh.faces())
        out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
}

void write_ply(std::ostream& out, const TriangleMesh& mesh, bool binary) {
    out << "ply\nformat " << (binary ? "binary_little_endian" : "ascii")
        << " 1.0\n"
        << "element vertex " << mesh.vertex_count() << '\n'
        << "property double x\nproperty double y\nproperty double z\n"
        << "element face " << mesh.face_count() << '\n'
        << "property list uchar int vertex_indices\n"
        << "end_header\n";
    if (binary) {
        for (const auto& v : mesh.vertices()) {
            double coords[3] = {v.x(), v.y(), v.z()};
            out.write(reinterpret_cast<const char*>(coords), sizeof(coords));
        }
        for (const Face& f : mesh.faces()) {
            uint8_t n = 3;
            int32_t idx[3] = {f[0], f[1], f[2]};
            out.write(reinterpret_cast<const char*>(&n), 1);
            out.write(reinterpret_cast<const char*>(idx), sizeof(idx));
        }
    } else {
        for (const auto& v : mesh.vertices())
            out << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
                << fmt_double(v.z()) << '\n';
        for (const Face& f : mesh.faces())
            out << "3 " << f[0] << ' ' << f[1] << ' ' << f[2] << '\n';
    }
}

void save_mesh(const std::string& path, const TriangleMesh& mesh, MeshFormat format,
               bool binary_ply) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    switch (format) {
        case MeshFormat::OBJ: write_obj(out, mesh); break;
        case MeshFormat::OFF: write_off(out, mesh); break;
        case MeshFormat::PLY: write_ply(out, mesh, binary_ply); break;
    }
    if (!out) throw IoError("write failed for " + path);
}

void write_obj_with_uv(std::ostream& out, const TriangleMesh& mesh,
                       const PlanarMap& uv) {
    for (const auto& v : mesh.vertices())
        out << "v " << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << ' '
            << fmt_double(v.z()) << '\n';
    for (const auto& w : uv)
        out << "vt " << fmt_double(w.real()) << ' ' << fmt_double(w.imag()) << '\n';
    for (const Face& f : mesh.faces())
        out << "f " << f[0] + 1 << '/' << f[0] + 1 << ' ' << f[1] + 1 << '/'
            << f[1] + 1 << ' ' << f[2] + 1 << '/' << f[2] + 1 << '\n';
}

void write_uv_csv(std::ostream& out, const PlanarMap& uv) {
    out << "vertex,u,v\n";
    for (size_t i = 0; i < uv.size(); ++i)
        out << i << ',' << fmt_double(uv[i].real()) << ',' << fmt_double(uv[i].imag())
            << '\n';
}

PlanarMap read_uv(const std::string& path, int expected_vertices) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);

    size_t dot = path.find_last_of('.');
    std::string ext = dot == std::string::npos ? "" : lowercase(path.substr(dot + 1));

    PlanarMap uv;
    if (ext == "obj") {
        MeshData data = read_obj(in);
        if (data.uv.empty()) {
            if (data.vt_count > 0)
                throw MismatchedVertexCountError(
                    path + " has vt records but not one per vertex");
            throw ParseError(path + " carries no vt records");
        }
        uv = std::move(data.uv);
    } else {
        std::string line;
        std::vector<char> seen;
        while (std::getline(in, line)) {
            if (line.empty() || !std::isdigit(static_cast<unsigned char>(line[0])))
                continue;  // header or blank
            std::istringstream ls(line);
            std::string cell;
            long idx;
            double u, v;
            if (!std::getline(ls, cell, ',')) throw ParseError("bad UV row: " + line);
            idx = std::stol(cell);
            if (!std::getline(ls, cell, ',')) throw ParseError("bad UV row: " + line);
            u = std::stod(cell);
            if (!std::getline(ls, cell, ',')) throw ParseError("bad UV row: " + line);
            v = std::stod(cell);
            if (idx < 0) throw ParseError("negative vertex index in UV file");
            if (idx >= static_cast<long>(uv.size())) {
                uv.resize(idx + 1, {0.0, 0.0});
                seen.resize(idx + 1, 0);
            }
            uv[idx] = {u, v};
            seen[idx] = 1;
        }
        if (std::find(seen.begin(), seen.end(), 0) != seen.end())
            throw MismatchedVertexCountError("UV file skips vertex indices");
    }
    if (static_cast<int>(uv.size()) != expected_vertices)
        throw MismatchedVertexCountError(
            "UV file covers " + std::to_string(uv.size()) + " vertices, mesh has " +
            std::to_string(expected_vertices));
    return uv;
}

}  // namespace diskconf
