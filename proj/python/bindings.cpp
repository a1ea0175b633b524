#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <fstream>
#include <sstream>

#include "diskconf/beltrami.hpp"
#include "diskconf/harmonic.hpp"
#include "diskconf/mesh_io.hpp"
#include "diskconf/metrics.hpp"
#include "diskconf/pipeline.hpp"

namespace py = pybind11;
using namespace diskconf;

namespace {

TriangleMesh mesh_from_arrays(py::array_t<double, py::array::c_style | py::array::forcecast> vertices,
                              py::array_t<int, py::array::c_style | py::array::forcecast> faces) {
    if (vertices.ndim() != 2 || (vertices.shape(1) != 3 && vertices.shape(1) != 2))
        throw py::value_error("vertices must be (n, 3) or (n, 2)");
    if (faces.ndim() != 2 || faces.shape(1) != 3)
        throw py::value_error("faces must be (m, 3)");
    std::vector<Eigen::Vector3d> v(vertices.shape(0));
    auto va = vertices.unchecked<2>();
    const bool flat = vertices.shape(1) == 2;
    for (py::ssize_t i = 0; i < vertices.shape(0); ++i)
        v[i] = {va(i, 0), va(i, 1), flat ? 0.0 : va(i, 2)};
    std::vector<Face> f(faces.shape(0));
    auto fa = faces.unchecked<2>();
    for (py::ssize_t i = 0; i < faces.shape(0); ++i)
        f[i] = {fa(i, 0), fa(i, 1), fa(i, 2)};
    return TriangleMesh::from_data(std::move(v), std::move(f));
}

py::array_t<double> vertices_array(const TriangleMesh& mesh) {
    py::array_t<double> out({mesh.vertex_count(), 3});
    auto a = out.mutable_unchecked<2>();
    for (int i = 0; i < mesh.vertex_count(); ++i) {
        a(i, 0) = mesh.vertices()[i].x();
        a(i, 1) = mesh.vertices()[i].y();
        a(i, 2) = mesh.vertices()[i].z();
    }
    return out;
}

py::array_t<int> faces_array(const TriangleMesh& mesh) {
    py::array_t<int> out({mesh.face_count(), 3});
    auto a = out.mutable_unchecked<2>();
    for (int i = 0; i < mesh.face_count(); ++i)
        for (int k = 0; k < 3; ++k) a(i, k) = mesh.faces()[i][k];
    return out;
}

py::array_t<double> uv_array(const PlanarMap& map) {
    py::array_t<double> out({static_cast<py::ssize_t>(map.size()), py::ssize_t(2)});
    auto a = out.mutable_unchecked<2>();
    for (size_t i = 0; i < map.size(); ++i) {
        a(i, 0) = map[i].real();
        a(i, 1) = map[i].imag();
    }
    return out;
}

PlanarMap map_from_array(py::array_t<double, py::array::c_style | py::array::forcecast> uv) {
    if (uv.ndim() != 2 || uv.shape(1) != 2)
        throw py::value_error("uv must be (n, 2)");
    PlanarMap map(uv.shape(0));
    auto a = uv.unchecked<2>();
    for (py::ssize_t i = 0; i < uv.shape(0); ++i) map[i] = {a(i, 0), a(i, 1)};
    return map;
}

py::dict report_dict(const QualityReport& r) {
    py::dict d;
    d["vertices"] = r.vertex_count;
    d["faces"] = r.face_count;
    d["boundary_vertices"] = r.boundary_count;
    d["mean_mu"] = r.mean_mu;
    d["sd_mu"] = r.sd_mu;
    d["max_mu"] = r.max_mu;
    d["maximal_dilation"] = r.maximal_dilation;
    d["boundary_circularity"] = r.boundary_circularity;
    d["flipped_faces"] = r.flipped_faces;
    d["bijective"] = r.bijective;
    d["criteria_agree"] = r.criteria_agree;
    d["energy_trace"] = r.energy_trace;
    d["iterations"] = r.iterations;
    d["converged"] = r.converged;
    d["nondecreasing_warning"] = r.nondecreasing_warning;
    d["pre_projection_deviation"] = r.pre_projection_deviation;
    py::dict h;
    h["bin_edges"] = r.histogram.edges;
    h["counts"] = r.histogram.counts;
    h["overflow"] = r.histogram.overflow;
    h["overflow_flagged"] = r.histogram.overflow_flagged;
    d["histogram"] = h;
    py::dict t;
    t["harmonic_s"] = r.timings.harmonic_s;
    t["north_pole_s"] = r.timings.north_pole_s;
    t["south_pole_s"] = r.timings.south_pole_s;
    t["metrics_s"] = r.timings.metrics_s;
    t["total_s"] = r.timings.total_s;
    d["timings"] = t;
    d["area_weighted_mean_mu"] = r.area_weighted_mean_mu;
    d["area_weighted_sd_mu"] = r.area_weighted_sd_mu;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Disk conformal parameterization of simply-connected open meshes";

    py::register_exception<TopologyError>(m, "TopologyError");
    py::register_exception<ParseError>(m, "ParseError");
    static py::exception<Error> base_error(m, "DiskConfError");
    py::register_exception_translator([](std::exception_ptr p) {
        try {
            if (p) std::rethrow_exception(p);
        } catch (const TopologyError&) {
            throw;  // handled by the registered exception above
        } catch (const ParseError&) {
            throw;
        } catch (const Error& e) {
            py::set_error(base_error, e.what());
        }
    });

    py::class_<TriangleMesh>(m, "Mesh")
        .def(py::init(&mesh_from_arrays), py::arg("vertices"), py::arg("faces"))
        .def_static(
            "load",
            [](const std::string& path) { return load_mesh(path); },
            py::arg("path"))
        .def_property_readonly("n_vertices", &TriangleMesh::vertex_count)
        .def_property_readonly("n_faces", &TriangleMesh::face_count)
        .def_property_readonly("n_edges", &TriangleMesh::edge_count)
        .def_property_readonly("vertices", &vertices_array)
        .def_property_readonly("faces", &faces_array)
        .def_property_readonly("boundary", [](const TriangleMesh& mesh) {
            return mesh.boundary_loop();
        })
        .def_property_readonly("is_planar", &TriangleMesh::is_planar)
        .def("save", [](const TriangleMesh& mesh, const std::string& path) {
            save_mesh(path, mesh, format_from_path(path));
        })
        .def("__repr__", [](const TriangleMesh& mesh) {
            std::ostringstream s;
            s << "Mesh(" << mesh.vertex_count() << " vertices, "
              << mesh.face_count() << " faces)";
            return s.str();
        });

    m.def(
        "validate",
        [](const TriangleMesh& mesh) {
            TopologyReport r = validate_topology(mesh.vertices(), mesh.faces());
            py::dict d;
            d["euler"] = r.euler;
            d["boundary_loops"] = r.boundary_loops;
            d["orientable"] = r.orientable;
            return d;
        },
        py::arg("mesh"), "Topology diagnostic (euler, boundary_loops, orientable)");

    m.def(
        "harmonic_map",
        [](const TriangleMesh& mesh) { return uv_array(harmonic_disk_map(mesh)); },
        py::arg("mesh"),
        "Disk harmonic map with arc-length circular boundary, as an (n, 2) array");

    m.def(
        "parameterize",
        [](const TriangleMesh& mesh, double epsilon, int max_iter) {
            PipelineOptions options;
            options.epsilon = epsilon;
            options.max_iter = max_iter;
            PipelineResult result = run_pipeline(mesh, options);
            return py::make_tuple(uv_array(result.phi), report_dict(result.report));
        },
        py::arg("mesh"), py::arg("epsilon") = 1e-5, py::arg("max_iter") = 20,
        "Bijective disk conformal parameterization; returns (uv, report)");

    m.def(
        "beltrami",
        [](const TriangleMesh& mesh, py::array_t<double> uv) {
            BeltramiField mu = beltrami_of_map(mesh, map_from_array(uv));
            py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(mu.size()));
            auto a = out.mutable_unchecked<1>();
            for (size_t t = 0; t < mu.size(); ++t) a(t) = mu[t];
            return out;
        },
        py::arg("mesh"), py::arg("uv"),
        "Per-face Beltrami coefficients of the map mesh -> uv");

    m.def(
        "metrics",
        [](const TriangleMesh& mesh, py::array_t<double> uv) {
            return report_dict(compute_report(mesh, map_from_array(uv)));
        },
        py::arg("mesh"), py::arg("uv"), "Quality report for a given parameterization");

    m.def(
        "save_with_uv",
        [](const TriangleMesh& mesh, py::array_t<double> uv, const std::string& path) {
            std::ofstream out(path, std::ios::binary);
            if (!out) throw IoError("cannot write " + path);
            write_obj_with_uv(out, mesh, map_from_array(uv));
        },
        py::arg("mesh"), py::arg("uv"), py::arg("path"),
        "Write an OBJ with vt records (vt index == vertex index)");
}
