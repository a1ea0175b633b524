#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "diskconf/beltrami.hpp"
#include "diskconf/harmonic.hpp"
#include "diskconf/mesh_io.hpp"
#include "diskconf/metrics.hpp"
#include "diskconf/pipeline.hpp"

namespace {

// sysexits-style codes for usage and IO problems; domain failures use 2 and 3.
constexpr int kExitTopology = 2;
constexpr int kExitNumerical = 3;
constexpr int kExitUsage = 64;
constexpr int kExitData = 65;
constexpr int kExitNoInput = 66;
constexpr int kExitIo = 74;

struct CliConfig {
    std::string input;
    std::string format;  // "", "obj", "off", "ply"
    double epsilon = 1e-5;
    int max_iter = 20;
    std::string output;
    std::string report_path;
    std::string histogram_path;
    std::string uv_path;  // metrics subcommand
    bool verbose = false;
    bool check_only = false;
    long seed = 0;  // reserved; the core math is deterministic and ignores it
};

diskconf::MeshFormat resolve_format(const CliConfig& cfg) {
    if (cfg.format == "obj") return diskconf::MeshFormat::OBJ;
    if (cfg.format == "off") return diskconf::MeshFormat::OFF;
    if (cfg.format == "ply") return diskconf::MeshFormat::PLY;
    return diskconf::format_from_path(cfg.input);
}

diskconf::TriangleMesh load_input(const CliConfig& cfg) {
    if (!std::filesystem::exists(cfg.input)) {
        std::cerr << "error: no such file: " << cfg.input << "\n";
        std::exit(kExitNoInput);
    }
    return diskconf::load_mesh(cfg.input, resolve_format(cfg));
}

void write_outputs(const CliConfig& cfg, const diskconf::TriangleMesh& mesh,
                   const diskconf::PlanarMap& uv, const diskconf::QualityReport& report) {
    if (!cfg.output.empty()) {
        std::ofstream out(cfg.output, std::ios::binary);
        if (!out) throw diskconf::IoError("cannot write " + cfg.output);
        if (cfg.output.size() >= 4 &&
            cfg.output.compare(cfg.output.size() - 4, 4, ".csv") == 0)
            diskconf::write_uv_csv(out, uv);
        else
            diskconf::write_obj_with_uv(out, mesh, uv);
    }
    if (!cfg.report_path.empty())
        diskconf::export_report(report, cfg.report_path, diskconf::ReportFormat::JSON);
    if (!cfg.histogram_path.empty()) {
        std::ofstream out(cfg.histogram_path, std::ios::binary);
        if (!out) throw diskconf::IoError("cannot write " + cfg.histogram_path);
        diskconf::export_histogram_csv(out, report.histogram);
    }
}

void print_summary(const diskconf::QualityReport& report) {
    std::printf(
        "mean|mu| = %.6g  sd = %.6g  circularity = %.6g  flipped = %zu  "
        "iterations = %d  time = %.3f s\n",
        report.mean_mu, report.sd_mu, report.boundary_circularity,
        report.flipped_faces.size(), report.iterations, report.timings.total_s);
}

int run_check(const CliConfig& cfg) {
    if (!std::filesystem::exists(cfg.input)) {
        std::cerr << "error: no such file: " << cfg.input << "\n";
        return kExitNoInput;
    }
    diskconf::MeshData data = diskconf::read_mesh_data(cfg.input, resolve_format(cfg));
    diskconf::TopologyReport topo = diskconf::validate_topology(data.vertices, data.faces);
    std::printf("chi=%d, %d boundary loop%s, %sorientable\n", topo.euler,
                topo.boundary_loops, topo.boundary_loops == 1 ? "" : "s",
                topo.orientable ? "" : "not ");
    // Full validation surfaces degenerate faces and non-manifold edges too.
    diskconf::TriangleMesh mesh = diskconf::TriangleMesh::from_data(
        std::move(data.vertices), std::move(data.faces));
    (void)mesh;
    return 0;
}

int run_parameterize(const CliConfig& cfg) {
    if (cfg.check_only) return run_check(cfg);
    diskconf::TriangleMesh mesh = load_input(cfg);
    if (cfg.verbose)
        std::cerr << "loaded " << mesh.vertex_count() << " vertices, "
                  << mesh.face_count() << " faces, "
                  << mesh.boundary_loop().size() << " boundary vertices\n";

    diskconf::PipelineOptions options;
    options.epsilon = cfg.epsilon;
    options.max_iter = cfg.max_iter;
    diskconf::PipelineResult result = diskconf::run_pipeline(mesh, options);

    if (cfg.verbose) {
        std::cerr << "energy trace:";
        for (double e : result.report.energy_trace) std::cerr << ' ' << e;
        std::cerr << "\n";
        if (result.report.nondecreasing_warning)
            std::cerr << "warning: mean |mu| stopped decreasing before the threshold\n";
    }
    if (!result.report.bijective)
        std::cerr << "warning: " << result.report.flipped_faces.size()
                  << " flipped face(s) in the final map\n";

    write_outputs(cfg, mesh, result.phi, result.report);
    print_summary(result.report);
    return 0;
}

int run_metrics(const CliConfig& cfg) {
    diskconf::TriangleMesh mesh = load_input(cfg);
    if (!std::filesystem::exists(cfg.uv_path)) {
        std::cerr << "error: no such file: " << cfg.uv_path << "\n";
        return kExitNoInput;
    }
    diskconf::PlanarMap uv = diskconf::read_uv(cfg.uv_path, mesh.vertex_count());
    diskconf::QualityReport report = diskconf::compute_report(mesh, uv);
    write_outputs(cfg, mesh, uv, report);
    print_summary(report);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bijective disk conformal parameterization of simply-connected "
                 "open triangle meshes"};
    app.require_subcommand(1);

    CliConfig cfg;

    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("input", cfg.input, "Input mesh (OBJ, OFF or PLY)")->required();
        cmd->add_option("--format", cfg.format, "Input format override")
            ->check(CLI::IsMember({"obj", "off", "ply"}));
    };

    CLI::App* param = app.add_subcommand("parameterize", "Compute the disk parameterization");
    add_common(param);
    param->add_option("--eps", cfg.epsilon, "Energy threshold for the boundary iteration")
        ->check(CLI::PositiveNumber);
    param->add_option("--max-iter", cfg.max_iter, "Iteration cap for the boundary iteration")
        ->check(CLI::Range(1, 1000000));
    param->add_option("-o,--output", cfg.output,
                      "Output path (.csv for vertex,u,v rows; otherwise OBJ with vt)");
    param->add_option("--report", cfg.report_path, "Quality report JSON path");
    param->add_option("--histogram", cfg.histogram_path, "|mu| histogram CSV path");
    param->add_flag("--verbose", cfg.verbose, "Progress and trace on stderr");
    param->add_flag("--check-only", cfg.check_only, "Validate the mesh and exit");
    param->add_option("--seed", cfg.seed, "Reserved; the core math is deterministic");

    CLI::App* check = app.add_subcommand("check", "Validate topology and degeneracy only");
    add_common(check);

    CLI::App* metrics = app.add_subcommand("metrics",
                                           "Quality report for an existing parameterization");
    add_common(metrics);
    metrics->add_option("uv", cfg.uv_path, "Parameterization (.obj with vt, or .csv)")
        ->required();
    metrics->add_option("--report", cfg.report_path, "Quality report JSON path");
    metrics->add_option("--histogram", cfg.histogram_path, "|mu| histogram CSV path");
    metrics->add_flag("--verbose", cfg.verbose, "Progress on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (param->parsed()) return run_parameterize(cfg);
        if (check->parsed()) return run_check(cfg);
        if (metrics->parsed()) return run_metrics(cfg);
        return kExitUsage;
    } catch (const diskconf::TopologyError& e) {
        std::cerr << "topology error: " << e.what() << "\n";
        return kExitTopology;
    } catch (const diskconf::DegenerateFaceError& e) {
        std::cerr << "degenerate face: " << e.what() << "\n";
        return kExitTopology;
    } catch (const diskconf::MismatchedVertexCountError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitTopology;
    } catch (const diskconf::ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return kExitData;
    } catch (const diskconf::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const diskconf::Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
}
