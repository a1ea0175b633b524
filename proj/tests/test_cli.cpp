#include <doctest.h>

#ifdef DISKCONF_CLI_PATH

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "diskconf/mesh_io.hpp"
#include "fixtures.hpp"

namespace fs = std::filesystem;
using namespace diskconf;

namespace {

struct RunResult {
    int exit_code;
    std::string out;
    std::string err;
};

RunResult run_cli(const std::string& args) {
    static int counter = 0;
    fs::path out_path = fs::temp_directory_path() / ("diskconf_out_" +
                                                     std::to_string(counter));
    fs::path err_path = fs::temp_directory_path() / ("diskconf_err_" +
                                                     std::to_string(counter));
    counter++;
    std::string cmd = std::string(DISKCONF_CLI_PATH) + " " + args + " > " +
                      out_path.string() + " 2> " + err_path.string();
    int status = std::system(cmd.c_str());
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p);
        std::stringstream s;
        s << in.rdbuf();
        return s.str();
    };
    RunResult result{WEXITSTATUS(status), slurp(out_path), slurp(err_path)};
    fs::remove(out_path);
    fs::remove(err_path);
    return result;
}

fs::path write_fixture_mesh(const std::string& name, const TriangleMesh& mesh) {
    fs::path path = fs::temp_directory_path() / name;
    save_mesh(path.string(), mesh, MeshFormat::OBJ);
    return path;
}

std::string slurp_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
}

}  // namespace

TEST_CASE("parameterize writes outputs and reports improvement") {
    fs::path mesh_path = write_fixture_mesh("cli_hemisphere.obj",
                                            fixtures::stretched_hemisphere(10));
    fs::path out = fs::temp_directory_path() / "cli_hemisphere_uv.obj";
    fs::path report = fs::temp_directory_path() / "cli_hemisphere_report.json";

    RunResult r = run_cli("parameterize " + mesh_path.string() +
                          " --eps 1e-5 -o " + out.string() + " --report " +
                          report.string());
    CHECK(r.exit_code == 0);
    CHECK(r.out.find("mean|mu|") != std::string::npos);

    auto j = nlohmann::json::parse(slurp_file(report));
    double mean_mu = j["mean_mu"];
    double init_mean = j["energy_trace"][0];
    CHECK(mean_mu < init_mean);
    CHECK(j["bijective"] == true);

    fs::remove(mesh_path);
    fs::remove(out);
    fs::remove(report);
}

TEST_CASE("closed mesh exits with code 2 naming the Euler characteristic") {
    fs::path path = fs::temp_directory_path() / "cli_tetra.obj";
    {
        std::ofstream f(path);
        f << "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 0 0 1\n"
          << "f 1 3 2\nf 1 2 4\nf 2 3 4\nf 1 4 3\n";
    }
    RunResult r = run_cli("parameterize " + path.string());
    CHECK(r.exit_code == 2);
    CHECK(r.err.find("2") != std::string::npos);
    fs::remove(path);
}

TEST_CASE("--eps 0 is a usage error (exit 64)") {
    fs::path path = write_fixture_mesh("cli_fan.obj", fixtures::fan(6));
    RunResult r = run_cli("parameterize " + path.string() + " --eps 0");
    CHECK(r.exit_code == 64);
    fs::remove(path);
}

TEST_CASE("check subcommand") {
    SUBCASE("valid disk mesh: exit 0 with chi=1 and one loop") {
        fs::path path = write_fixture_mesh("cli_check.obj", fixtures::fan(6));
        RunResult r = run_cli("check " + path.string());
        CHECK(r.exit_code == 0);
        CHECK(r.out.find("chi=1") != std::string::npos);
        CHECK(r.out.find("1 boundary loop") != std::string::npos);
        fs::remove(path);
    }
    SUBCASE("zero-area face: exit 2 naming the face") {
        fs::path path = fs::temp_directory_path() / "cli_degenerate.obj";
        {
            std::ofstream f(path);
            f << "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 0 0\n"
              << "f 1 2 3\nf 2 4 1\n";  // face 1 is collinear
        }
        RunResult r = run_cli("check " + path.string());
        CHECK(r.exit_code == 2);
        CHECK(r.err.find("face 1") != std::string::npos);
        fs::remove(path);
    }
    SUBCASE("nonexistent file: exit 66") {
        RunResult r = run_cli("check /nonexistent/mesh.obj");
        CHECK(r.exit_code == 66);
    }
}

TEST_CASE("metrics subcommand") {
    SUBCASE("identity uv on a flat circular mesh reports zero mean") {
        auto mesh = fixtures::fan(6);
        fs::path mesh_path = write_fixture_mesh("cli_flat.obj", mesh);
        fs::path uv_path = fs::temp_directory_path() / "cli_flat_uv.csv";
        {
            std::ofstream f(uv_path);
            write_uv_csv(f, fixtures::planar_coords(mesh));
        }
        fs::path report = fs::temp_directory_path() / "cli_flat_report.json";
        RunResult r = run_cli("metrics " + mesh_path.string() + " " +
                              uv_path.string() + " --report " + report.string());
        CHECK(r.exit_code == 0);
        auto j = nlohmann::json::parse(slurp_file(report));
        CHECK(j["mean_mu"] == 0.0);
        fs::remove(mesh_path);
        fs::remove(uv_path);
        fs::remove(report);
    }
    SUBCASE("uv with a vertex missing exits 2") {
        auto mesh = fixtures::fan(6);
        fs::path mesh_path = write_fixture_mesh("cli_short.obj", mesh);
        fs::path uv_path = fs::temp_directory_path() / "cli_short_uv.csv";
        {
            std::ofstream f(uv_path);
            f << "vertex,u,v\n";
            for (int v = 0; v + 1 < mesh.vertex_count(); ++v) f << v << ",0,0\n";
        }
        RunResult r = run_cli("metrics " + mesh_path.string() + " " + uv_path.string());
        CHECK(r.exit_code == 2);
        fs::remove(mesh_path);
        fs::remove(uv_path);
    }
}

TEST_CASE("metrics on a parameterize output reproduces the report bit-for-bit") {
    fs::path mesh_path = write_fixture_mesh("cli_roundtrip.obj",
                                            fixtures::bumpy_hemisphere(10));
    fs::path out = fs::temp_directory_path() / "cli_roundtrip_uv.obj";
    fs::path report1 = fs::temp_directory_path() / "cli_roundtrip_r1.json";
    fs::path report2 = fs::temp_directory_path() / "cli_roundtrip_r2.json";

    RunResult r1 = run_cli("parameterize " + mesh_path.string() + " -o " +
                           out.string() + " --report " + report1.string());
    REQUIRE(r1.exit_code == 0);
    RunResult r2 = run_cli("metrics " + mesh_path.string() + " " + out.string() +
                           " --report " + report2.string());
    REQUIRE(r2.exit_code == 0);

    auto a = nlohmann::json::parse(slurp_file(report1));
    auto b = nlohmann::json::parse(slurp_file(report2));
    for (const char* key : {"mean_mu", "sd_mu", "max_mu", "boundary_circularity",
                            "maximal_dilation"})
        CHECK(a[key] == b[key]);
    CHECK(a["histogram"] == b["histogram"]);
    CHECK(a["flipped_faces"] == b["flipped_faces"]);

    fs::remove(mesh_path);
    fs::remove(out);
    fs::remove(report1);
    fs::remove(report2);
}

TEST_CASE("identical input and flags give byte-identical outputs") {
    fs::path mesh_path = write_fixture_mesh("cli_det.obj", fixtures::saddle(7));
    fs::path out1 = fs::temp_directory_path() / "cli_det_uv1.csv";
    fs::path out2 = fs::temp_directory_path() / "cli_det_uv2.csv";
    fs::path hist1 = fs::temp_directory_path() / "cli_det_h1.csv";
    fs::path hist2 = fs::temp_directory_path() / "cli_det_h2.csv";

    RunResult r1 = run_cli("parameterize " + mesh_path.string() + " -o " +
                           out1.string() + " --histogram " + hist1.string());
    RunResult r2 = run_cli("parameterize " + mesh_path.string() + " -o " +
                           out2.string() + " --histogram " + hist2.string());
    REQUIRE(r1.exit_code == 0);
    REQUIRE(r2.exit_code == 0);
    CHECK(slurp_file(out1) == slurp_file(out2));
    CHECK(slurp_file(hist1) == slurp_file(hist2));
    // Summary lines agree except for the wall-time field.
    CHECK(r1.out.substr(0, r1.out.find("time =")) ==
          r2.out.substr(0, r2.out.find("time =")));

    fs::remove(mesh_path);
    fs::remove(out1);
    fs::remove(out2);
    fs::remove(hist1);
    fs::remove(hist2);
}

TEST_CASE("--help enumerates every flag") {
    RunResult r = run_cli("parameterize --help");
    CHECK(r.exit_code == 0);
    for (const char* flag : {"--eps", "--max-iter", "--format", "--output",
                             "--report", "--histogram", "--verbose",
                             "--check-only", "--seed"})
        CHECK(r.out.find(flag) != std::string::npos);
    RunResult top = run_cli("--help");
    CHECK(top.exit_code == 0);
    for (const char* sub : {"parameterize", "check", "metrics"})
        CHECK(top.out.find(sub) != std::string::npos);
}

#endif  // DISKCONF_CLI_PATH
