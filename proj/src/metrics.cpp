#include "diskconf/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>

#include <json.hpp>

#include "diskconf/beltrami.hpp"

namespace diskconf {

namespace {

double image_signed_area(const PlanarMap& phi, const Face& f) {
    const auto& a = phi[f[0]];
    const auto& b = phi[f[1]];
    const auto& c = phi[f[2]];
    return 0.5 * ((b.real() - a.real()) * (c.imag() - a.imag()) -
                  (c.real() - a.real()) * (b.imag() - a.imag()));
}

}  // namespace

QualityReport compute_report(const TriangleMesh& mesh, const PlanarMap& phi,
                             const std::vector<double>& energy_trace,
                             const StageTimings& timings) {
    QualityReport report;
    report.vertex_count = mesh.vertex_count();
    report.face_count = mesh.face_count();
    report.boundary_count = static_cast<int>(mesh.boundary_loop().size());
    report.energy_trace = energy_trace;
    report.timings = timings;

    BeltramiField mu = beltrami_of_map(mesh, phi);
    const int nf = mesh.face_count();

    // Welford accumulation; the tests cross-check against a two-pass oracle.
    double mean = 0.0, m2 = 0.0, maxm = 0.0;
    double wsum = 0.0, wmean = 0.0, wm2 = 0.0;
    for (int t = 0; t < nf; ++t) {
        double m = std::abs(mu[t]);
        double delta = m - mean;
        mean += delta / (t + 1);
        m2 += delta * (m - mean);
        maxm = std::max(maxm, m);

        double w = mesh.face_area(t);
        wsum += w;
        double wdelta = m - wmean;
        wmean += (w / wsum) * wdelta;
        wm2 += w * wdelta * (m - wmean);
    }
    report.mean_mu = nf > 0 ? mean : 0.0;
    report.sd_mu = nf > 0 ? std::sqrt(m2 / nf) : 0.0;
    report.max_mu = maxm;
    report.maximal_dilation = maxm < 1.0 ? (1.0 + maxm) / (1.0 - maxm)
                                         : std::numeric_limits<double>::infinity();
    report.area_weighted_mean_mu = wsum > 0.0 ? wmean : 0.0;
    report.area_weighted_sd_mu = wsum > 0.0 ? std::sqrt(wm2 / wsum) : 0.0;

    for (int v : mesh.boundary_loop())
        report.boundary_circularity += std::abs(1.0 - std::norm(phi[v]));

    // Bijectivity by two routes: image orientation and |mu| < 1. Zero-area
    // image faces count as flipped under both.
    std::vector<int> flipped_mu;
    for (int t = 0; t < nf; ++t) {
        if (image_signed_area(phi, mesh.faces()[t]) <= 0.0)
            report.flipped_faces.push_back(t);
        if (!(std::abs(mu[t]) < 1.0)) flipped_mu.push_back(t);
    }
    report.criteria_agree = report.flipped_faces == flipped_mu;
    report.bijective = report.flipped_faces.empty() && flipped_mu.empty();

    report.histogram.edges.resize(101);
    for (int i = 0; i <= 100; ++i) report.histogram.edges[i] = i / 100.0;
    report.histogram.counts.assign(100, 0);
    for (int t = 0; t < nf; ++t) {
        double m = std::abs(mu[t]);
        if (m >= 1.0 || !std::isfinite(m)) {
            report.histogram.overflow++;
        } else {
            int bin = std::min(static_cast<int>(m * 100.0), 99);
            report.histogram.counts[bin]++;
        }
    }
    report.histogram.overflow_flagged = report.histogram.overflow > 0;
    return report;
}

namespace {

using nlohmann::ordered_json;

ordered_json report_to_json(const QualityReport& r) {
    ordered_json j;
    j["mesh"] = {{"vertices", r.vertex_count},
                 {"faces", r.face_count},
                 {"boundary_vertices", r.boundary_count}};
    j["mean_mu"] = r.mean_mu;
    j["sd_mu"] = r.sd_mu;
    j["max_mu"] = r.max_mu;
    // JSON has no infinity literal.
    if (std::isfinite(r.maximal_dilation))
        j["maximal_dilation"] = r.maximal_dilation;
    else
        j["maximal_dilation"] = nullptr;
    j["boundary_circularity"] = r.boundary_circularity;
    j["flipped_faces"] = r.flipped_faces;
    j["criteria_agree"] = r.criteria_agree;
    j["bijective"] = r.bijective;
    j["energy_trace"] = r.energy_trace;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    j["nondecreasing_warning"] = r.nondecreasing_warning;
    j["pre_projection_deviation"] = r.pre_projection_deviation;
    j["histogram"] = {{"bin_edges", r.histogram.edges},
                      {"counts", r.histogram.counts},
                      {"overflow", r.histogram.overflow},
                      {"overflow_flagged", r.histogram.overflow_flagged}};
    j["timings"] = {{"harmonic_s", r.timings.harmonic_s},
                    {"north_pole_s", r.timings.north_pole_s},
                    {"south_pole_s", r.timings.south_pole_s},
                    {"metrics_s", r.timings.metrics_s},
                    {"total_s", r.timings.total_s}};
    j["area_weighted_mean_mu"] = r.area_weighted_mean_mu;
    j["area_weighted_sd_mu"] = r.area_weighted_sd_mu;
    return j;
}

std::string csv_num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

void export_histogram_csv(std::ostream& out, const MuHistogram& h) {
    out << "edge,count\n";
    for (size_t i = 0; i < h.counts.size(); ++i)
        out << csv_num(h.edges[i]) << ',' << h.counts[i] << '\n';
    out << csv_num(h.edges.back()) << ',' << h.overflow << '\n';
    out << "inf\n";
}

void export_report(std::ostream& out, const QualityReport& r, ReportFormat format) {
    if (format == ReportFormat::JSON) {
        out << report_to_json(r).dump(2) << '\n';
        return;
    }
    out << "metric,value\n";
    out << "vertices," << r.vertex_count << '\n';
    out << "faces," << r.face_count << '\n';
    out << "boundary_vertices," << r.boundary_count << '\n';
    out << "mean_mu," << csv_num(r.mean_mu) << '\n';
    out << "sd_mu," << csv_num(r.sd_mu) << '\n';
    out << "max_mu," << csv_num(r.max_mu) << '\n';
    out << "maximal_dilation," << csv_num(r.maximal_dilation) << '\n';
    out << "boundary_circularity," << csv_num(r.boundary_circularity) << '\n';
    out << "flipped_count," << r.flipped_faces.size() << '\n';
    out << "criteria_agree," << (r.criteria_agree ? 1 : 0) << '\n';
    out << "bijective," << (r.bijective ? 1 : 0) << '\n';
    out << "iterations," << r.iterations << '\n';
    out << "converged," << (r.converged ? 1 : 0) << '\n';
    out << "pre_projection_deviation," << csv_num(r.pre_projection_deviation) << '\n';
    out << "area_weighted_mean_mu," << csv_num(r.area_weighted_mean_mu) << '\n';
    out << "area_weighted_sd_mu," << csv_num(r.area_weighted_sd_mu) << '\n';
    out << "\nenergy_trace\nstage,mean_mu\n";
    for (size_t i = 0; i < r.energy_trace.size(); ++i)
        out << i << ',' << csv_num(r.energy_trace[i]) << '\n';
    out << "\nhistogram\n";
    export_histogram_csv(out, r.histogram);
}

void export_report(const QualityReport& report, const std::string& path,
                   ReportFormat format) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    export_report(out, report, format);
    if (!out) throw IoError("write failed for " + path);
}

QualityReport parse_report_json(std::istream& in) {
    ordered_json j = ordered_json::parse(in);
    QualityReport r;
    r.vertex_count = j["mesh"]["vertices"];
    r.face_count = j["mesh"]["faces"];
    r.boundary_count = j["mesh"]["boundary_vertices"];
    r.mean_mu = j["mean_mu"];
    r.sd_mu = j["sd_mu"];
    r.max_mu = j["max_mu"];
    r.maximal_dilation = j["maximal_dilation"].is_null()
                             ? std::numeric_limits<double>::infinity()
                             : j["maximal_dilation"].get<double>();
    r.boundary_circularity = j["boundary_circularity"];
    r.flipped_faces = j["flipped_faces"].get<std::vector<int>>();
    r.criteria_agree = j["criteria_agree"];
    r.bijective = j["bijective"];
    r.energy_trace = j["energy_trace"].get<std::vector<double>>();
    r.iterations = j["iterations"];
    r.converged = j["converged"];
    r.nondecreasing_warning = j["nondecreasing_warning"];
    r.pre_projection_deviation = j["pre_projection_deviation"];
    r.histogram.edges = j["histogram"]["bin_edges"].get<std::vector<double>>();
    r.histogram.counts = j["histogram"]["counts"].get<std::vector<long>>();
    r.histogram.overflow = j["histogram"]["overflow"];
    r.histogram.overflow_flagged = j["histogram"]["overflow_flagged"];
    r.timings.harmonic_s = j["timings"]["harmonic_s"];
    r.timings.north_pole_s = j["timings"]["north_pole_s"];
    r.timings.south_pole_s = j["timings"]["south_pole_s"];
    r.timings.metrics_s = j["timings"]["metrics_s"];
    r.timings.total_s = j["timings"]["total_s"];
    r.area_weighted_mean_mu = j["area_weighted_mean_mu"];
    r.area_weighted_sd_mu = j["area_weighted_sd_mu"];
    return r;
}

}  // namespace diskconf
