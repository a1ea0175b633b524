#pragma once

#include <iosfwd>
#include <string>

#include "diskconf/mesh.hpp"

namespace diskconf {

struct StageTimings {
    double harmonic_s = 0.0;
    double north_pole_s = 0.0;
    double south_pole_s = 0.0;
    double metrics_s = 0.0;
    double total_s = 0.0;
};

/// 100 uniform bins over |mu| in [0,1) plus a flagged sentinel bin for
/// |mu| >= 1. counts.sum() + overflow equals the face count.
struct MuHistogram {
    std::vector<double> edges;  // 101 edges, i/100
    std::vector<long> counts;   // 100 bins
    long overflow = 0;
    bool overflow_flagged = false;
};

struct QualityReport {
    int vertex_count = 0;
    int face_count = 0;
    int boundary_count = 0;

    double mean_mu = 0.0;
    double sd_mu = 0.0;
    double max_mu = 0.0;
    double maximal_dilation = 0.0;  // +inf when max_mu >= 1
    double boundary_circularity = 0.0;  // sum over boundary of |1 - |z|^2|

    std::vector<int> flipped_faces;  // image signed area <= 0
    bool criteria_agree = true;      // flipped set matches the |mu| >= 1 set
    bool bijective = false;

    std::vector<double> energy_trace;  // mean |mu| per pipeline stage
    int iterations = 0;
    bool converged = false;
    bool nondecreasing_warning = false;
    double pre_projection_deviation = 0.0;

    MuHistogram histogram;
    StageTimings timings;

    /// Area-weighted variants, reported alongside the plain face statistics
    /// but never substituted for them.
    double area_weighted_mean_mu = 0.0;
    double area_weighted_sd_mu = 0.0;
};

/// Metrics of a parameterization. Degenerate faces produce report entries
/// (infinite |mu|, flipped flags), never failures.
QualityReport compute_report(const TriangleMesh& mesh, const PlanarMap& phi,
                             const std::vector<double>& energy_trace = {},
                             const StageTimings& timings = {});

enum class ReportFormat { JSON, CSV };

void export_report(std::ostream& out, const QualityReport& report, ReportFormat format);
void export_report(const QualityReport& report, const std::string& path,
                   ReportFormat format);

/// Histogram as (edge, count) rows; one more edge entry than counts, the last
/// edge being "inf" for the sentinel bin.
void export_histogram_csv(std::ostream& out, const MuHistogram& histogram);

QualityReport parse_report_json(std::istream& in);

}  // namespace diskconf
