#pragma once

#include "wena/types.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace wena {

struct SubjectRecord {
    std::string id;
    std::string timeseries_path;
    std::optional<std::string> motion_path;
    double score = 0.0;
    std::map<std::string, double> covariates;
};

struct CohortManifest {
    std::vector<SubjectRecord> subjects;
    Eigen::Index roi_count = 0;  // 0 until a time series has been loaded
    std::string score_name = "score";
    std::vector<std::string> covariate_names;  // preserves manifest column order
};

/// One subject's T x N ROI signal matrix.
struct TimeSeriesMatrix {
    Matrix values;
    Eigen::Index t() const { return values.rows(); }
    Eigen::Index n() const { return values.cols(); }
};

/// M x 6 motion parameters: columns 0-2 translations (mm), 3-5 rotations (deg).
struct MotionTrace {
    Matrix values;
    Eigen::Index m() const { return values.rows(); }
};

struct QcThresholds {
    double max_translation_mm = 2.5;
    double max_rotation_deg = 2.5;
    double max_mean_fd = 0.5;
};

struct QcExclusion {
    std::string subject_id;
    std::string rule;  // TranslationExceeded | RotationExceeded | MeanFdExceeded
    double value = 0.0;
    double threshold = 0.0;
};

struct QcReport {
    std::vector<QcExclusion> exclusions;
    std::vector<std::string> warnings;  // subjects that passed without motion data
};

/// Manifest CSV: header row with subject_id, timeseries_path, score,
/// optional motion_path; any other column becomes a named covariate.
CohortManifest load_manifest(const std::string& path);

/// Inverse of load_manifest; loading the written file reproduces the
/// manifest bit-exactly (shortest round-trip number formatting).
void write_manifest(const CohortManifest& manifest, const std::string& path);

TimeSeriesMatrix load_timeseries(const std::string& path, Eigen::Index expected_n);

MotionTrace load_motion(const std::string& path);

/// Mean framewise displacement magnitude over the six parameters:
/// (1/(M-1)) * sum_{i=2..M} sqrt(sum_k (d_{k,i} - d_{k,i-1})^2).
double head_motion(const MotionTrace& trace);

/// Drops subjects whose motion violates any threshold. Subjects without a
/// motion file pass with a warning.
std::pair<CohortManifest, QcReport> qc_filter(const CohortManifest& manifest,
                                              const QcThresholds& thresholds = {});

std::string qc_report_to_json(const QcReport& report);

/// Removes each column's least-squares linear trend (and mean).
TimeSeriesMatrix detrend(const TimeSeriesMatrix& ts);

}  // namespace wena
