#include "wena/ingest.hpp"

#include "wena/csv.hpp"
#include "wena/error.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <set>

namespace wena {

CohortManifest load_manifest(const std::string& path) {
    const auto lines = csv::read_lines(path);
    if (lines.empty()) throw Error(ErrorCode::ParseError, path + ": empty manifest");

    const auto header = csv::split_line(lines[0]);
    auto find_col = [&](const std::string& name) -> std::optional<std::size_t> {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        return std::nullopt;
    };
    const auto id_col = find_col("subject_id");
    const auto ts_col = find_col("timeseries_path");
    const auto score_col = find_col("score");
    if (!id_col) throw Error(ErrorCode::MissingColumn, "subject_id");
    if (!ts_col) throw Error(ErrorCode::MissingColumn, "timeseries_path");
    if (!score_col) throw Error(ErrorCode::MissingColumn, "score");
    const auto motion_col = find_col("motion_path");

    CohortManifest manifest;
    std::vector<std::size_t> covariate_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i == *id_col || i == *ts_col || i == *score_col) continue;
        if (motion_col && i == *motion_col) continue;
        manifest.covariate_names.push_back(header[i]);
        covariate_cols.push_back(i);
    }

    std::set<std::string> seen_ids;
    for (std::size_t li = 1; li < lines.size(); ++li) {
        if (lines[li].empty()) continue;
        const auto fields = csv::split_line(lines[li]);
        if (fields.size() != header.size()) {
            throw Error(ErrorCode::ParseError,
                        path + ": row " + std::to_string(li + 1) + " has " +
                            std::to_string(fields.size()) + " fields, header has " +
                            std::to_string(header.size()));
        }
        SubjectRecord record;
        record.id = fields[*id_col];
        record.timeseries_path = fields[*ts_col];
        if (record.timeseries_path.empty())
            throw Error(ErrorCode::ParseError, "empty timeseries_path for subject " + record.id);
        if (!seen_ids.insert(record.id).second)
            throw Error(ErrorCode::DuplicateSubject, record.id);

        const auto score = csv::parse_number(fields[*score_col]);
        if (!score || !std::isfinite(*score))
            throw Error(ErrorCode::ParseError,
                        "non-numeric score for subject " + record.id + ": '" +
                            fields[*score_col] + "'");
        record.score = *score;

        if (motion_col && !fields[*motion_col].empty())
            record.motion_path = fields[*motion_col];

        for (std::size_t c = 0; c < covariate_cols.size(); ++c) {
            const auto v = csv::parse_number(fields[covariate_cols[c]]);
            if (!v || !std::isfinite(*v))
                throw Error(ErrorCode::ParseError,
                            "non-numeric covariate '" + manifest.covariate_names[c] +
                                "' for subject " + record.id);
            record.covariates[manifest.covariate_names[c]] = *v;
        }
        manifest.subjects.push_back(std::move(record));
    }
    return manifest;
}

void write_manifest(const CohortManifest& manifest, const std::string& path) {
    const bool any_motion = std::any_of(manifest.subjects.begin(), manifest.subjects.end(),
                                        [](const SubjectRecord& s) { return s.motion_path.has_value(); });
    std::vector<std::string> header = {"subject_id", "timeseries_path", "score"};
    if (any_motion) header.push_back("motion_path");
    header.insert(header.end(), manifest.covariate_names.begin(), manifest.covariate_names.end());

    std::string out = csv::join_line(header) + "\n";
    for (const auto& s : manifest.subjects) {
        std::vector<std::string> fields = {s.id, s.timeseries_path, csv::format_number(s.score)};
        if (any_motion) fields.push_back(s.motion_path.value_or(""));
        for (const auto& name : manifest.covariate_names) {
            const auto it = s.covariates.find(name);
            if (it == s.covariates.end())
                throw Error(ErrorCode::MissingColumn,
                            "covariate '" + name + "' missing for subject " + s.id);
            fields.push_back(csv::format_number(it->second));
        }
        out += csv::join_line(fields) + "\n";
    }
    csv::write_text(path, out);
}

TimeSeriesMatrix load_timeseries(const std::string& path, Eigen::Index expected_n) {
    auto table = csv::read_numeric_table(path);
    if (expected_n > 0 && table.values.cols() != expected_n) {
        throw Error(ErrorCode::RoiCountMismatch,
                    path + ": expected " + std::to_string(expected_n) + " ROI columns, got " +
                        std::to_string(table.values.cols()));
    }
    if (table.values.rows() < 3)
        throw Error(ErrorCode::TooFewTimePoints, path + ": need at least 3 time points");
    if (table.values.cols() < 2)
        throw Error(ErrorCode::ParseError, path + ": need at least 2 ROI columns");
    return TimeSeriesMatrix{std::move(table.values)};
}

MotionTrace load_motion(const std::string& path) {
    auto table = csv::read_numeric_table(path);
    if (table.values.cols() != 6)
        throw Error(ErrorCode::ParseError,
                    path + ": motion trace must have 6 columns, got " +
                        std::to_string(table.values.cols()));
    if (table.values.rows() < 2)
        throw Error(ErrorCode::TooFewTimePoints, path + ": motion trace needs M >= 2");
    return MotionTrace{std::move(table.values)};
}

double head_motion(const MotionTrace& trace) {
    const Eigen::Index m = trace.m();
    if (m < 2) throw Error(ErrorCode::TooFewTimePoints, "head_motion needs M >= 2");
    double total = 0.0;
    for (Eigen::Index i = 1; i < m; ++i) {
        const Eigen::RowVectorXd delta = trace.values.row(i) - trace.values.row(i - 1);
        total += delta.norm();
    }
    return total / static_cast<double>(m - 1);
}

std::pair<CohortManifest, QcReport> qc_filter(const CohortManifest& manifest,
                                              const QcThresholds& thresholds) {
    CohortManifest retained;
    retained.roi_count = manifest.roi_count;
    retained.score_name = manifest.score_name;
    retained.covariate_names = manifest.covariate_names;
    QcReport report;

    for (const auto& subject : manifest.subjects) {
        if (!subject.motion_path) {
            report.warnings.push_back(subject.id);
            retained.subjects.push_back(subject);
            continue;
        }
        const MotionTrace trace = load_motion(*subject.motion_path);
        const double max_translation =
            trace.values.leftCols(3).array().abs().maxCoeff();
        const double max_rotation = trace.values.rightCols(3).array().abs().maxCoeff();
        const double mean_fd = head_motion(trace);

        if (max_translation > thresholds.max_translation_mm) {
            report.exclusions.push_back({subject.id, "TranslationExceeded", max_translation,
                                         thresholds.max_translation_mm});
        } else if (max_rotation > thresholds.max_rotation_deg) {
            report.exclusions.push_back(
                {subject.id, "RotationExceeded", max_rotation, thresholds.max_rotation_deg});
        } else if (mean_fd > thresholds.max_mean_fd) {
            report.exclusions.push_back(
                {subject.id, "MeanFdExceeded", mean_fd, thresholds.max_mean_fd});
        } else {
            retained.subjects.push_back(subject);
        }
    }
    return {std::move(retained), std::move(report)};
}

std::string qc_report_to_json(const QcReport& report) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : report.exclusions) {
        arr.push_back({{"subject_id", e.subject_id},
                       {"rule", e.rule},
                       {"value", e.value},
                       {"threshold", e.threshold}});
    }
    return arr.dump(2);
}

TimeSeriesMatrix detrend(const TimeSeriesMatrix& ts) {
    const Eigen::Index t = ts.t();
    if (t < 3) throw Error(ErrorCode::TooFewTimePoints, "detrend needs T >= 3");

    // Least-squares line a + b*i per column, via the closed-form normal
    // equations on the index regressor.
    Vector idx(t);
    for (Eigen::Index i = 0; i < t; ++i) idx(i) = static_cast<double>(i);
    const double idx_mean = idx.mean();
    const Vector idx_centered = idx.array() - idx_mean;
    const double sxx = idx_centered.squaredNorm();

    TimeSeriesMatrix out{ts.values};
    for (Eigen::Index j = 0; j < ts.n(); ++j) {
        const double col_mean = ts.values.col(j).mean();
        const double slope = idx_centered.dot(ts.values.col(j)) / sxx;
        out.values.col(j) =
            ts.values.col(j).array() - col_mean - slope * idx_centered.array();
    }
    return out;
}

}  // namespace wena
