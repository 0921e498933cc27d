#pragma once

#include <Eigen/Core>

#include <cstdio>
#include <string>
#include <vector>

namespace wena {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cohort-level feature table: one row per subject, named columns.
struct FeatureMatrix {
    Matrix values;
    std::vector<std::string> names;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index cols() const { return values.cols(); }
};

inline FeatureMatrix make_feature_matrix(Matrix values, const std::string& name_prefix) {
    FeatureMatrix fm;
    fm.names.reserve(static_cast<std::size_t>(values.cols()));
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%03d", static_cast<int>(j));
        fm.names.push_back(name_prefix + buf);
    }
    fm.values = std::move(values);
    return fm;
}

/// Horizontal concatenation; all blocks must have the same row count.
inline FeatureMatrix concat_features(const std::vector<FeatureMatrix>& blocks) {
    FeatureMatrix out;
    if (blocks.empty()) return out;
    Eigen::Index cols = 0;
    for (const auto& b : blocks) cols += b.cols();
    out.values.resize(blocks.front().rows(), cols);
    Eigen::Index offset = 0;
    for (const auto& b : blocks) {
        out.values.middleCols(offset, b.cols()) = b.values;
        out.names.insert(out.names.end(), b.names.begin(), b.names.end());
        offset += b.cols();
    }
    return out;
}

}  // namespace wena
