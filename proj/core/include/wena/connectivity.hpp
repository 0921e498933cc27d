#pragma once

#include "wena/ingest.hpp"
#include "wena/types.hpp"

#include <string>
#include <vector>

namespace wena {

enum class FcMethod { Pearson, MutualInformation, DistanceCorrelation };

const char* fc_method_name(FcMethod method);
FcMethod parse_fc_method(const std::string& name);

/// Dense N x N association matrix. Diagonal holds the method's
/// self-association value: 1 for Pearson and distance correlation, the
/// column's marginal entropy for mutual information.
struct ConnectivityMatrix {
    Matrix values;
    FcMethod method = FcMethod::Pearson;
    Eigen::Index n() const { return values.rows(); }
};

/// Upper-triangle edge weights in row-major (i<j) order; length N(N-1)/2.
struct EdgeVector {
    Vector values;
    Eigen::Index n_rois = 0;
};

struct SparseEdge {
    Eigen::Index i = 0;
    Eigen::Index j = 0;  // i < j
    double weight = 0.0;
};

/// Proportionally thresholded weighted graph; weights are the absolute FC
/// magnitudes of the retained edges.
struct SparseNetwork {
    Eigen::Index n = 0;
    std::vector<SparseEdge> edges;
    double retained_fraction = 0.0;
};

/// Pairwise association of all ROI columns.
///  - Pearson: product-moment correlation; zero-variance column -> ConstantSeries.
///  - MutualInformation: plug-in estimator on equal-width marginal bins, nats.
///  - DistanceCorrelation: biased sample version via double-centered distance
///    matrices; a constant series is defined to have dCor 0.
ConnectivityMatrix compute_fc(const TimeSeriesMatrix& ts, FcMethod method, int mi_bins = 16);

EdgeVector vectorize_edges(const ConnectivityMatrix& fc);

/// Retains the ceil(fraction * E) edges of largest |weight|; ties at the cut
/// go to lexicographically smaller (i, j).
SparseNetwork threshold_network(const ConnectivityMatrix& fc, double fraction = 0.20);

/// Column names for the cohort edge table ("edge_<i>_<j>").
std::vector<std::string> edge_feature_names(Eigen::Index n_rois);

/// Maps a flat upper-triangle index back to its (i, j) pair.
std::pair<Eigen::Index, Eigen::Index> edge_endpoints(Eigen::Index edge_index, Eigen::Index n_rois);

void write_connectivity_csv(const ConnectivityMatrix& fc, const std::string& path);
void write_edge_list_csv(const SparseNetwork& net, const std::string& path);

}  // namespace wena
