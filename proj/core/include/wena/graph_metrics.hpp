#pragma once

#include "wena/connectivity.hpp"
#include "wena/types.hpp"

#include <vector>

namespace wena {

/// Per-node graph indices of the thresholded network, plus the flattened
/// [degree | strength | local_efficiency | betweenness] vector fed downstream.
struct GraphIndexVector {
    Vector degree;
    Vector strength;
    Vector local_efficiency;
    Vector betweenness;
    Vector flattened;  // length 4N
};

/// Count of retained edges incident to each node.
Vector degree_centrality(const SparseNetwork& net);

/// Sum of incident edge weights; weights must be nonnegative.
Vector node_strength(const SparseNetwork& net);

/// Unnormalized weighted betweenness (edge length = 1/weight, Brandes
/// accumulation); each unordered pair counted once, endpoints excluded,
/// disconnected pairs contribute nothing.
Vector betweenness_centrality(const SparseNetwork& net);

/// Latora-Marchiori local efficiency: mean inverse weighted shortest-path
/// distance among each node's neighbors, within their induced subgraph;
/// 0 for nodes with fewer than two neighbors.
Vector local_efficiency(const SparseNetwork& net);

GraphIndexVector assemble_graph_features(const SparseNetwork& net);

/// Cohort CSV header: deg_000.. str_000.. leff_000.. btw_000..
std::vector<std::string> graph_feature_names(Eigen::Index n_rois);

}  // namespace wena
