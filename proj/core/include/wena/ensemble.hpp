#pragma once

#include "wena/regressors.hpp"
#include "wena/types.hpp"

#include <string>
#include <vector>

namespace wena {

/// Out-of-fold performance of one prediction stream.
struct StreamScore {
    double correlation = 0.0;
    double mae = 0.0;
    bool degenerate = false;  // Pearson undefined (a constant side)
};

struct FeatureBlock {
    std::string name;
    FeatureMatrix features;
};

struct StackConfig {
    int layers = 2;  // total depth including the fusion layer; valid range [2, 4]
    std::vector<RegressorSpec> first_layer_models;  // default {etr, ridge}
    std::vector<RegressorSpec> inner_models;        // default {etr, ridge}
    std::vector<RegressorSpec> fusion_models;       // default {etr, ridge}
    int inner_folds = 5;
    std::uint64_t seed = 0;
    bool resubstitution = false;  // score streams on resubstitution predictions
};

StackConfig default_stack_config();

/// One fitted stream inside a stack layer: its deployment model plus the
/// out-of-fold score and weight assigned to its prediction column.
struct StackStream {
    std::string name;
    int block_index = -1;  // >= 0 only in the first layer
    RegressorSpec spec;
    TrainedRegressor model;
    StreamScore score;
    double weight = 0.0;
};

struct TrainedStack {
    StackConfig config;
    std::vector<std::string> block_names;
    std::vector<Eigen::Index> block_dims;
    std::vector<std::vector<StackStream>> layers;  // layers[0] = first layer
    std::vector<StackStream> fusion;               // weights from Eq. 6 (or the lone meta-model)
    bool conventional = false;
    bool weights_clamped = false;  // some stream correlation hit the positivity floor
};

/// Stream weights W_i = (R_i/MAE_i) / sum_k (R_k/MAE_k). With
/// clamp_negative (the stacking default) correlations are floored at 1e-6 so
/// weights stay nonnegative; without it a zero ratio sum raises
/// DegenerateWeights.
Vector weight_operator(const std::vector<StreamScore>& scores, bool clamp_negative = true,
                       bool* clamped = nullptr);

/// Identical formula applied to the final-layer model scores.
Vector fusion_operator(const std::vector<StreamScore>& scores, bool clamp_negative = true,
                       bool* clamped = nullptr);

struct OofResult {
    Vector predictions;
    StreamScore score;
};

/// Deterministic k-fold out-of-fold predictions: each row is predicted by a
/// model whose training fold excluded it.
OofResult out_of_fold_predictions(const Matrix& x, const Vector& y, const RegressorSpec& spec,
                                  int folds, std::uint64_t seed);

/// Fits the weighted stack: per-(block, model) first-layer streams, Eq. 5
/// weighted prediction columns feeding optional middle layers, Eq. 6 fusion
/// of the final-layer models. Models are refit on all rows for deployment;
/// weights keep their out-of-fold estimates.
TrainedStack fit_weighted_stack(const std::vector<FeatureBlock>& blocks, const Vector& y,
                                const StackConfig& config);

/// Conventional stacking baseline: all stream weights forced to 1 and a
/// single meta-model in place of the weighted fusion.
TrainedStack fit_conventional_stack(const std::vector<FeatureBlock>& blocks, const Vector& y,
                                    const RegressorSpec& meta_model, const StackConfig& config);

Vector predict_stack(const TrainedStack& stack, const std::vector<FeatureBlock>& blocks);

std::string stack_to_json(const TrainedStack& stack);
TrainedStack stack_from_json(const std::string& text);
void save_stack(const TrainedStack& stack, const std::string& path);
TrainedStack load_stack(const std::string& path);

}  // namespace wena
