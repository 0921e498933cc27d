#pragma once

#include "wena/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace wena {

/// Per-feature min-max scaler fit on training rows. Transform maps into
/// [0, 1] (clipping unseen out-of-range values); constant features map to 0.5.
class Normalizer {
  public:
    Normalizer() = default;
    static Normalizer fit(const Matrix& train);

    Matrix transform(const Matrix& x) const;
    Vector transform_row(const Vector& x) const;
    Eigen::Index dim() const { return mins_.size(); }

    const Vector& mins() const { return mins_; }
    const Vector& maxs() const { return maxs_; }
    static Normalizer from_bounds(Vector mins, Vector maxs);

  private:
    Vector mins_;
    Vector maxs_;
};

struct AeConfig {
    int hidden = 50;
    int epochs = 500;
    double learning_rate = 0.1;
    double momentum = 0.9;
    double epsilon = 1e-4;  // weight-decay coefficient
    bool decay_decoder = true;
    std::uint64_t seed = 0;
};

/// Two-layer sigmoid autoencoder: h = sigma(W x + b), r = sigma(W' h + b').
struct AeModel {
    Matrix weights_enc;  // hidden x input
    Vector bias_enc;     // hidden
    Matrix weights_dec;  // input x hidden
    Vector bias_dec;     // input
    Normalizer normalizer;
    AeConfig config;
    double final_loss = 0.0;

    Eigen::Index input_dim() const { return weights_enc.cols(); }
    Eigen::Index hidden_dim() const { return weights_enc.rows(); }
};

struct AeGradients {
    Matrix weights_enc;
    Vector bias_enc;
    Matrix weights_dec;
    Vector bias_dec;
};

/// h = sigma(W x + b); x is one already-normalized row.
Vector ae_encode(const AeModel& model, const Vector& x);

/// r = sigma(W' h + b').
Vector ae_decode(const AeModel& model, const Vector& h);

/// Mean per-row squared reconstruction error plus the weight-decay penalty
/// epsilon * (||W||_F^2 [+ ||W'||_F^2]). Rows of x are normalized inputs.
double ae_loss(const AeModel& model, const Matrix& x);

/// Exact analytic gradient of ae_loss (backprop through both sigmoid layers).
AeGradients ae_gradient(const AeModel& model, const Matrix& x);

/// Full-batch gradient descent with momentum; normalizer fit on `train` only;
/// uniform +-sqrt(6/(fan_in+fan_out)) init from the seeded generator.
/// Deterministic given config.seed. Throws Diverged if the loss leaves the
/// finite range.
AeModel ae_train(const FeatureMatrix& train, const AeConfig& config);

/// Normalize-then-encode every cohort row; columns named ae_000...
FeatureMatrix ae_features(const AeModel& model, const FeatureMatrix& cohort);

struct PatternEdge {
    Eigen::Index i = 0;
    Eigen::Index j = 0;
    double weight = 0.0;  // signed encoder weight
};

struct PatternRoi {
    Eigen::Index roi = 0;
    std::string label;
    double importance = 0.0;  // sum of incident |weight|
};

/// Back-projects one hidden unit's encoder weight row onto named edges and
/// per-ROI importances, both sorted by magnitude descending.
struct PatternReport {
    Eigen::Index hidden_index = 0;
    std::vector<PatternEdge> edges;
    std::vector<PatternRoi> rois;
};

PatternReport extract_pattern(const AeModel& model, Eigen::Index hidden_index,
                              Eigen::Index n_rois,
                              const std::vector<std::string>& roi_labels = {});

/// Train-mean-centered PCA projection of the cohort onto the top
/// `components` eigenvectors of the training covariance. Deterministic sign:
/// each loading's largest-|entry| coordinate is made positive.
FeatureMatrix pca_fit_transform(const FeatureMatrix& train, const FeatureMatrix& cohort,
                                int components = 50);

std::string ae_model_to_json(const AeModel& model);
AeModel ae_model_from_json(const std::string& text);
void save_ae_model(const AeModel& model, const std::string& path);
AeModel load_ae_model(const std::string& path);

}  // namespace wena
