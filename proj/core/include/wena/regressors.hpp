#pragma once

#include "wena/types.hpp"

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <variant>
#include <vector>

namespace wena {

enum class RegressorKind { Ridge, EnsembleTree, Svr, Elm };

const char* regressor_kind_name(RegressorKind kind);
RegressorKind parse_regressor_kind(const std::string& name);

/// Declarative model request: kind + hyperparameter overrides + seed.
/// Unset hyperparameters take the documented defaults.
struct RegressorSpec {
    RegressorKind kind = RegressorKind::Ridge;
    std::map<std::string, double> hyper;
    std::uint64_t seed = 0;

    double get(const std::string& name, double fallback) const {
        const auto it = hyper.find(name);
        return it == hyper.end() ? fallback : it->second;
    }
};

struct RidgeModel {
    Vector beta;
    double intercept = 0.0;
};

struct TreeNode {
    // feature < 0 marks a leaf
    int feature = -1;
    double threshold = 0.0;
    double value = 0.0;
    int left = -1;
    int right = -1;
};

struct TreeModel {
    std::vector<TreeNode> nodes;
};

struct EtrModel {
    std::vector<TreeModel> trees;
};

struct SvrModel {
    Matrix support_vectors;  // rows are z-scored support vectors
    Vector coefficients;     // alpha - alpha*
    double bias = 0.0;
    double gamma = 0.0;
    Vector feature_means;
    Vector feature_scales;
};

struct ElmModel {
    Matrix input_weights;  // hidden x features
    Vector input_bias;
    Vector output_weights;
    double intercept = 0.0;
    Vector feature_means;
    Vector feature_scales;
};

class TrainedRegressor {
  public:
    TrainedRegressor() = default;
    TrainedRegressor(RegressorKind kind, Eigen::Index feature_dim,
                     std::variant<RidgeModel, EtrModel, SvrModel, ElmModel> model)
        : kind_(kind), feature_dim_(feature_dim), model_(std::move(model)) {}

    RegressorKind kind() const { return kind_; }
    Eigen::Index feature_dim() const { return feature_dim_; }

    Vector predict(const Matrix& x) const;
    double predict_one(const Vector& x) const;

    template <typename T>
    const T& as() const { return std::get<T>(model_); }

  private:
    RegressorKind kind_ = RegressorKind::Ridge;
    Eigen::Index feature_dim_ = 0;
    std::variant<RidgeModel, EtrModel, SvrModel, ElmModel> model_;
};

/// (Xc' Xc + lambda I) beta = Xc' yc on centered data; unpenalized intercept.
TrainedRegressor fit_ridge(const Matrix& x, const Vector& y, double lambda = 1.0);

/// Bagged variance-reduction regression trees. Splits scan all features and
/// the midpoints between sorted unique values; prediction is the mean over
/// trees. Deterministic given seed (per-tree seeds derived from it).
/// max_depth <= 0 means unbounded; bootstrap=false fits every tree on the
/// full sample.
TrainedRegressor fit_etr(const Matrix& x, const Vector& y, int trees = 100, int max_depth = 12,
                         int min_leaf = 3, std::uint64_t seed = 0, bool bootstrap = true);

/// Epsilon-insensitive SVR with RBF kernel, solved by SMO (maximal violating
/// pair) to KKT violation < tol. gamma <= 0 selects the 1/F default.
/// Features are z-scored internally.
TrainedRegressor fit_svr(const Matrix& x, const Vector& y, double c = 10.0,
                         double epsilon_tube = 0.1, double gamma = 0.0, double tol = 1e-3,
                         std::uint64_t seed = 0, long max_iterations = 0);

/// Extreme learning machine: seeded uniform(+-1) random hidden layer, sigmoid
/// activation, ridge-solved output weights, unpenalized intercept.
TrainedRegressor fit_elm(const Matrix& x, const Vector& y, int hidden = 200,
                         double lambda = 1e-2, std::uint64_t seed = 0);

/// Dispatch on spec.kind with spec.hyper overrides.
TrainedRegressor fit_regressor(const Matrix& x, const Vector& y, const RegressorSpec& spec);

std::string regressor_to_json(const TrainedRegressor& model);
TrainedRegressor regressor_from_json(const std::string& text);

}  // namespace wena
