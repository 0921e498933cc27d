#pragma once

#include "wena/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace wena {

struct FoldMetrics {
    int fold = 0;
    double mae = 0.0;
    std::optional<double> r;  // empty when undefined (a constant side)
    double r2 = 0.0;
};

struct MetricsReport {
    double mae = 0.0;
    std::optional<double> r;
    double r2 = 0.0;
    Eigen::Index n = 0;
    std::vector<FoldMetrics> per_fold;
};

/// mae = mean |y - yhat|; r = Pearson (undefined-flagged when either side is
/// constant); r2 = 1 - SS_res/SS_tot, the coefficient of determination (can
/// be negative).
MetricsReport compute_metrics(const Vector& y, const Vector& yhat);

struct FoldAssignment {
    int k = 0;
    std::vector<int> assignment;  // length S, values in [0, k)

    std::vector<std::vector<Eigen::Index>> fold_rows() const;
    std::vector<Eigen::Index> train_rows(int fold) const;
};

/// Seeded permutation dealt round-robin; fold sizes differ by at most one.
FoldAssignment kfold_split(Eigen::Index s, int k = 10, std::uint64_t seed = 0);

/// Trains on train_rows, returns predictions for test_rows (in order).
using FoldPredictor = std::function<Vector(const std::vector<Eigen::Index>& train_rows,
                                           const std::vector<Eigen::Index>& test_rows, int fold,
                                           std::uint64_t fold_seed)>;

struct CrossValidationResult {
    MetricsReport metrics;       // pooled, with per_fold filled
    Vector oof_predictions;      // length S
    FoldAssignment folds;
};

/// Outer CV harness: pooled out-of-fold predictions scored by
/// compute_metrics. Folds may run in parallel; per-fold seeds are derived
/// from (seed, fold) so the result is independent of scheduling.
CrossValidationResult cross_validate(const Vector& y, int k, std::uint64_t seed,
                                     const FoldPredictor& predictor, std::size_t threads = 1);

struct RrelieffResult {
    Vector scores;                        // one relevance score per feature
    std::vector<Eigen::Index> ranking;    // feature indices, best first
};

/// RReliefF relevance estimation for a regression target: k nearest
/// neighbors per sampled instance, exponential distance-rank weighting
/// (sigma = k/3), features min-max normalized internally.
/// sample_count == 0 uses every instance (deterministic default).
RrelieffResult rrelieff_rank(const Matrix& x, const Vector& y, int k_neighbors = 10,
                             Eigen::Index sample_count = 0, std::uint64_t seed = 0);

struct CovariateCorrelation {
    std::optional<double> r;  // empty for zero-variance features
    double p = 1.0;
};

/// Pearson r of each feature against the covariate with a two-sided
/// t-distribution p-value (S-2 dof).
std::vector<CovariateCorrelation> covariate_correlation(const Matrix& features,
                                                        const Vector& covariate);

}  // namespace wena
