#include "wena/evaluation.hpp"

#include "wena/error.hpp"
#include "wena/parallel.hpp"
#include "wena/rng.hpp"
#include "wena/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wena {

MetricsReport compute_metrics(const Vector& y, const Vector& yhat) {
    if (y.size() != yhat.size())
        throw Error(ErrorCode::DimensionMismatch, "compute_metrics: length mismatch");
    if (y.size() < 2) throw Error(ErrorCode::InvalidArgument, "compute_metrics needs S >= 2");

    MetricsReport report;
    report.n = y.size();
    report.mae = (y - yhat).array().abs().mean();
    report.r = pearson(y, yhat);

    const double y_mean = y.mean();
    const double ss_tot = (y.array() - y_mean).square().sum();
    const double ss_res = (y - yhat).squaredNorm();
    report.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : (ss_res == 0.0 ? 1.0 : 0.0);
    return report;
}

std::vector<std::vector<Eigen::Index>> FoldAssignment::fold_rows() const {
    std::vector<std::vector<Eigen::Index>> rows(static_cast<std::size_t>(k));
    for (std::size_t i = 0; i < assignment.size(); ++i)
        rows[static_cast<std::size_t>(assignment[i])].push_back(static_cast<Eigen::Index>(i));
    return rows;
}

std::vector<Eigen::Index> FoldAssignment::train_rows(int fold) const {
    std::vector<Eigen::Index> rows;
    rows.reserve(assignment.size());
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] != fold) rows.push_back(static_cast<Eigen::Index>(i));
    return rows;
}

FoldAssignment kfold_split(Eigen::Index s, int k, std::uint64_t seed) {
    if (k < 2) throw Error(ErrorCode::InvalidArgument, "kfold needs k >= 2");
    if (s < k) throw Error(ErrorCode::InvalidArgument, "kfold needs S >= k");

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(s));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    Rng rng(derive_seed(seed, 0x4b464f4cu));
    rng.shuffle(perm);

    FoldAssignment fa;
    fa.k = k;
    fa.assignment.resize(static_cast<std::size_t>(s));
    for (std::size_t pos = 0; pos < perm.size(); ++pos)
        fa.assignment[static_cast<std::size_t>(perm[pos])] = static_cast<int>(pos % k);
    return fa;
}

CrossValidationResult cross_validate(const Vector& y, int k, std::uint64_t seed,
                                     const FoldPredictor& predictor, std::size_t threads) {
    CrossValidationResult result;
    result.folds = kfold_split(y.size(), k, seed);
    result.oof_predictions.resize(y.size());
    const auto per_fold_rows = result.folds.fold_rows();

    std::vector<Vector> fold_predictions(static_cast<std::size_t>(k));
    parallel_for(static_cast<std::size_t>(k), threads, [&](std::size_t f) {
        const int fold = static_cast<int>(f);
        const auto train = result.folds.train_rows(fold);
        const auto& test = per_fold_rows[f];
        fold_predictions[f] = predictor(train, test, fold, derive_seed(seed, 0xf01d, f));
        if (fold_predictions[f].size() != static_cast<Eigen::Index>(test.size()))
            throw Error(ErrorCode::DimensionMismatch, "fold predictor returned wrong length");
    });

    for (int fold = 0; fold < k; ++fold) {
        const auto& test = per_fold_rows[static_cast<std::size_t>(fold)];
        for (std::size_t i = 0; i < test.size(); ++i)
            result.oof_predictions(test[i]) = fold_predictions[static_cast<std::size_t>(fold)](
                static_cast<Eigen::Index>(i));
    }

    result.metrics = compute_metrics(y, result.oof_predictions);
    for (int fold = 0; fold < k; ++fold) {
        const auto& test = per_fold_rows[static_cast<std::size_t>(fold)];
        Vector fy(static_cast<Eigen::Index>(test.size()));
        for (std::size_t i = 0; i < test.size(); ++i) fy(static_cast<Eigen::Index>(i)) = y(test[i]);
        const MetricsReport fm = compute_metrics(
            fy, fold_predictions[static_cast<std::size_t>(fold)]);
        result.metrics.per_fold.push_back({fold, fm.mae, fm.r, fm.r2});
    }
    return result;
}

RrelieffResult rrelieff_rank(const Matrix& x, const Vector& y, int k_neighbors,
                             Eigen::Index sample_count, std::uint64_t seed) {
    const Eigen::Index s = x.rows();
    const Eigen::Index f = x.cols();
    if (s != y.size()) throw Error(ErrorCode::DimensionMismatch, "rrelieff: X rows != y length");
    if (k_neighbors < 1) throw Error(ErrorCode::InvalidArgument, "k_neighbors must be >= 1");
    if (s <= k_neighbors)
        throw Error(ErrorCode::InvalidArgument, "rrelieff needs S > k_neighbors");

    // Min-max normalize features and target so diffs live on [0, 1].
    Matrix xn(s, f);
    for (Eigen::Index j = 0; j < f; ++j) {
        const double lo = x.col(j).minCoeff();
        const double range = x.col(j).maxCoeff() - lo;
        if (range > 0.0)
            xn.col(j) = (x.col(j).array() - lo) / range;
        else
            xn.col(j).setZero();
    }
    const double y_lo = y.minCoeff();
    const double y_range = y.maxCoeff() - y_lo;
    Vector yn = y_range > 0.0 ? Vector((y.array() - y_lo) / y_range) : Vector(Vector::Zero(s));

    std::vector<Eigen::Index> samples(static_cast<std::size_t>(s));
    std::iota(samples.begin(), samples.end(), Eigen::Index{0});
    if (sample_count > 0 && sample_count < s) {
        Rng rng(derive_seed(seed, 0x524c46u));
        rng.shuffle(samples);
        samples.resize(static_cast<std::size_t>(sample_count));
        std::sort(samples.begin(), samples.end());
    }
    const double m = static_cast<double>(samples.size());

    // Exponential rank weighting, sigma = k/3.
    const double sigma = static_cast<double>(k_neighbors) / 3.0;
    Vector rank_weight(k_neighbors);
    for (int q = 0; q < k_neighbors; ++q) {
        const double r = static_cast<double>(q + 1) / sigma;
        rank_weight(q) = std::exp(-r * r);
    }
    rank_weight /= rank_weight.sum();

    double n_dc = 0.0;
    Vector n_da = Vector::Zero(f);
    Vector n_dcda = Vector::Zero(f);

    std::vector<std::pair<double, Eigen::Index>> dist;
    dist.reserve(static_cast<std::size_t>(s) - 1);
    for (const Eigen::Index i : samples) {
        dist.clear();
        for (Eigen::Index other = 0; other < s; ++other) {
            if (other == i) continue;
            dist.push_back({(xn.row(i) - xn.row(other)).norm(), other});
        }
        std::partial_sort(dist.begin(), dist.begin() + k_neighbors, dist.end());

        for (int q = 0; q < k_neighbors; ++q) {
            const Eigen::Index neighbor = dist[static_cast<std::size_t>(q)].second;
            const double w = rank_weight(q);
            const double target_diff = std::fabs(yn(i) - yn(neighbor));
            n_dc += w * target_diff;
            for (Eigen::Index a = 0; a < f; ++a) {
                const double attr_diff = std::fabs(xn(i, a) - xn(neighbor, a));
                n_da(a) += w * attr_diff;
                n_dcda(a) += w * target_diff * attr_diff;
            }
        }
    }

    RrelieffResult result;
    result.scores = Vector::Zero(f);
    if (n_dc > 0.0 && m - n_dc > 0.0) {
        result.scores = (n_dcda / n_dc - (n_da - n_dcda) / (m - n_dc));
    }
    result.ranking.resize(static_cast<std::size_t>(f));
    std::iota(result.ranking.begin(), result.ranking.end(), Eigen::Index{0});
    std::stable_sort(result.ranking.begin(), result.ranking.end(),
                     [&](Eigen::Index a, Eigen::Index b) {
                         if (result.scores(a) != result.scores(b))
                             return result.scores(a) > result.scores(b);
                         return a < b;
                     });
    return result;
}

std::vector<CovariateCorrelation> covariate_correlation(const Matrix& features,
                                                        const Vector& covariate) {
    if (features.rows() != covariate.size())
        throw Error(ErrorCode::DimensionMismatch, "covariate_correlation: row mismatch");
    if (features.rows() < 3)
        throw Error(ErrorCode::InvalidArgument, "covariate_correlation needs S >= 3");
    const double cov_var = (covariate.array() - covariate.mean()).square().sum();
    if (cov_var <= 0.0)
        throw Error(ErrorCode::ConstantSeries, "constant covariate");

    std::vector<CovariateCorrelation> out(static_cast<std::size_t>(features.cols()));
    for (Eigen::Index j = 0; j < features.cols(); ++j) {
        const auto r = pearson(features.col(j), covariate);
        if (!r) {
            out[static_cast<std::size_t>(j)] = {std::nullopt, 1.0};
            continue;
        }
        out[static_cast<std::size_t>(j)] = {*r, correlation_p_value(*r, features.rows())};
    }
    return out;
}

}  // namespace wena
