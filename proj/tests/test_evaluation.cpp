#include "wena/evaluation.hpp"

#include "wena/error.hpp"
#include "wena/regressors.hpp"
#include "wena/rng.hpp"
#include "wena/stats.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

using namespace wena;

TEST_CASE("metrics hand cases") {
    Vector y(3), yhat(3);
    y << 1, 2, 3;

    yhat = y;
    MetricsReport perfect = compute_metrics(y, yhat);
    CHECK(perfect.mae == 0.0);
    CHECK(*perfect.r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(perfect.r2 == doctest::Approx(1.0).epsilon(1e-12));

    yhat.setConstant(y.mean());
    MetricsReport constant = compute_metrics(y, yhat);
    CHECK(constant.r2 == doctest::Approx(0.0).epsilon(1e-12));
    CHECK_FALSE(constant.r.has_value());

    yhat << 1, 2, 4;
    MetricsReport off = compute_metrics(y, yhat);
    CHECK(off.mae == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(off.r2 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(*off.r == doctest::Approx(9.0 / (2.0 * std::sqrt(21.0))).epsilon(1e-12));

    CHECK_THROWS_AS(compute_metrics(y, Vector(2)), Error);
}

TEST_CASE("metrics properties: r affine-invariant, r2 not; mae triangle bound") {
    Rng rng(61);
    Vector y(30), yhat(30), z(30);
    for (int i = 0; i < 30; ++i) {
        y(i) = rng.gaussian();
        yhat(i) = y(i) + 0.3 * rng.gaussian();
        z(i) = rng.gaussian();
    }
    const MetricsReport base = compute_metrics(y, yhat);
    const Vector mapped = (2.5 * yhat.array() + 1.0).matrix();
    const MetricsReport after = compute_metrics(y, mapped);
    CHECK(*after.r == doctest::Approx(*base.r).epsilon(1e-12));

    const Vector shifted = (yhat.array() + 3.0).matrix();
    CHECK(compute_metrics(y, shifted).r2 < base.r2);

    const double direct = compute_metrics(y, yhat).mae;
    const double via = compute_metrics(y, z).mae + compute_metrics(z, yhat).mae;
    CHECK(direct <= via + 1e-12);
}

TEST_CASE("kfold split structure") {
    const FoldAssignment fa = kfold_split(461, 10, 7);
    std::vector<int> sizes(10, 0);
    for (int f : fa.assignment) sizes[static_cast<std::size_t>(f)]++;
    std::sort(sizes.begin(), sizes.end());
    CHECK(sizes.front() == 46);
    CHECK(sizes.back() == 47);
    CHECK(std::count(sizes.begin(), sizes.end(), 46) == 9);

    const FoldAssignment singletons = kfold_split(10, 10, 1);
    std::set<int> folds(singletons.assignment.begin(), singletons.assignment.end());
    CHECK(folds.size() == 10);

    CHECK(kfold_split(461, 10, 7).assignment == fa.assignment);  // deterministic

    // partition: disjoint and covering
    const auto rows = fa.fold_rows();
    std::size_t total = 0;
    std::set<Eigen::Index> seen;
    for (const auto& fold : rows) {
        total += fold.size();
        seen.insert(fold.begin(), fold.end());
    }
    CHECK(total == 461);
    CHECK(seen.size() == 461);

    CHECK_THROWS_AS(kfold_split(5, 10, 0), Error);
}

TEST_CASE("cross_validate pools out-of-fold predictions") {
    Rng rng(3);
    const Eigen::Index s = 80;
    Matrix x(s, 2);
    Vector y(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        x(i, 0) = rng.gaussian();
        x(i, 1) = rng.gaussian();
        y(i) = 3.0 * x(i, 0) + x(i, 1) + 0.05 * rng.gaussian();
    }

    const auto predictor = [&](const std::vector<Eigen::Index>& train,
                               const std::vector<Eigen::Index>& test, int, std::uint64_t) {
        Matrix tx(static_cast<Eigen::Index>(train.size()), 2);
        Vector ty(static_cast<Eigen::Index>(train.size()));
        for (std::size_t i = 0; i < train.size(); ++i) {
            tx.row(static_cast<Eigen::Index>(i)) = x.row(train[i]);
            ty(static_cast<Eigen::Index>(i)) = y(train[i]);
        }
        Matrix qx(static_cast<Eigen::Index>(test.size()), 2);
        for (std::size_t i = 0; i < test.size(); ++i)
            qx.row(static_cast<Eigen::Index>(i)) = x.row(test[i]);
        return fit_ridge(tx, ty, 1e-6).predict(qx);
    };

    const CrossValidationResult result = cross_validate(y, 10, 5, predictor);
    CHECK(*result.metrics.r > 0.99);
    CHECK(result.metrics.per_fold.size() == 10);

    // parallel execution gives identical results
    const CrossValidationResult parallel = cross_validate(y, 10, 5, predictor, 4);
    CHECK(parallel.oof_predictions == result.oof_predictions);

    CHECK_THROWS_AS(cross_validate(y, 100, 5, predictor), Error);  // k > S
}

TEST_CASE("rrelieff ranks a planted feature first") {
    Rng rng(8);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        Rng local(seed * 13 + 1);
        const Eigen::Index s = 200, f = 10;
        Matrix x(s, f);
        Vector y(s);
        for (Eigen::Index i = 0; i < s; ++i) {
            for (Eigen::Index j = 0; j < f; ++j) x(i, j) = local.gaussian();
            y(i) = x(i, 4);  // feature 4 IS the target
        }
        const RrelieffResult result = rrelieff_rank(x, y, 10, 0, seed);
        if (result.ranking.front() == 4) ++hits;
    }
    CHECK(hits >= 4);
}

TEST_CASE("rrelieff structural cases") {
    Rng rng(9);
    const Eigen::Index s = 50;
    Matrix x(s, 3);
    Vector y(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        x(i, 0) = rng.gaussian();
        x(i, 1) = 7.0;       // constant
        x(i, 2) = x(i, 0);   // duplicate of feature 0
        y(i) = x(i, 0) + 0.1 * rng.gaussian();
    }
    const RrelieffResult result = rrelieff_rank(x, y, 10);
    CHECK(result.scores(1) == 0.0);
    CHECK(result.scores(0) == doctest::Approx(result.scores(2)).epsilon(1e-12));

    CHECK_THROWS_AS(rrelieff_rank(x, y, 50), Error);  // S <= k

    // feature-order invariance: permuting columns permutes scores
    Matrix xp(s, 3);
    xp.col(0) = x.col(2);
    xp.col(1) = x.col(0);
    xp.col(2) = x.col(1);
    const RrelieffResult permuted = rrelieff_rank(xp, y, 10);
    CHECK(permuted.scores(0) == doctest::Approx(result.scores(2)).epsilon(1e-12));
    CHECK(permuted.scores(1) == doctest::Approx(result.scores(0)).epsilon(1e-12));
    CHECK(permuted.scores(2) == doctest::Approx(result.scores(1)).epsilon(1e-12));
}

TEST_CASE("covariate correlation with t-distribution p-values") {
    Rng rng(10);
    const Eigen::Index s = 20;
    Matrix features(s, 3);
    Vector covariate(s);
    for (Eigen::Index i = 0; i < s; ++i) {
        covariate(i) = rng.gaussian();
        features(i, 0) = covariate(i);                      // r = 1
        features(i, 1) = rng.gaussian();                    // r ~ 0
        features(i, 2) = 1.0;                               // constant -> undefined
    }
    const auto results = covariate_correlation(features, covariate);
    REQUIRE(results.size() == 3);
    CHECK(*results[0].r == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(results[0].p < 1e-12);
    CHECK_FALSE(results[2].r.has_value());

    CHECK_THROWS_AS(covariate_correlation(features, Vector::Constant(s, 1.0)), Error);
}

TEST_CASE("p-values match the quadrature t-CDF oracle") {
    for (const double r : {0.1, 0.3, 0.6, 0.9}) {
        const Eigen::Index n = 20;
        const double p = correlation_p_value(r, n);
        const double nu = static_cast<double>(n - 2);
        const double t = r * std::sqrt(nu / (1.0 - r * r));
        CHECK(p == doctest::Approx(oracle::t_two_sided_p(t, nu)).epsilon(1e-6));
    }
    // r = 0 -> p = 1; monotone decreasing in |r|
    CHECK(correlation_p_value(0.0, 30) == doctest::Approx(1.0));
    double previous = 1.1;
    for (double r = 0.0; r < 1.0; r += 0.05) {
        const double p = correlation_p_value(r, 25);
        CHECK(p <= previous + 1e-15);
        CHECK(p > 0.0);
        CHECK(p <= 1.0);
        previous = p;
    }
}
