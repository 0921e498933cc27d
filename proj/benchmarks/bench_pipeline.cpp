#include "wena/connectivity.hpp"
#include "wena/encoder.hpp"
#include "wena/ensemble.hpp"
#include "wena/graph_metrics.hpp"
#include "wena/regressors.hpp"
#include "wena/rng.hpp"

#include <benchmark/benchmark.h>

using namespace wena;

namespace {

TimeSeriesMatrix random_series(Eigen::Index t, Eigen::Index n, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(t, n);
    for (Eigen::Index i = 0; i < t; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = rng.gaussian();
    return TimeSeriesMatrix{std::move(m)};
}

}  // namespace

static void bm_fc_pearson(benchmark::State& state) {
    const auto ts = random_series(150, state.range(0), 1);
    for (auto _ : state) benchmark::DoNotOptimize(compute_fc(ts, FcMethod::Pearson));
}
BENCHMARK(bm_fc_pearson)->Arg(20)->Arg(80)->Arg(160);

static void bm_fc_mutual_information(benchmark::State& state) {
    const auto ts = random_series(150, state.range(0), 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_fc(ts, FcMethod::MutualInformation, 16));
}
BENCHMARK(bm_fc_mutual_information)->Arg(20)->Arg(80)->Arg(160);

static void bm_fc_distance_correlation(benchmark::State& state) {
    const auto ts = random_series(150, state.range(0), 3);
    for (auto _ : state)
        benchmark::DoNotOptimize(compute_fc(ts, FcMethod::DistanceCorrelation));
}
BENCHMARK(bm_fc_distance_correlation)->Arg(20)->Arg(80);

static void bm_graph_metrics(benchmark::State& state) {
    const auto ts = random_series(150, state.range(0), 4);
    const auto net = threshold_network(compute_fc(ts, FcMethod::Pearson), 0.20);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_graph_features(net));
}
BENCHMARK(bm_graph_metrics)->Arg(20)->Arg(80)->Arg(160);

static void bm_ae_epoch(benchmark::State& state) {
    Rng rng(5);
    Matrix data(200, state.range(0));
    for (Eigen::Index i = 0; i < data.rows(); ++i)
        for (Eigen::Index j = 0; j < data.cols(); ++j) data(i, j) = rng.uniform(0.0, 1.0);
    AeConfig config;
    config.epochs = 1;
    config.seed = 7;
    const FeatureMatrix train = make_feature_matrix(data, "f_");
    for (auto _ : state) benchmark::DoNotOptimize(ae_train(train, config));
}
BENCHMARK(bm_ae_epoch)->Arg(190)->Arg(640);

static void bm_fit_etr(benchmark::State& state) {
    Rng rng(6);
    Matrix x(200, 50);
    Vector y(200);
    for (Eigen::Index i = 0; i < 200; ++i) {
        for (Eigen::Index j = 0; j < 50; ++j) x(i, j) = rng.gaussian();
        y(i) = x(i, 0) + 0.2 * rng.gaussian();
    }
    for (auto _ : state)
        benchmark::DoNotOptimize(fit_etr(x, y, static_cast<int>(state.range(0)), 12, 3, 1));
}
BENCHMARK(bm_fit_etr)->Arg(10)->Arg(100);

static void bm_fit_svr(benchmark::State& state) {
    Rng rng(7);
    Matrix x(static_cast<Eigen::Index>(state.range(0)), 20);
    Vector y(state.range(0));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < 20; ++j) x(i, j) = rng.gaussian();
        y(i) = std::sin(x(i, 0)) + 0.1 * rng.gaussian();
    }
    for (auto _ : state) benchmark::DoNotOptimize(fit_svr(x, y));
}
BENCHMARK(bm_fit_svr)->Arg(100)->Arg(200);

static void bm_weighted_stack(benchmark::State& state) {
    Rng rng(8);
    Matrix x(120, 30);
    Vector y(120);
    for (Eigen::Index i = 0; i < 120; ++i) {
        for (Eigen::Index j = 0; j < 30; ++j) x(i, j) = rng.gaussian();
        y(i) = 2.0 * x(i, 0) - x(i, 1) + 0.1 * rng.gaussian();
    }
    std::vector<FeatureBlock> blocks = {{"features", make_feature_matrix(x, "f_")}};
    StackConfig config = default_stack_config();
    for (auto& spec : config.first_layer_models) spec.hyper["trees"] = 25;
    for (auto& spec : config.fusion_models) spec.hyper["trees"] = 25;
    for (auto _ : state) benchmark::DoNotOptimize(fit_weighted_stack(blocks, y, config));
}
BENCHMARK(bm_weighted_stack);

BENCHMARK_MAIN();
