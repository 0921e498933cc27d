#include "wena/pipeline.hpp"

#include "wena/error.hpp"
#include "wena/rng.hpp"
#include "wena/stats.hpp"

#include "support/tempdir.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>

using namespace wena;
namespace fs = std::filesystem;

namespace {

RunConfig small_config() {
    RunConfig config;
    config.folds = 5;
    config.threads = 1;
    config.ae_edges.hidden = 6;
    config.ae_edges.epochs = 60;
    config.ae_graph.hidden = 6;
    config.ae_graph.epochs = 60;
    // trim trees so the pipeline tests stay fast
    for (auto* models :
         {&config.stack.first_layer_models, &config.stack.inner_models,
          &config.stack.fusion_models})
        for (auto& spec : *models)
            if (spec.kind == RegressorKind::EnsembleTree) spec.hyper["trees"] = 25;
    return config;
}

SynthSpec small_synth(std::uint64_t seed, double strength = 0.8) {
    SynthSpec spec;
    spec.subjects = 60;
    spec.rois = 8;
    spec.timepoints = 60;
    spec.planted_edges = 5;
    spec.signal_strength = strength;
    spec.seed = seed;
    return spec;
}

}  // namespace

TEST_CASE("cohort features from an exported cohort match the in-memory path") {
    const SyntheticCohort cohort = generate_cohort(small_synth(4));
    testutil::TempDir dir("pipe");
    const std::string cohort_dir = (dir.path() / "cohort").string();
    export_cohort(cohort, cohort_dir);

    RunConfig config = small_config();
    config.manifest_path = cohort_dir + "/manifest.csv";

    const CohortFeatures from_disk = compute_cohort_features(config);
    const CohortFeatures in_memory = cohort_features_from_synthetic(cohort, config);

    CHECK(from_disk.n_rois == 8);
    CHECK(from_disk.edges.values == in_memory.edges.values);  // bitwise through CSV
    CHECK(from_disk.graph.values == in_memory.graph.values);
    CHECK(from_disk.y == in_memory.y);
    REQUIRE(from_disk.age.has_value());
    CHECK(*from_disk.age == *in_memory.age);
}

TEST_CASE("missing manifest carries the stage-tagged message") {
    RunConfig config = small_config();
    config.manifest_path = "/nonexistent/manifest.csv";
    try {
        compute_cohort_features(config);
        FAIL("expected an error");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::FileNotFound);
        CHECK(std::string(e.what()).find("ingest: manifest not found") != std::string::npos);
    }
}

TEST_CASE("fold encodings use training rows only") {
    const SyntheticCohort cohort = generate_cohort(small_synth(9));
    RunConfig config = small_config();
    const CohortFeatures features = cohort_features_from_synthetic(cohort, config);

    const FoldAssignment folds = kfold_split(features.y.size(), config.folds, config.seed);
    const auto encodings = encode_folds(features, config, folds);
    REQUIRE(encodings.size() == 5);

    for (const auto& enc : encodings) {
        CHECK(enc.train_rows.size() + enc.test_rows.size() ==
              static_cast<std::size_t>(features.y.size()));
        CHECK(enc.train_edges.rows() == static_cast<Eigen::Index>(enc.train_rows.size()));
        CHECK(enc.test_edges.rows() == static_cast<Eigen::Index>(enc.test_rows.size()));
        CHECK(enc.train_edges.cols() == config.ae_edges.hidden);
        CHECK(enc.train_graph.cols() == config.ae_graph.hidden);
        // encoded values live strictly inside (0,1)
        CHECK((enc.test_edges.values.array() > 0.0).all());
        CHECK((enc.test_edges.values.array() < 1.0).all());
    }

    // no leakage: perturbing a test row's features must not change that
    // fold's training encodings (the AE was fit without it)
    CohortFeatures perturbed = features;
    const Eigen::Index victim = encodings[0].test_rows.front();
    perturbed.edges.values.row(victim).array() += 123.0;
    const auto encodings2 = encode_folds(perturbed, config, folds);
    CHECK(encodings2[0].train_edges.values == encodings[0].train_edges.values);
}

TEST_CASE("stack CV recovers planted signal; base CV runs on identical folds") {
    const SyntheticCohort cohort = generate_cohort(small_synth(13));
    RunConfig config = small_config();
    const CohortFeatures features = cohort_features_from_synthetic(cohort, config);

    const FoldAssignment folds = kfold_split(features.y.size(), config.folds, config.seed);
    const auto encodings = encode_folds(features, config, folds);

    const CrossValidationResult wena_cv = evaluate_stack_cv(features, encodings, config);
    REQUIRE(wena_cv.metrics.r.has_value());
    CHECK(*wena_cv.metrics.r > 0.3);  // small cohort, strong signal
    CHECK(wena_cv.metrics.per_fold.size() == 5);

    const CrossValidationResult ridge_cv =
        evaluate_base_cv(features, encodings, {RegressorKind::Ridge, {}, 0});
    CHECK(ridge_cv.oof_predictions.size() == features.y.size());

    // conventional baseline shares the same machinery
    const RegressorSpec meta{RegressorKind::Ridge, {}, 0};
    const CrossValidationResult conventional =
        evaluate_stack_cv(features, encodings, config, &meta);
    CHECK(conventional.oof_predictions.size() == features.y.size());
}

TEST_CASE("run_experiment writes the full bundle deterministically") {
    const SyntheticCohort cohort = generate_cohort(small_synth(21));
    testutil::TempDir dir("run");
    const std::string cohort_dir = (dir.path() / "cohort").string();
    export_cohort(cohort, cohort_dir);

    RunConfig config = small_config();
    config.manifest_path = cohort_dir + "/manifest.csv";
    config.output_dir = (dir.path() / "out_a").string();
    const ExperimentResult a = run_experiment(config);

    for (const char* name :
         {"metrics.json", "per_fold.csv", "predictions.csv", "weights.json",
          "pattern_edges.csv", "pattern_rois.csv", "feature_age_correlation.csv",
          "exclusions.json"}) {
        CHECK(fs::exists(fs::path(config.output_dir) / name));
    }

    config.output_dir = (dir.path() / "out_b").string();
    run_experiment(config);

    for (const auto& entry : fs::directory_iterator(dir.path() / "out_a")) {
        std::ifstream fa(entry.path(), std::ios::binary);
        std::ifstream fb(dir.path() / "out_b" / entry.path().filename(), std::ios::binary);
        const std::string ca((std::istreambuf_iterator<char>(fa)),
                             std::istreambuf_iterator<char>());
        const std::string cb((std::istreambuf_iterator<char>(fb)),
                             std::istreambuf_iterator<char>());
        CHECK(ca == cb);  // byte-identical
    }

    // metrics.json round-trip sanity: numbers reproducible from the result
    CHECK(a.cv.metrics.per_fold.size() == 5);
    CHECK(a.pattern.edges.size() == 28);  // 8 ROIs -> 28 edges
    CHECK(a.age_correlation.size() == static_cast<std::size_t>(config.ae_edges.hidden));
}

TEST_CASE("parallel degree does not change results") {
    const SyntheticCohort cohort = generate_cohort(small_synth(33));
    RunConfig serial = small_config();
    const CohortFeatures features_serial = cohort_features_from_synthetic(cohort, serial);

    RunConfig parallel = small_config();
    parallel.threads = 4;
    const CohortFeatures features_parallel = cohort_features_from_synthetic(cohort, parallel);
    CHECK(features_serial.edges.values == features_parallel.edges.values);

    const FoldAssignment folds = kfold_split(features_serial.y.size(), 5, 0);
    const auto enc_serial = encode_folds(features_serial, serial, folds);
    const auto enc_parallel = encode_folds(features_parallel, parallel, folds);
    CHECK(enc_serial[2].train_edges.values == enc_parallel[2].train_edges.values);

    const CrossValidationResult cv_serial = evaluate_stack_cv(features_serial, enc_serial, serial);
    const CrossValidationResult cv_parallel =
        evaluate_stack_cv(features_parallel, enc_parallel, parallel);
    CHECK(cv_serial.oof_predictions == cv_parallel.oof_predictions);
}
