#pragma once

#include "wena/connectivity.hpp"
#include "wena/encoder.hpp"
#include "wena/ensemble.hpp"
#include "wena/evaluation.hpp"
#include "wena/ingest.hpp"
#include "wena/synthetic.hpp"
#include "wena/toml.hpp"

#include <optional>
#include <string>
#include <vector>

namespace wena {

/// Everything `run` needs, with the documented defaults. CLI flags override
/// config-file keys which override these defaults.
struct RunConfig {
    std::string manifest_path;
    std::string output_dir = "wena_out";
    FcMethod fc_method = FcMethod::Pearson;
    double threshold = 0.20;
    int mi_bins = 16;
    int folds = 10;
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0 = all hardware threads
    bool detrend_series = true;
    QcThresholds qc;
    AeConfig ae_edges;
    AeConfig ae_graph;
    StackConfig stack = default_stack_config();
    std::string age_covariate = "age";
};

RunConfig load_run_config(const TomlTable& table);

/// Cohort-level feature tables after ingest + QC + FC + graph analysis.
struct CohortFeatures {
    std::vector<std::string> subject_ids;
    FeatureMatrix edges;  // S x N(N-1)/2
    FeatureMatrix graph;  // S x 4N
    Vector y;
    std::optional<Vector> age;
    Eigen::Index n_rois = 0;
    QcReport qc;
};

/// Runs ingest -> QC -> detrend -> FC -> threshold -> graph indices for every
/// retained subject. Relative manifest paths resolve against the manifest's
/// directory.
CohortFeatures compute_cohort_features(const RunConfig& config);

/// Same feature construction on an in-memory synthetic cohort.
CohortFeatures cohort_features_from_synthetic(const SyntheticCohort& cohort,
                                              const RunConfig& config);

/// Per-outer-fold autoencoder encodings: models fit on training rows only,
/// both blocks encoded for train and test rows.
struct FoldEncodings {
    int fold = 0;
    std::vector<Eigen::Index> train_rows;
    std::vector<Eigen::Index> test_rows;
    FeatureMatrix train_edges, test_edges;
    FeatureMatrix train_graph, test_graph;
    std::uint64_t fold_seed = 0;
};

std::vector<FoldEncodings> encode_folds(const CohortFeatures& cohort, const RunConfig& config,
                                        const FoldAssignment& folds);

/// WENA (or conventional-stacking when meta_model is set) scored on pooled
/// out-of-fold predictions over precomputed encodings.
CrossValidationResult evaluate_stack_cv(const CohortFeatures& cohort,
                                        const std::vector<FoldEncodings>& encodings,
                                        const RunConfig& config,
                                        const RegressorSpec* meta_model = nullptr);

/// Single base model on the concatenated encoded blocks, same folds.
CrossValidationResult evaluate_base_cv(const CohortFeatures& cohort,
                                       const std::vector<FoldEncodings>& encodings,
                                       const RegressorSpec& spec);

/// Full-cohort fit used for deployment checkpoints and pattern extraction.
struct FinalModels {
    AeModel ae_edges;
    AeModel ae_graph;
    TrainedStack stack;
};

FinalModels fit_final_models(const CohortFeatures& cohort, const RunConfig& config);

struct ExperimentResult {
    CrossValidationResult cv;
    FinalModels models;
    RrelieffResult feature_ranking;        // over final edge-AE features
    PatternReport pattern;                 // top-ranked hidden unit
    std::vector<CovariateCorrelation> age_correlation;
    std::vector<std::string> written_files;
};

/// The end-to-end `run` pipeline; writes the report bundle into
/// config.output_dir. Partial outputs are removed on failure.
ExperimentResult run_experiment(const RunConfig& config);

std::string metrics_report_to_json(const MetricsReport& metrics);
std::string per_fold_table_csv(const MetricsReport& metrics);

}  // namespace wena
