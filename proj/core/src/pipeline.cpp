#include "wena/pipeline.hpp"

#include "wena/csv.hpp"
#include "wena/error.hpp"
#include "wena/graph_metrics.hpp"
#include "wena/parallel.hpp"
#include "wena/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace wena {

namespace fs = std::filesystem;

namespace {

[[noreturn]] void stage_error(const std::string& stage, ErrorCode code,
                              const std::string& message) {
    throw Error(code, stage + ": " + message);
}

std::vector<RegressorSpec> specs_from_names(const std::vector<std::string>& names) {
    std::vector<RegressorSpec> specs;
    for (const auto& name : names) specs.push_back({parse_regressor_kind(name), {}, 0});
    return specs;
}

AeConfig ae_config_from_toml(const TomlTable& table, const std::string& prefix, AeConfig base) {
    if (const auto v = table.get_number(prefix + ".hidden")) base.hidden = static_cast<int>(*v);
    if (const auto v = table.get_number(prefix + ".epochs")) base.epochs = static_cast<int>(*v);
    if (const auto v = table.get_number(prefix + ".learning_rate")) base.learning_rate = *v;
    if (const auto v = table.get_number(prefix + ".momentum")) base.momentum = *v;
    if (const auto v = table.get_number(prefix + ".epsilon")) base.epsilon = *v;
    if (const auto v = table.get_bool(prefix + ".decay_decoder")) base.decay_decoder = *v;
    return base;
}

// Per-kind hyperparameter tables ([models.etr] trees = 50 ...) apply to every
// spec of that kind.
void apply_model_hypers(const TomlTable& table, std::vector<RegressorSpec>& specs) {
    for (auto& spec : specs) {
        const std::string prefix = std::string("models.") + regressor_kind_name(spec.kind) + ".";
        for (const auto& key : table.keys_with_prefix(prefix)) {
            const auto value = table.get_number(key);
            if (value) spec.hyper[key.substr(prefix.size())] = *value;
        }
    }
}

}  // namespace

RunConfig load_run_config(const TomlTable& table) {
    RunConfig config;
    if (const auto v = table.get_string("manifest")) config.manifest_path = *v;
    if (const auto v = table.get_string("output_dir")) config.output_dir = *v;
    if (const auto v = table.get_string("fc_method")) config.fc_method = parse_fc_method(*v);
    if (const auto v = table.get_number("threshold")) config.threshold = *v;
    if (const auto v = table.get_number("mi_bins")) config.mi_bins = static_cast<int>(*v);
    if (const auto v = table.get_number("folds")) config.folds = static_cast<int>(*v);
    if (const auto v = table.get_number("seed"))
        config.seed = static_cast<std::uint64_t>(*v);
    if (const auto v = table.get_number("threads"))
        config.threads = static_cast<std::size_t>(*v);
    if (const auto v = table.get_bool("detrend")) config.detrend_series = *v;
    if (const auto v = table.get_string("age_covariate")) config.age_covariate = *v;

    if (const auto v = table.get_number("qc.max_translation_mm")) config.qc.max_translation_mm = *v;
    if (const auto v = table.get_number("qc.max_rotation_deg")) config.qc.max_rotation_deg = *v;
    if (const auto v = table.get_number("qc.max_mean_fd")) config.qc.max_mean_fd = *v;

    config.ae_edges = ae_config_from_toml(table, "ae.edges", config.ae_edges);
    config.ae_graph = ae_config_from_toml(table, "ae.graph", config.ae_graph);

    if (const auto v = table.get_number("stack.layers")) config.stack.layers = static_cast<int>(*v);
    if (const auto v = table.get_number("stack.inner_folds"))
        config.stack.inner_folds = static_cast<int>(*v);
    if (const auto v = table.get_bool("stack.resubstitution")) config.stack.resubstitution = *v;
    if (const auto v = table.get_string_array("stack.first_layer_models"))
        config.stack.first_layer_models = specs_from_names(*v);
    if (const auto v = table.get_string_array("stack.inner_models"))
        config.stack.inner_models = specs_from_names(*v);
    if (const auto v = table.get_string_array("stack.fusion_models"))
        config.stack.fusion_models = specs_from_names(*v);

    apply_model_hypers(table, config.stack.first_layer_models);
    apply_model_hypers(table, config.stack.inner_models);
    apply_model_hypers(table, config.stack.fusion_models);
    return config;
}

namespace {

CohortManifest resolve_manifest_paths(const CohortManifest& manifest, const fs::path& base) {
    CohortManifest resolved = manifest;
    auto resolve = [&](const std::string& p) {
        return fs::path(p).is_absolute() ? p : (base / p).string();
    };
    for (auto& subject : resolved.subjects) {
        subject.timeseries_path = resolve(subject.timeseries_path);
        if (subject.motion_path) subject.motion_path = resolve(*subject.motion_path);
    }
    return resolved;
}

struct SubjectFeatures {
    Vector edges;
    Vector graph;
};

SubjectFeatures subject_features(const TimeSeriesMatrix& raw, const RunConfig& config) {
    const TimeSeriesMatrix series = config.detrend_series ? detrend(raw) : raw;
    const ConnectivityMatrix fc = compute_fc(series, config.fc_method, config.mi_bins);
    const SparseNetwork net = threshold_network(fc, config.threshold);
    SubjectFeatures features;
    features.edges = vectorize_edges(fc).values;
    features.graph = assemble_graph_features(net).flattened;
    return features;
}

CohortFeatures assemble_cohort(const CohortManifest& manifest, const RunConfig& config,
                               const std::vector<SubjectFeatures>& per_subject,
                               Eigen::Index n_rois, QcReport qc) {
    const auto s = static_cast<Eigen::Index>(manifest.subjects.size());
    CohortFeatures cohort;
    cohort.qc = std::move(qc);
    cohort.n_rois = n_rois;
    cohort.edges.values.resize(s, n_rois * (n_rois - 1) / 2);
    cohort.edges.names = edge_feature_names(n_rois);
    cohort.graph.values.resize(s, 4 * n_rois);
    cohort.graph.names = graph_feature_names(n_rois);
    cohort.y.resize(s);

    bool has_age = true;
    for (const auto& subject : manifest.subjects)
        has_age = has_age && subject.covariates.count(config.age_covariate) > 0;
    if (has_age && s > 0) cohort.age = Vector(s);

    for (Eigen::Index i = 0; i < s; ++i) {
        const auto& subject = manifest.subjects[static_cast<std::size_t>(i)];
        cohort.subject_ids.push_back(subject.id);
        cohort.edges.values.row(i) = per_subject[static_cast<std::size_t>(i)].edges.transpose();
        cohort.graph.values.row(i) = per_subject[static_cast<std::size_t>(i)].graph.transpose();
        cohort.y(i) = subject.score;
        if (cohort.age)
            (*cohort.age)(i) = subject.covariates.at(config.age_covariate);
    }
    return cohort;
}

}  // namespace

CohortFeatures compute_cohort_features(const RunConfig& config) {
    if (!fs::exists(config.manifest_path))
        stage_error("ingest", ErrorCode::FileNotFound, "manifest not found");
    CohortManifest manifest = load_manifest(config.manifest_path);
    manifest = resolve_manifest_paths(manifest,
                                      fs::path(config.manifest_path).parent_path());

    auto [retained, qc] = qc_filter(manifest, config.qc);
    if (retained.subjects.empty())
        stage_error("qc", ErrorCode::InvalidArgument, "no subjects retained");

    // ROI count from the first subject, enforced on the rest.
    const TimeSeriesMatrix first = load_timeseries(retained.subjects.front().timeseries_path, 0);
    const Eigen::Index n_rois = first.n();

    std::vector<SubjectFeatures> per_subject(retained.subjects.size());
    parallel_for(retained.subjects.size(), config.threads, [&](std::size_t i) {
        const TimeSeriesMatrix series =
            load_timeseries(retained.subjects[i].timeseries_path, n_rois);
        per_subject[i] = subject_features(series, config);
    });

    return assemble_cohort(retained, config, per_subject, n_rois, std::move(qc));
}

CohortFeatures cohort_features_from_synthetic(const SyntheticCohort& synthetic,
                                              const RunConfig& config) {
    CohortManifest manifest;
    manifest.roi_count = synthetic.spec.rois;
    manifest.covariate_names = {"age"};
    for (const auto& subject : synthetic.subjects) {
        SubjectRecord record;
        record.id = subject.id;
        record.timeseries_path = "<memory>";
        record.score = subject.score;
        record.covariates["age"] = subject.age;
        manifest.subjects.push_back(std::move(record));
    }

    std::vector<SubjectFeatures> per_subject(synthetic.subjects.size());
    parallel_for(synthetic.subjects.size(), config.threads, [&](std::size_t i) {
        per_subject[i] = subject_features(synthetic.subjects[i].series, config);
    });
    return assemble_cohort(manifest, config, per_subject, synthetic.spec.rois, {});
}

namespace {

FeatureMatrix select_rows(const FeatureMatrix& fm, const std::vector<Eigen::Index>& rows) {
    FeatureMatrix out;
    out.names = fm.names;
    out.values.resize(static_cast<Eigen::Index>(rows.size()), fm.cols());
    for (std::size_t i = 0; i < rows.size(); ++i)
        out.values.row(static_cast<Eigen::Index>(i)) = fm.values.row(rows[i]);
    return out;
}

Vector select(const Vector& v, const std::vector<Eigen::Index>& rows) {
    Vector out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Eigen::Index>(i)) = v(rows[i]);
    return out;
}

}  // namespace

std::vector<FoldEncodings> encode_folds(const CohortFeatures& cohort, const RunConfig& config,
                                        const FoldAssignment& folds) {
    const auto fold_rows = folds.fold_rows();
    std::vector<FoldEncodings> encodings(static_cast<std::size_t>(folds.k));
    parallel_for(static_cast<std::size_t>(folds.k), config.threads, [&](std::size_t f) {
        FoldEncodings& enc = encodings[f];
        enc.fold = static_cast<int>(f);
        enc.train_rows = folds.train_rows(static_cast<int>(f));
        enc.test_rows = fold_rows[f];
        enc.fold_seed = derive_seed(config.seed, 0xf01d, f);

        AeConfig edges_config = config.ae_edges;
        edges_config.seed = derive_seed(enc.fold_seed, 1);
        const AeModel ae_e = ae_train(select_rows(cohort.edges, enc.train_rows), edges_config);
        enc.train_edges = ae_features(ae_e, select_rows(cohort.edges, enc.train_rows));
        enc.test_edges = ae_features(ae_e, select_rows(cohort.edges, enc.test_rows));

        AeConfig graph_config = config.ae_graph;
        graph_config.seed = derive_seed(enc.fold_seed, 2);
        const AeModel ae_g = ae_train(select_rows(cohort.graph, enc.train_rows), graph_config);
        enc.train_graph = ae_features(ae_g, select_rows(cohort.graph, enc.train_rows));
        enc.test_graph = ae_features(ae_g, select_rows(cohort.graph, enc.test_rows));
    });
    return encodings;
}

CrossValidationResult evaluate_stack_cv(const CohortFeatures& cohort,
                                        const std::vector<FoldEncodings>& encodings,
                                        const RunConfig& config, const RegressorSpec* meta_model) {
    CrossValidationResult result;
    result.oof_predictions.resize(cohort.y.size());
    result.folds.k = static_cast<int>(encodings.size());
    result.folds.assignment.assign(static_cast<std::size_t>(cohort.y.size()), 0);

    std::vector<Vector> fold_predictions(encodings.size());
    parallel_for(encodings.size(), config.threads, [&](std::size_t f) {
        const FoldEncodings& enc = encodings[f];
        const Vector train_y = select(cohort.y, enc.train_rows);

        StackConfig stack_config = config.stack;
        stack_config.seed = derive_seed(enc.fold_seed, 3);
        const std::vector<FeatureBlock> train_blocks = {{"edges", enc.train_edges},
                                                        {"graph", enc.train_graph}};
        const TrainedStack stack =
            meta_model ? fit_conventional_stack(train_blocks, train_y, *meta_model, stack_config)
                       : fit_weighted_stack(train_blocks, train_y, stack_config);

        const std::vector<FeatureBlock> test_blocks = {{"edges", enc.test_edges},
                                                       {"graph", enc.test_graph}};
        fold_predictions[f] = predict_stack(stack, test_blocks);
    });

    for (std::size_t f = 0; f < encodings.size(); ++f) {
        for (std::size_t i = 0; i < encodings[f].test_rows.size(); ++i) {
            result.oof_predictions(encodings[f].test_rows[i]) =
                fold_predictions[f](static_cast<Eigen::Index>(i));
            result.folds.assignment[static_cast<std::size_t>(encodings[f].test_rows[i])] =
                static_cast<int>(f);
        }
    }
    result.metrics = compute_metrics(cohort.y, result.oof_predictions);
    for (std::size_t f = 0; f < encodings.size(); ++f) {
        const Vector fy = select(cohort.y, encodings[f].test_rows);
        const MetricsReport fm = compute_metrics(fy, fold_predictions[f]);
        result.metrics.per_fold.push_back({static_cast<int>(f), fm.mae, fm.r, fm.r2});
    }
    return result;
}

CrossValidationResult evaluate_base_cv(const CohortFeatures& cohort,
                                       const std::vector<FoldEncodings>& encodings,
                                       const RegressorSpec& spec) {
    CrossValidationResult result;
    result.oof_predictions.resize(cohort.y.size());
    result.folds.k = static_cast<int>(encodings.size());
    result.folds.assignment.assign(static_cast<std::size_t>(cohort.y.size()), 0);

    std::vector<Vector> fold_predictions(encodings.size());
    for (std::size_t f = 0; f < encodings.size(); ++f) {
        const FoldEncodings& enc = encodings[f];
        const FeatureMatrix train = concat_features({enc.train_edges, enc.train_graph});
        const FeatureMatrix test = concat_features({enc.test_edges, enc.test_graph});
        RegressorSpec seeded = spec;
        seeded.seed = derive_seed(enc.fold_seed, 4);
        const TrainedRegressor model = fit_regressor(train.values, select(cohort.y, enc.train_rows), seeded);
        fold_predictions[f] = model.predict(test.values);
    }

    for (std::size_t f = 0; f < encodings.size(); ++f) {
        for (std::size_t i = 0; i < encodings[f].test_rows.size(); ++i) {
            result.oof_predictions(encodings[f].test_rows[i]) =
                fold_predictions[f](static_cast<Eigen::Index>(i));
            result.folds.assignment[static_cast<std::size_t>(encodings[f].test_rows[i])] =
                static_cast<int>(f);
        }
    }
    result.metrics = compute_metrics(cohort.y, result.oof_predictions);
    for (std::size_t f = 0; f < encodings.size(); ++f) {
        const Vector fy = select(cohort.y, encodings[f].test_rows);
        const MetricsReport fm = compute_metrics(fy, fold_predictions[f]);
        result.metrics.per_fold.push_back({static_cast<int>(f), fm.mae, fm.r, fm.r2});
    }
    return result;
}

FinalModels fit_final_models(const CohortFeatures& cohort, const RunConfig& config) {
    const std::uint64_t final_seed = derive_seed(config.seed, 0xf17a1u);
    FinalModels models;

    AeConfig edges_config = config.ae_edges;
    edges_config.seed = derive_seed(final_seed, 1);
    models.ae_edges = ae_train(cohort.edges, edges_config);

    AeConfig graph_config = config.ae_graph;
    graph_config.seed = derive_seed(final_seed, 2);
    models.ae_graph = ae_train(cohort.graph, graph_config);

    StackConfig stack_config = config.stack;
    stack_config.seed = derive_seed(final_seed, 3);
    const std::vector<FeatureBlock> blocks = {
        {"edges", ae_features(models.ae_edges, cohort.edges)},
        {"graph", ae_features(models.ae_graph, cohort.graph)}};
    models.stack = fit_weighted_stack(blocks, cohort.y, stack_config);
    return models;
}

std::string metrics_report_to_json(const MetricsReport& metrics) {
    nlohmann::json doc;
    doc["mae"] = metrics.mae;
    if (metrics.r)
        doc["r"] = *metrics.r;
    else
        doc["r"] = nullptr;
    doc["r2"] = metrics.r2;
    doc["n"] = metrics.n;
    doc["folds"] = metrics.per_fold.size();
    return doc.dump(2);
}

std::string per_fold_table_csv(const MetricsReport& metrics) {
    std::string out = "fold,mae,r,r2\n";
    for (const auto& fm : metrics.per_fold) {
        out += std::to_string(fm.fold) + "," + csv::format_number(fm.mae) + ",";
        out += fm.r ? csv::format_number(*fm.r) : std::string("");
        out += "," + csv::format_number(fm.r2) + "\n";
    }
    return out;
}

namespace {

std::string weights_to_json(const TrainedStack& stack) {
    nlohmann::json doc;
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : stack.layers) {
        nlohmann::json streams = nlohmann::json::array();
        for (const auto& stream : layer) {
            streams.push_back({{"name", stream.name},
                               {"weight", stream.weight},
                               {"correlation", stream.score.correlation},
                               {"mae", stream.score.mae}});
        }
        layers.push_back(std::move(streams));
    }
    doc["layers"] = std::move(layers);
    nlohmann::json fusion = nlohmann::json::array();
    for (const auto& stream : stack.fusion) {
        fusion.push_back({{"name", stream.name},
                          {"weight", stream.weight},
                          {"correlation", stream.score.correlation},
                          {"mae", stream.score.mae}});
    }
    doc["fusion"] = std::move(fusion);
    doc["weights_clamped"] = stack.weights_clamped;
    doc["conventional"] = stack.conventional;
    return doc.dump(2);
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config) {
    ExperimentResult result;

    const CohortFeatures cohort = compute_cohort_features(config);
    if (!cohort.age)
        stage_error("pattern", ErrorCode::MissingColumn,
                    "covariate '" + config.age_covariate + "' required for pattern analysis");
    if (cohort.y.size() < config.folds)
        stage_error("train", ErrorCode::InvalidArgument, "fewer subjects than folds");

    const FoldAssignment folds = kfold_split(cohort.y.size(), config.folds, config.seed);
    const std::vector<FoldEncodings> encodings = encode_folds(cohort, config, folds);
    result.cv = evaluate_stack_cv(cohort, encodings, config);
    result.cv.folds = folds;

    result.models = fit_final_models(cohort, config);

    const FeatureMatrix final_edge_features = ae_features(result.models.ae_edges, cohort.edges);
    result.feature_ranking = rrelieff_rank(final_edge_features.values, cohort.y);
    result.pattern = extract_pattern(result.models.ae_edges, result.feature_ranking.ranking.front(),
                                     cohort.n_rois);
    result.age_correlation = covariate_correlation(final_edge_features.values, *cohort.age);

    // All computation succeeded; now write the bundle. Any write failure
    // removes the partially written outputs.
    fs::create_directories(config.output_dir);
    const fs::path out_dir(config.output_dir);
    std::vector<std::string> written;
    auto emit = [&](const std::string& name, const std::string& content) {
        const std::string path = (out_dir / name).string();
        csv::write_text(path, content);
        written.push_back(path);
    };

    try {
        emit("metrics.json", metrics_report_to_json(result.cv.metrics));
        emit("per_fold.csv", per_fold_table_csv(result.cv.metrics));

        std::string predictions = "subject_id,y_true,y_pred,diff\n";
        for (Eigen::Index i = 0; i < cohort.y.size(); ++i) {
            predictions += cohort.subject_ids[static_cast<std::size_t>(i)] + "," +
                           csv::format_number(cohort.y(i)) + "," +
                           csv::format_number(result.cv.oof_predictions(i)) + "," +
                           csv::format_number(result.cv.oof_predictions(i) - cohort.y(i)) + "\n";
        }
        emit("predictions.csv", predictions);
        emit("weights.json", weights_to_json(result.models.stack));

        std::string pattern_edges = "rank,i,j,weight\n";
        for (std::size_t r = 0; r < result.pattern.edges.size(); ++r) {
            const auto& e = result.pattern.edges[r];
            pattern_edges += std::to_string(r + 1) + "," + std::to_string(e.i) + "," +
                             std::to_string(e.j) + "," + csv::format_number(e.weight) + "\n";
        }
        emit("pattern_edges.csv", pattern_edges);

        std::string pattern_rois = "rank,roi,importance\n";
        for (std::size_t r = 0; r < result.pattern.rois.size(); ++r) {
            const auto& roi = result.pattern.rois[r];
            pattern_rois += std::to_string(r + 1) + "," + std::to_string(roi.roi) + "," +
                            csv::format_number(roi.importance) + "\n";
        }
        emit("pattern_rois.csv", pattern_rois);

        std::string age_csv = "feature,r,p\n";
        for (std::size_t j = 0; j < result.age_correlation.size(); ++j) {
            const auto& cc = result.age_correlation[j];
            age_csv += final_edge_features.names[j] + ",";
            age_csv += cc.r ? csv::format_number(*cc.r) : std::string("");
            age_csv += "," + csv::format_number(cc.p) + "\n";
        }
        emit("feature_age_correlation.csv", age_csv);

        emit("exclusions.json", qc_report_to_json(cohort.qc));
    } catch (...) {
        for (const auto& path : written) {
            std::error_code ec;
            fs::remove(path, ec);
        }
        throw;
    }
    result.written_files = std::move(written);
    return result;
}

}  // namespace wena
