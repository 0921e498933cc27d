// wena: functional-connectivity feature extraction, autoencoder compression,
// and weighted-stacking regression from ROI time series, end to end.

#include "wena/connectivity.hpp"
#include "wena/csv.hpp"
#include "wena/encoder.hpp"
#include "wena/ensemble.hpp"
#include "wena/error.hpp"
#include "wena/evaluation.hpp"
#include "wena/graph_metrics.hpp"
#include "wena/ingest.hpp"
#include "wena/pipeline.hpp"
#include "wena/synthetic.hpp"
#include "wena/toml.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

namespace fs = std::filesystem;
using namespace wena;

namespace {

int log_level() {
    const char* env = std::getenv("WENA_LOG");
    if (!env) return 1;
    const std::string value(env);
    if (value == "quiet" || value == "0") return 0;
    if (value == "debug" || value == "2") return 2;
    return 1;
}

void log_info(const std::string& message) {
    if (log_level() >= 1) std::cerr << "wena: " << message << "\n";
}

int exit_code_for(const Error& error) {
    switch (error.code()) {
        case ErrorCode::FileNotFound:
        case ErrorCode::MissingColumn:
        case ErrorCode::ParseError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::DuplicateSubject:
        case ErrorCode::RoiCountMismatch:
        case ErrorCode::TooFewTimePoints:
        case ErrorCode::LayersOutOfRange:
            return 2;
        default:
            return 1;
    }
}

struct ConfigCli {
    std::string config_path;
    std::string manifest;
    std::string output_dir;
    std::string fc_method;
    double threshold = -1.0;
    int mi_bins = -1;
    int folds = -1;
    long long seed = -1;
    int layers = -1;
    int threads = -1;
    bool no_detrend = false;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "TOML config file");
        cmd->add_option("--manifest", manifest, "cohort manifest CSV");
        cmd->add_option("--out,--output-dir", output_dir, "output directory");
        cmd->add_option("--fc-method", fc_method, "pearson | mi | dcor");
        cmd->add_option("--threshold", threshold, "proportional threshold fraction");
        cmd->add_option("--mi-bins", mi_bins, "bins for the MI estimator");
        cmd->add_option("--folds", folds, "outer cross-validation folds");
        cmd->add_option("--seed", seed, "master seed");
        cmd->add_option("--layers", layers, "stacking layers (2-4)");
        cmd->add_option("--threads", threads, "parallelism degree (0 = all cores)");
        cmd->add_flag("--no-detrend", no_detrend, "skip linear detrending");
    }

    // precedence: flag > config file > default
    RunConfig resolve() const {
        RunConfig config;
        if (!config_path.empty()) config = load_run_config(TomlTable::parse_file(config_path));
        if (!manifest.empty()) config.manifest_path = manifest;
        if (!output_dir.empty()) config.output_dir = output_dir;
        if (!fc_method.empty()) config.fc_method = parse_fc_method(fc_method);
        if (threshold >= 0.0) config.threshold = threshold;
        if (mi_bins >= 0) config.mi_bins = mi_bins;
        if (folds >= 0) config.folds = folds;
        if (seed >= 0) config.seed = static_cast<std::uint64_t>(seed);
        if (layers >= 0) config.stack.layers = layers;
        if (threads >= 0) config.threads = static_cast<std::size_t>(threads);
        if (no_detrend) config.detrend_series = false;
        return config;
    }
};

FeatureMatrix read_features_csv(const std::string& path) {
    const csv::NumericTable table = csv::read_numeric_table(path);
    FeatureMatrix fm;
    fm.values = table.values;
    fm.names = table.header.empty() ? make_feature_matrix(table.values, "f_").names : table.header;
    return fm;
}

Vector read_labels_csv(const std::string& path) {
    const csv::NumericTable table = csv::read_numeric_table(path);
    if (table.values.cols() != 1)
        throw Error(ErrorCode::ParseError, path + ": labels file must have one column");
    return table.values.col(0);
}

void write_features_csv(const std::string& path, const FeatureMatrix& fm) {
    csv::write_numeric_table(path, fm.values, fm.names);
}

// ----------------------------------------------------------- subcommands --

int cmd_synth(const SynthSpec& spec, const std::string& out_dir) {
    const SyntheticCohort cohort = generate_cohort(spec);
    export_cohort(cohort, out_dir);
    log_info("wrote synthetic cohort (" + std::to_string(spec.subjects) + " subjects) to " +
             out_dir);
    return 0;
}

int cmd_ingest_check(const ConfigCli& cli, const std::string& report_path) {
    const RunConfig config = cli.resolve();
    if (!fs::exists(config.manifest_path))
        throw Error(ErrorCode::FileNotFound, "ingest: manifest not found");
    CohortManifest manifest = load_manifest(config.manifest_path);
    const auto base = fs::path(config.manifest_path).parent_path();
    for (auto& subject : manifest.subjects) {
        if (!fs::path(subject.timeseries_path).is_absolute())
            subject.timeseries_path = (base / subject.timeseries_path).string();
        if (subject.motion_path && !fs::path(*subject.motion_path).is_absolute())
            subject.motion_path = (base / *subject.motion_path).string();
    }
    const auto [retained, report] = qc_filter(manifest, config.qc);

    Eigen::Index n_rois = 0;
    for (const auto& subject : retained.subjects) {
        const TimeSeriesMatrix ts = load_timeseries(subject.timeseries_path, n_rois);
        if (n_rois == 0) n_rois = ts.n();
    }
    std::cout << "subjects: " << manifest.subjects.size() << "\n"
              << "retained: " << retained.subjects.size() << "\n"
              << "excluded: " << report.exclusions.size() << "\n"
              << "missing motion (warned): " << report.warnings.size() << "\n"
              << "roi_count: " << n_rois << "\n";
    if (!report_path.empty()) {
        csv::write_text(report_path, qc_report_to_json(report));
        log_info("exclusion report written to " + report_path);
    }
    return 0;
}

int cmd_fc(const ConfigCli& cli, bool per_subject_matrices) {
    const RunConfig config = cli.resolve();
    const CohortFeatures cohort = compute_cohort_features(config);
    fs::create_directories(config.output_dir);
    const fs::path out(config.output_dir);

    write_features_csv((out / "edges.csv").string(), cohort.edges);
    csv::write_numeric_table((out / "labels.csv").string(), cohort.y, {"score"});

    if (per_subject_matrices) {
        // rebuild each subject's dense matrix from its edge row (the diagonal
        // self-association value is not part of the edge vector)
        for (Eigen::Index s = 0; s < cohort.edges.rows(); ++s) {
            ConnectivityMatrix fc;
            fc.method = config.fc_method;
            fc.values = Matrix::Zero(cohort.n_rois, cohort.n_rois);
            for (Eigen::Index k = 0; k < cohort.edges.cols(); ++k) {
                const auto [i, j] = edge_endpoints(k, cohort.n_rois);
                fc.values(i, j) = fc.values(j, i) = cohort.edges.values(s, k);
            }
            write_connectivity_csv(
                fc, (out / ("fc_" + cohort.subject_ids[static_cast<std::size_t>(s)] + ".csv"))
                        .string());
        }
    }
    log_info("edge table: " + std::to_string(cohort.edges.rows()) + " x " +
             std::to_string(cohort.edges.cols()));
    return 0;
}

int cmd_graph(const ConfigCli& cli, bool edge_lists) {
    const RunConfig config = cli.resolve();
    const CohortFeatures cohort = compute_cohort_features(config);
    fs::create_directories(config.output_dir);
    const fs::path out(config.output_dir);
    write_features_csv((out / "graph_features.csv").string(), cohort.graph);
    csv::write_numeric_table((out / "labels.csv").string(), cohort.y, {"score"});

    if (edge_lists) {
        // thresholded networks per subject, rebuilt from the stored edge rows
        for (Eigen::Index s = 0; s < cohort.edges.rows(); ++s) {
            ConnectivityMatrix fc;
            fc.method = config.fc_method;
            fc.values = Matrix::Zero(cohort.n_rois, cohort.n_rois);
            for (Eigen::Index k = 0; k < cohort.edges.cols(); ++k) {
                const auto [i, j] = edge_endpoints(k, cohort.n_rois);
                fc.values(i, j) = fc.values(j, i) = cohort.edges.values(s, k);
            }
            const SparseNetwork net = threshold_network(fc, config.threshold);
            write_edge_list_csv(
                net, (out / ("net_" + cohort.subject_ids[static_cast<std::size_t>(s)] + ".csv"))
                         .string());
        }
    }
    log_info("graph feature table: " + std::to_string(cohort.graph.rows()) + " x " +
             std::to_string(cohort.graph.cols()));
    return 0;
}

int cmd_encode(const std::string& features_path, const std::string& out_dir, AeConfig config,
               const std::string& method, int components) {
    const FeatureMatrix features = read_features_csv(features_path);
    fs::create_directories(out_dir);
    if (method == "pca") {
        write_features_csv((fs::path(out_dir) / "encoded.csv").string(),
                           pca_fit_transform(features, features, components));
        log_info("pca projection with " + std::to_string(components) + " components");
        return 0;
    }
    if (method != "ae")
        throw Error(ErrorCode::InvalidArgument, "encode: method must be 'ae' or 'pca'");
    const AeModel model = ae_train(features, config);
    save_ae_model(model, (fs::path(out_dir) / "ae_model.json").string());
    write_features_csv((fs::path(out_dir) / "encoded.csv").string(), ae_features(model, features));
    log_info("final training loss " + csv::format_number(model.final_loss));
    return 0;
}

int cmd_train(const ConfigCli& cli) {
    const RunConfig config = cli.resolve();
    const CohortFeatures cohort = compute_cohort_features(config);
    const FinalModels models = fit_final_models(cohort, config);
    fs::create_directories(config.output_dir);
    const fs::path out(config.output_dir);
    save_stack(models.stack, (out / "stack.json").string());
    save_ae_model(models.ae_edges, (out / "ae_edges.json").string());
    save_ae_model(models.ae_graph, (out / "ae_graph.json").string());
    log_info("stack checkpoint written to " + (out / "stack.json").string());
    return 0;
}

int cmd_evaluate(const ConfigCli& cli, const std::string& conventional_meta) {
    const RunConfig config = cli.resolve();
    const CohortFeatures cohort = compute_cohort_features(config);
    if (cohort.y.size() < config.folds)
        throw Error(ErrorCode::InvalidArgument, "train: fewer subjects than folds");

    const FoldAssignment folds = kfold_split(cohort.y.size(), config.folds, config.seed);
    const auto encodings = encode_folds(cohort, config, folds);
    CrossValidationResult cv;
    if (conventional_meta.empty()) {
        cv = evaluate_stack_cv(cohort, encodings, config);
    } else {
        const RegressorSpec meta{parse_regressor_kind(conventional_meta), {}, config.seed};
        cv = evaluate_stack_cv(cohort, encodings, config, &meta);
    }

    fs::create_directories(config.output_dir);
    const fs::path out(config.output_dir);
    csv::write_text((out / "metrics.json").string(), metrics_report_to_json(cv.metrics));
    csv::write_text((out / "per_fold.csv").string(), per_fold_table_csv(cv.metrics));

    std::string predictions = "subject_id,y_true,y_pred,diff\n";
    for (Eigen::Index i = 0; i < cohort.y.size(); ++i) {
        predictions += cohort.subject_ids[static_cast<std::size_t>(i)] + "," +
                       csv::format_number(cohort.y(i)) + "," +
                       csv::format_number(cv.oof_predictions(i)) + "," +
                       csv::format_number(cv.oof_predictions(i) - cohort.y(i)) + "\n";
    }
    csv::write_text((out / "predictions.csv").string(), predictions);

    std::cout << "mae=" << cv.metrics.mae;
    if (cv.metrics.r) std::cout << " r=" << *cv.metrics.r;
    std::cout << " r2=" << cv.metrics.r2 << " n=" << cv.metrics.n << "\n";
    return 0;
}

int cmd_rank(const std::string& features_path, const std::string& labels_path,
             const std::string& out_path, int neighbors) {
    const FeatureMatrix features = read_features_csv(features_path);
    const Vector labels = read_labels_csv(labels_path);
    const RrelieffResult result = rrelieff_rank(features.values, labels, neighbors);

    std::string out = "rank,feature,score\n";
    for (std::size_t r = 0; r < result.ranking.size(); ++r) {
        const Eigen::Index f = result.ranking[r];
        out += std::to_string(r + 1) + "," + features.names[static_cast<std::size_t>(f)] + "," +
               csv::format_number(result.scores(f)) + "\n";
    }
    csv::write_text(out_path, out);
    log_info("ranking written to " + out_path);
    return 0;
}

int cmd_pattern(const std::string& model_path, int rois, int hidden_index,
                const std::string& features_path, const std::string& labels_path,
                const std::string& out_dir) {
    const AeModel model = load_ae_model(model_path);
    Eigen::Index unit = hidden_index;
    if (hidden_index < 0) {
        if (features_path.empty() || labels_path.empty())
            throw Error(ErrorCode::InvalidArgument,
                        "pattern: give --hidden-index or --features plus --labels");
        const FeatureMatrix features = read_features_csv(features_path);
        const Vector labels = read_labels_csv(labels_path);
        unit = rrelieff_rank(features.values, labels).ranking.front();
        log_info("top-ranked hidden unit: " + std::to_string(unit));
    }

    const PatternReport report = extract_pattern(model, unit, rois);
    fs::create_directories(out_dir);
    const fs::path out(out_dir);

    std::string edges = "rank,i,j,weight\n";
    for (std::size_t r = 0; r < report.edges.size(); ++r) {
        const auto& e = report.edges[r];
        edges += std::to_string(r + 1) + "," + std::to_string(e.i) + "," + std::to_string(e.j) +
                 "," + csv::format_number(e.weight) + "\n";
    }
    csv::write_text((out / "pattern_edges.csv").string(), edges);

    std::string roi_table = "rank,roi,importance\n";
    for (std::size_t r = 0; r < report.rois.size(); ++r) {
        const auto& roi = report.rois[r];
        roi_table += std::to_string(r + 1) + "," + std::to_string(roi.roi) + "," +
                     csv::format_number(roi.importance) + "\n";
    }
    csv::write_text((out / "pattern_rois.csv").string(), roi_table);
    return 0;
}

int cmd_run(const ConfigCli& cli) {
    const RunConfig config = cli.resolve();
    const ExperimentResult result = run_experiment(config);
    std::cout << "mae=" << result.cv.metrics.mae;
    if (result.cv.metrics.r) std::cout << " r=" << *result.cv.metrics.r;
    std::cout << " r2=" << result.cv.metrics.r2 << " n=" << result.cv.metrics.n << "\n";
    log_info("report bundle in " + config.output_dir);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"WENA: weighted ensemble-model and network analysis toolkit"};
    app.require_subcommand(1);

    auto* synth = app.add_subcommand("synth", "generate and export a synthetic cohort");
    SynthSpec synth_spec;
    std::string synth_out = "synth_cohort";
    long long synth_seed = 0;
    synth->add_option("--subjects", synth_spec.subjects);
    synth->add_option("--rois", synth_spec.rois);
    synth->add_option("--timepoints", synth_spec.timepoints);
    synth->add_option("--planted-edges", synth_spec.planted_edges);
    synth->add_option("--signal-strength", synth_spec.signal_strength);
    synth->add_option("--noise-sd", synth_spec.noise_sd);
    synth->add_option("--seed", synth_seed);
    synth->add_option("--out", synth_out, "output directory");

    auto* ingest_check = app.add_subcommand("ingest-check", "validate a manifest and run QC");
    ConfigCli ingest_cli;
    ingest_cli.attach(ingest_check);
    std::string ingest_report;
    ingest_check->add_option("--report", ingest_report, "write exclusion report JSON here");

    auto* fc = app.add_subcommand("fc", "compute FC matrices and the cohort edge table");
    ConfigCli fc_cli;
    fc_cli.attach(fc);
    bool fc_matrices = false;
    fc->add_flag("--matrices", fc_matrices, "also write one N x N CSV per subject");

    auto* graph = app.add_subcommand("graph", "compute the cohort graph-index table");
    ConfigCli graph_cli;
    graph_cli.attach(graph);
    bool graph_edge_lists = false;
    graph->add_flag("--edge-lists", graph_edge_lists,
                    "also write one thresholded edge-list CSV per subject");

    auto* encode = app.add_subcommand("encode", "compress a feature CSV (autoencoder or PCA)");
    std::string encode_features, encode_out = "encode_out", encode_method = "ae";
    AeConfig encode_config;
    long long encode_seed = 0;
    int encode_components = 50;
    encode->add_option("--features", encode_features)->required();
    encode->add_option("--out", encode_out);
    encode->add_option("--method", encode_method, "ae | pca");
    encode->add_option("--components", encode_components, "PCA component count");
    encode->add_option("--hidden", encode_config.hidden);
    encode->add_option("--epochs", encode_config.epochs);
    encode->add_option("--learning-rate", encode_config.learning_rate);
    encode->add_option("--momentum", encode_config.momentum);
    encode->add_option("--epsilon", encode_config.epsilon);
    encode->add_option("--seed", encode_seed);

    auto* train = app.add_subcommand("train", "fit the full-cohort WENA stack");
    ConfigCli train_cli;
    train_cli.attach(train);

    auto* evaluate = app.add_subcommand("evaluate", "outer k-fold cross-validation");
    ConfigCli evaluate_cli;
    evaluate_cli.attach(evaluate);
    std::string evaluate_meta;
    evaluate->add_option("--conventional-meta", evaluate_meta,
                         "score the conventional-stacking baseline with this meta-model");

    auto* rank = app.add_subcommand("rank", "RReliefF feature ranking");
    std::string rank_features, rank_labels, rank_out = "ranking.csv";
    int rank_neighbors = 10;
    rank->add_option("--features", rank_features)->required();
    rank->add_option("--labels", rank_labels)->required();
    rank->add_option("--out", rank_out);
    rank->add_option("--neighbors", rank_neighbors);

    auto* pattern = app.add_subcommand("pattern", "back-project encoder weights to edges/ROIs");
    std::string pattern_model, pattern_features, pattern_labels, pattern_out = "pattern_out";
    int pattern_rois = 0, pattern_hidden = -1;
    pattern->add_option("--model", pattern_model)->required();
    pattern->add_option("--rois", pattern_rois)->required();
    pattern->add_option("--hidden-index", pattern_hidden);
    pattern->add_option("--features", pattern_features);
    pattern->add_option("--labels", pattern_labels);
    pattern->add_option("--out", pattern_out);

    auto* run = app.add_subcommand("run", "full pipeline with report bundle");
    ConfigCli run_cli;
    run_cli.attach(run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) {
            synth_spec.seed = static_cast<std::uint64_t>(synth_seed);
            return cmd_synth(synth_spec, synth_out);
        }
        if (ingest_check->parsed()) return cmd_ingest_check(ingest_cli, ingest_report);
        if (fc->parsed()) return cmd_fc(fc_cli, fc_matrices);
        if (graph->parsed()) return cmd_graph(graph_cli, graph_edge_lists);
        if (encode->parsed()) {
            encode_config.seed = static_cast<std::uint64_t>(encode_seed);
            return cmd_encode(encode_features, encode_out, encode_config, encode_method,
                              encode_components);
        }
        if (train->parsed()) return cmd_train(train_cli);
        if (evaluate->parsed()) return cmd_evaluate(evaluate_cli, evaluate_meta);
        if (rank->parsed()) return cmd_rank(rank_features, rank_labels, rank_out, rank_neighbors);
        if (pattern->parsed())
            return cmd_pattern(pattern_model, pattern_rois, pattern_hidden, pattern_features,
                               pattern_labels, pattern_out);
        if (run->parsed()) return cmd_run(run_cli);
    } catch (const Error& e) {
        std::cerr << "wena: " << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "wena: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
