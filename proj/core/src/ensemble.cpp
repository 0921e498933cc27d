#include "wena/ensemble.hpp"

#include "wena/error.hpp"
#include "wena/evaluation.hpp"
#include "wena/rng.hpp"
#include "wena/stats.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace wena {

namespace {

constexpr double kCorrelationFloor = 1e-6;
constexpr double kMaeFloor = 1e-12;

StreamScore score_stream(const Vector& y, const Vector& predictions) {
    StreamScore score;
    const auto r = pearson(y, predictions);
    score.degenerate = !r.has_value();
    score.correlation = r.value_or(0.0);
    score.mae = (y - predictions).array().abs().mean();
    return score;
}

Vector ratio_weights(const std::vector<StreamScore>& scores, bool clamp_negative,
                     bool* clamped) {
    if (scores.empty())
        throw Error(ErrorCode::InvalidArgument, "weight operator needs >= 1 stream");
    if (clamped) *clamped = false;
    Vector ratios(static_cast<Eigen::Index>(scores.size()));
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const StreamScore& s = scores[i];
        if (!(s.mae >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "stream MAE must be nonnegative");
        double correlation = s.degenerate ? 0.0 : s.correlation;
        if (clamp_negative && correlation < kCorrelationFloor) {
            correlation = kCorrelationFloor;
            if (clamped) *clamped = true;
        }
        ratios(static_cast<Eigen::Index>(i)) = correlation / std::max(s.mae, kMaeFloor);
    }
    const double total = ratios.sum();
    if (total == 0.0)
        throw Error(ErrorCode::DegenerateWeights, "all correlation/MAE ratios are zero");
    return ratios / total;
}

RegressorSpec with_seed(RegressorSpec spec, std::uint64_t seed) {
    spec.seed = seed;
    return spec;
}

std::string stream_label(const std::string& block, const RegressorSpec& spec) {
    return block.empty() ? regressor_kind_name(spec.kind)
                         : block + "/" + regressor_kind_name(spec.kind);
}

// Out-of-fold (or resubstitution) predictions for one stream.
OofResult stream_predictions(const Matrix& x, const Vector& y, const RegressorSpec& spec,
                             int folds, std::uint64_t seed, bool resubstitution) {
    if (resubstitution) {
        const TrainedRegressor model = fit_regressor(x, y, spec);
        OofResult result;
        result.predictions = model.predict(x);
        result.score = score_stream(y, result.predictions);
        return result;
    }
    return out_of_fold_predictions(x, y, spec, folds, seed);
}

void check_blocks(const std::vector<FeatureBlock>& blocks, const Vector& y) {
    if (blocks.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one feature block");
    for (const auto& block : blocks) {
        if (block.features.rows() != y.size())
            throw Error(ErrorCode::DimensionMismatch,
                        "block '" + block.name + "' row count != label count");
    }
}

}  // namespace

StackConfig default_stack_config() {
    StackConfig config;
    config.first_layer_models = {{RegressorKind::EnsembleTree, {}, 0},
                                 {RegressorKind::Ridge, {}, 0}};
    config.inner_models = config.first_layer_models;
    config.fusion_models = config.first_layer_models;
    return config;
}

Vector weight_operator(const std::vector<StreamScore>& scores, bool clamp_negative,
                       bool* clamped) {
    return ratio_weights(scores, clamp_negative, clamped);
}

Vector fusion_operator(const std::vector<StreamScore>& scores, bool clamp_negative,
                       bool* clamped) {
    return ratio_weights(scores, clamp_negative, clamped);
}

OofResult out_of_fold_predictions(const Matrix& x, const Vector& y, const RegressorSpec& spec,
                                  int folds, std::uint64_t seed) {
    if (folds < 2) throw Error(ErrorCode::InvalidArgument, "out-of-fold needs >= 2 folds");
    if (y.size() < folds)
        throw Error(ErrorCode::InvalidArgument, "out-of-fold needs S >= folds");

    const FoldAssignment fa = kfold_split(y.size(), folds, seed);
    const auto test_rows = fa.fold_rows();

    OofResult result;
    result.predictions.resize(y.size());
    for (int fold = 0; fold < folds; ++fold) {
        const auto train = fa.train_rows(fold);
        const auto& test = test_rows[static_cast<std::size_t>(fold)];

        Matrix train_x(static_cast<Eigen::Index>(train.size()), x.cols());
        Vector train_y(static_cast<Eigen::Index>(train.size()));
        for (std::size_t i = 0; i < train.size(); ++i) {
            train_x.row(static_cast<Eigen::Index>(i)) = x.row(train[i]);
            train_y(static_cast<Eigen::Index>(i)) = y(train[i]);
        }
        Matrix test_x(static_cast<Eigen::Index>(test.size()), x.cols());
        for (std::size_t i = 0; i < test.size(); ++i)
            test_x.row(static_cast<Eigen::Index>(i)) = x.row(test[i]);

        const TrainedRegressor model = fit_regressor(train_x, train_y, spec);
        const Vector predictions = model.predict(test_x);
        for (std::size_t i = 0; i < test.size(); ++i)
            result.predictions(test[i]) = predictions(static_cast<Eigen::Index>(i));
    }
    result.score = score_stream(y, result.predictions);
    return result;
}

namespace {

// Shared machinery for weighted and conventional stacks. The conventional
// variant pins all Eq. 5 weights to 1 and fuses with a single meta-model.
TrainedStack fit_stack_impl(const std::vector<FeatureBlock>& blocks, const Vector& y,
                            const StackConfig& config, bool weighted,
                            const RegressorSpec* meta_model) {
    check_blocks(blocks, y);
    if (config.layers < 2 || config.layers > 4)
        throw Error(ErrorCode::LayersOutOfRange,
                    "stack layers must be in [2, 4], got " + std::to_string(config.layers));
    if (config.first_layer_models.empty())
        throw Error(ErrorCode::InvalidArgument, "first_layer_models must be nonempty");
    if (config.layers > 2 && config.inner_models.empty())
        throw Error(ErrorCode::InvalidArgument, "inner_models must be nonempty for layers > 2");
    if (weighted && config.fusion_models.empty())
        throw Error(ErrorCode::InvalidArgument, "fusion_models must be nonempty");

    TrainedStack stack;
    stack.config = config;
    stack.conventional = !weighted;
    for (const auto& block : blocks) {
        stack.block_names.push_back(block.name);
        stack.block_dims.push_back(block.features.cols());
    }

    // ----- first layer: one stream per (block, model) pair -----
    std::vector<StackStream> first_layer;
    std::vector<StreamScore> scores;
    Matrix columns(y.size(),
                   static_cast<Eigen::Index>(blocks.size() * config.first_layer_models.size()));
    Eigen::Index column = 0;
    std::uint64_t stream_index = 0;
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        for (const auto& spec : config.first_layer_models) {
            const RegressorSpec seeded =
                with_seed(spec, derive_seed(config.seed, 1, stream_index));
            const OofResult oof =
                stream_predictions(blocks[b].features.values, y, seeded, config.inner_folds,
                                   derive_seed(config.seed, 0x101, 0), config.resubstitution);
            StackStream stream;
            stream.name = stream_label(blocks[b].name, spec);
            stream.block_index = static_cast<int>(b);
            stream.spec = seeded;
            stream.model = fit_regressor(blocks[b].features.values, y, seeded);
            stream.score = oof.score;
            columns.col(column++) = oof.predictions;
            scores.push_back(oof.score);
            first_layer.push_back(std::move(stream));
            ++stream_index;
        }
    }

    bool clamped = false;
    Vector weights;
    if (weighted) {
        weights = weight_operator(scores, true, &clamped);
        stack.weights_clamped = stack.weights_clamped || clamped;
    } else {
        weights = Vector::Ones(static_cast<Eigen::Index>(scores.size()));
    }
    for (std::size_t i = 0; i < first_layer.size(); ++i)
        first_layer[i].weight = weights(static_cast<Eigen::Index>(i));
    stack.layers.push_back(std::move(first_layer));

    Matrix features = columns * weights.asDiagonal();

    // ----- middle layers (layers == 3 or 4) -----
    for (int layer = 2; layer < config.layers; ++layer) {
        std::vector<StackStream> middle;
        std::vector<StreamScore> layer_scores;
        Matrix layer_columns(y.size(), static_cast<Eigen::Index>(config.inner_models.size()));
        Eigen::Index col = 0;
        stream_index = 0;
        for (const auto& spec : config.inner_models) {
            const RegressorSpec seeded = with_seed(
                spec, derive_seed(config.seed, static_cast<std::uint64_t>(layer), stream_index));
            const OofResult oof = stream_predictions(
                features, y, seeded, config.inner_folds,
                derive_seed(config.seed, 0x100 + static_cast<std::uint64_t>(layer), 0),
                config.resubstitution);
            StackStream stream;
            stream.name = stream_label("", spec);
            stream.spec = seeded;
            stream.model = fit_regressor(features, y, seeded);
            stream.score = oof.score;
            layer_columns.col(col++) = oof.predictions;
            layer_scores.push_back(oof.score);
            middle.push_back(std::move(stream));
            ++stream_index;
        }
        Vector layer_weights;
        if (weighted) {
            layer_weights = weight_operator(layer_scores, true, &clamped);
            stack.weights_clamped = stack.weights_clamped || clamped;
        } else {
            layer_weights = Vector::Ones(static_cast<Eigen::Index>(layer_scores.size()));
        }
        for (std::size_t i = 0; i < middle.size(); ++i)
            middle[i].weight = layer_weights(static_cast<Eigen::Index>(i));
        stack.layers.push_back(std::move(middle));
        features = layer_columns * layer_weights.asDiagonal();
    }

    // ----- fusion layer -----
    std::vector<RegressorSpec> fusion_specs;
    if (weighted) {
        fusion_specs = config.fusion_models;
    } else {
        fusion_specs = {*meta_model};
    }
    std::vector<StreamScore> fusion_scores;
    stream_index = 0;
    for (const auto& spec : fusion_specs) {
        const RegressorSpec seeded =
            with_seed(spec, derive_seed(config.seed, 0xFu, stream_index));
        const OofResult oof = stream_predictions(features, y, seeded, config.inner_folds,
                                                 derive_seed(config.seed, 0x10F, 0),
                                                 config.resubstitution);
        StackStream stream;
        stream.name = stream_label("", spec);
        stream.spec = seeded;
        stream.model = fit_regressor(features, y, seeded);
        stream.score = oof.score;
        fusion_scores.push_back(oof.score);
        stack.fusion.push_back(std::move(stream));
        ++stream_index;
    }
    if (weighted) {
        Vector fusion_weights = fusion_operator(fusion_scores, true, &clamped);
        stack.weights_clamped = stack.weights_clamped || clamped;
        for (std::size_t i = 0; i < stack.fusion.size(); ++i)
            stack.fusion[i].weight = fusion_weights(static_cast<Eigen::Index>(i));
    } else {
        stack.fusion.front().weight = 1.0;
    }
    return stack;
}

}  // namespace

TrainedStack fit_weighted_stack(const std::vector<FeatureBlock>& blocks, const Vector& y,
                                const StackConfig& config) {
    return fit_stack_impl(blocks, y, config, true, nullptr);
}

TrainedStack fit_conventional_stack(const std::vector<FeatureBlock>& blocks, const Vector& y,
                                    const RegressorSpec& meta_model, const StackConfig& config) {
    return fit_stack_impl(blocks, y, config, false, &meta_model);
}

Vector predict_stack(const TrainedStack& stack, const std::vector<FeatureBlock>& blocks) {
    if (blocks.size() != stack.block_names.size())
        throw Error(ErrorCode::DimensionMismatch, "predict_stack: block count mismatch");
    for (std::size_t b = 0; b < blocks.size(); ++b) {
        if (blocks[b].name != stack.block_names[b])
            throw Error(ErrorCode::InvalidArgument,
                        "predict_stack: block '" + blocks[b].name + "' does not match '" +
                            stack.block_names[b] + "'");
        if (blocks[b].features.cols() != stack.block_dims[b])
            throw Error(ErrorCode::DimensionMismatch,
                        "predict_stack: block '" + blocks[b].name + "' dimension mismatch");
    }
    const Eigen::Index q = blocks.empty() ? 0 : blocks.front().features.rows();
    if (q == 0) return Vector();

    const auto& first_layer = stack.layers.front();
    Matrix features(q, static_cast<Eigen::Index>(first_layer.size()));
    for (std::size_t i = 0; i < first_layer.size(); ++i) {
        const auto& stream = first_layer[i];
        features.col(static_cast<Eigen::Index>(i)) =
            stream.weight *
            stream.model.predict(blocks[static_cast<std::size_t>(stream.block_index)].features.values);
    }

    for (std::size_t layer = 1; layer < stack.layers.size(); ++layer) {
        const auto& streams = stack.layers[layer];
        Matrix next(q, static_cast<Eigen::Index>(streams.size()));
        for (std::size_t i = 0; i < streams.size(); ++i)
            next.col(static_cast<Eigen::Index>(i)) =
                streams[i].weight * streams[i].model.predict(features);
        features = std::move(next);
    }

    Vector out = Vector::Zero(q);
    for (const auto& stream : stack.fusion) out += stream.weight * stream.model.predict(features);
    return out;
}

// ------------------------------------------------------------- JSON IO ----

namespace {

nlohmann::json spec_to_json(const RegressorSpec& spec) {
    nlohmann::json hyper = nlohmann::json::object();
    for (const auto& [key, value] : spec.hyper) hyper[key] = value;
    return {{"kind", regressor_kind_name(spec.kind)}, {"hyper", hyper}, {"seed", spec.seed}};
}

RegressorSpec spec_from_json(const nlohmann::json& doc) {
    RegressorSpec spec;
    spec.kind = parse_regressor_kind(doc.at("kind").get<std::string>());
    for (const auto& [key, value] : doc.at("hyper").items())
        spec.hyper[key] = value.get<double>();
    spec.seed = doc.at("seed").get<std::uint64_t>();
    return spec;
}

nlohmann::json stream_to_json(const StackStream& stream) {
    return {{"name", stream.name},
            {"block_index", stream.block_index},
            {"spec", spec_to_json(stream.spec)},
            {"model", nlohmann::json::parse(regressor_to_json(stream.model))},
            {"score",
             {{"correlation", stream.score.correlation},
              {"mae", stream.score.mae},
              {"degenerate", stream.score.degenerate}}},
            {"weight", stream.weight}};
}

StackStream stream_from_json(const nlohmann::json& doc) {
    StackStream stream;
    stream.name = doc.at("name").get<std::string>();
    stream.block_index = doc.at("block_index").get<int>();
    stream.spec = spec_from_json(doc.at("spec"));
    stream.model = regressor_from_json(doc.at("model").dump());
    stream.score.correlation = doc.at("score").at("correlation").get<double>();
    stream.score.mae = doc.at("score").at("mae").get<double>();
    stream.score.degenerate = doc.at("score").at("degenerate").get<bool>();
    stream.weight = doc.at("weight").get<double>();
    return stream;
}

nlohmann::json config_to_json(const StackConfig& config) {
    auto specs = [](const std::vector<RegressorSpec>& list) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& spec : list) arr.push_back(spec_to_json(spec));
        return arr;
    };
    return {{"layers", config.layers},
            {"first_layer_models", specs(config.first_layer_models)},
            {"inner_models", specs(config.inner_models)},
            {"fusion_models", specs(config.fusion_models)},
            {"inner_folds", config.inner_folds},
            {"seed", config.seed},
            {"resubstitution", config.resubstitution}};
}

StackConfig config_from_json(const nlohmann::json& doc) {
    StackConfig config;
    config.layers = doc.at("layers").get<int>();
    auto specs = [](const nlohmann::json& arr) {
        std::vector<RegressorSpec> list;
        for (const auto& item : arr) list.push_back(spec_from_json(item));
        return list;
    };
    config.first_layer_models = specs(doc.at("first_layer_models"));
    config.inner_models = specs(doc.at("inner_models"));
    config.fusion_models = specs(doc.at("fusion_models"));
    config.inner_folds = doc.at("inner_folds").get<int>();
    config.seed = doc.at("seed").get<std::uint64_t>();
    config.resubstitution = doc.at("resubstitution").get<bool>();
    return config;
}

}  // namespace

std::string stack_to_json(const TrainedStack& stack) {
    nlohmann::json doc;
    doc["config"] = config_to_json(stack.config);
    doc["block_names"] = stack.block_names;
    doc["block_dims"] = stack.block_dims;
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& layer : stack.layers) {
        nlohmann::json streams = nlohmann::json::array();
        for (const auto& stream : layer) streams.push_back(stream_to_json(stream));
        layers.push_back(std::move(streams));
    }
    doc["layers"] = std::move(layers);
    nlohmann::json fusion = nlohmann::json::array();
    for (const auto& stream : stack.fusion) fusion.push_back(stream_to_json(stream));
    doc["fusion"] = std::move(fusion);
    doc["conventional"] = stack.conventional;
    doc["weights_clamped"] = stack.weights_clamped;
    return doc.dump(2);
}

TrainedStack stack_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    TrainedStack stack;
    stack.config = config_from_json(doc.at("config"));
    stack.block_names = doc.at("block_names").get<std::vector<std::string>>();
    for (const auto& dim : doc.at("block_dims"))
        stack.block_dims.push_back(dim.get<Eigen::Index>());
    for (const auto& layer_doc : doc.at("layers")) {
        std::vector<StackStream> layer;
        for (const auto& stream_doc : layer_doc) layer.push_back(stream_from_json(stream_doc));
        stack.layers.push_back(std::move(layer));
    }
    for (const auto& stream_doc : doc.at("fusion"))
        stack.fusion.push_back(stream_from_json(stream_doc));
    stack.conventional = doc.at("conventional").get<bool>();
    stack.weights_clamped = doc.at("weights_clamped").get<bool>();
    return stack;
}

void save_stack(const TrainedStack& stack, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path);
    out << stack_to_json(stack);
}

TrainedStack load_stack(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return stack_from_json(text);
}

}  // namespace wena
