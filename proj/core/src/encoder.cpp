#include "wena/encoder.hpp"

#include "wena/csv.hpp"
#include "wena/error.hpp"
#include "wena/rng.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>

namespace wena {

namespace {

inline Matrix sigmoid(const Matrix& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

inline Vector sigmoid(const Vector& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

void check_batch(const AeModel& model, const Matrix& x) {
    if (x.rows() == 0) throw Error(ErrorCode::InvalidArgument, "empty batch");
    if (x.cols() != model.input_dim())
        throw Error(ErrorCode::DimensionMismatch,
                    "batch has " + std::to_string(x.cols()) + " features, model expects " +
                        std::to_string(model.input_dim()));
}

}  // namespace

Normalizer Normalizer::fit(const Matrix& train) {
    if (train.rows() < 1) throw Error(ErrorCode::InvalidArgument, "normalizer needs >= 1 row");
    Normalizer norm;
    norm.mins_ = train.colwise().minCoeff();
    norm.maxs_ = train.colwise().maxCoeff();
    return norm;
}

Normalizer Normalizer::from_bounds(Vector mins, Vector maxs) {
    if (mins.size() != maxs.size())
        throw Error(ErrorCode::DimensionMismatch, "normalizer bounds length mismatch");
    Normalizer norm;
    norm.mins_ = std::move(mins);
    norm.maxs_ = std::move(maxs);
    return norm;
}

Matrix Normalizer::transform(const Matrix& x) const {
    if (x.cols() != dim())
        throw Error(ErrorCode::DimensionMismatch, "normalizer dimension mismatch");
    Matrix out(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double range = maxs_(j) - mins_(j);
        if (range <= 0.0) {
            out.col(j).setConstant(0.5);
        } else {
            out.col(j) = ((x.col(j).array() - mins_(j)) / range).min(1.0).max(0.0).matrix();
        }
    }
    return out;
}

Vector Normalizer::transform_row(const Vector& x) const {
    Matrix m = transform(x.transpose());
    return m.row(0).transpose();
}

Vector ae_encode(const AeModel& model, const Vector& x) {
    if (x.size() != model.input_dim())
        throw Error(ErrorCode::DimensionMismatch, "ae_encode: input dimension mismatch");
    return sigmoid(Vector(model.weights_enc * x + model.bias_enc));
}

Vector ae_decode(const AeModel& model, const Vector& h) {
    if (h.size() != model.hidden_dim())
        throw Error(ErrorCode::DimensionMismatch, "ae_decode: hidden dimension mismatch");
    return sigmoid(Vector(model.weights_dec * h + model.bias_dec));
}

double ae_loss(const AeModel& model, const Matrix& x) {
    check_batch(model, x);
    const Matrix hidden = sigmoid(
        Matrix((x * model.weights_enc.transpose()).rowwise() + model.bias_enc.transpose()));
    const Matrix recon = sigmoid(
        Matrix((hidden * model.weights_dec.transpose()).rowwise() + model.bias_dec.transpose()));
    const double recon_err = (x - recon).squaredNorm() / static_cast<double>(x.rows());
    double decay = model.weights_enc.squaredNorm();
    if (model.config.decay_decoder) decay += model.weights_dec.squaredNorm();
    return recon_err + model.config.epsilon * decay;
}

AeGradients ae_gradient(const AeModel& model, const Matrix& x) {
    check_batch(model, x);
    const double inv_rows = 1.0 / static_cast<double>(x.rows());

    const Matrix hidden = sigmoid(
        Matrix((x * model.weights_enc.transpose()).rowwise() + model.bias_enc.transpose()));
    const Matrix recon = sigmoid(
        Matrix((hidden * model.weights_dec.transpose()).rowwise() + model.bias_dec.transpose()));

    // d(mean ||x-r||^2)/dz2, with r = sigma(z2)
    const Matrix delta_out =
        (2.0 * inv_rows * (recon - x).array() * recon.array() * (1.0 - recon.array())).matrix();
    const Matrix delta_hidden =
        ((delta_out * model.weights_dec).array() * hidden.array() * (1.0 - hidden.array()))
            .matrix();

    AeGradients grads;
    grads.weights_dec = delta_out.transpose() * hidden;
    grads.bias_dec = delta_out.colwise().sum().transpose();
    grads.weights_enc = delta_hidden.transpose() * x;
    grads.bias_enc = delta_hidden.colwise().sum().transpose();

    grads.weights_enc += 2.0 * model.config.epsilon * model.weights_enc;
    if (model.config.decay_decoder)
        grads.weights_dec += 2.0 * model.config.epsilon * model.weights_dec;
    return grads;
}

AeModel ae_train(const FeatureMatrix& train, const AeConfig& config) {
    if (train.rows() < 2) throw Error(ErrorCode::InvalidArgument, "ae_train needs >= 2 rows");
    if (config.hidden < 1 || config.epochs < 1 || !(config.learning_rate > 0.0) ||
        config.epsilon < 0.0)
        throw Error(ErrorCode::InvalidArgument, "invalid autoencoder config");

    const Eigen::Index input = train.cols();
    const Eigen::Index hidden = config.hidden;

    AeModel model;
    model.config = config;
    model.normalizer = Normalizer::fit(train.values);
    const Matrix x = model.normalizer.transform(train.values);

    Rng rng(derive_seed(config.seed, 0x4145u));  // dedicated init stream
    const double enc_bound = std::sqrt(6.0 / static_cast<double>(input + hidden));
    model.weights_enc.resize(hidden, input);
    for (Eigen::Index i = 0; i < hidden; ++i)
        for (Eigen::Index j = 0; j < input; ++j)
            model.weights_enc(i, j) = rng.uniform(-enc_bound, enc_bound);
    model.bias_enc = Vector::Zero(hidden);
    const double dec_bound = std::sqrt(6.0 / static_cast<double>(input + hidden));
    model.weights_dec.resize(input, hidden);
    for (Eigen::Index i = 0; i < input; ++i)
        for (Eigen::Index j = 0; j < hidden; ++j)
            model.weights_dec(i, j) = rng.uniform(-dec_bound, dec_bound);
    model.bias_dec = Vector::Zero(input);

    Matrix vel_w_enc = Matrix::Zero(hidden, input);
    Vector vel_b_enc = Vector::Zero(hidden);
    Matrix vel_w_dec = Matrix::Zero(input, hidden);
    Vector vel_b_dec = Vector::Zero(input);

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const AeGradients grads = ae_gradient(model, x);
        vel_w_enc = config.momentum * vel_w_enc - config.learning_rate * grads.weights_enc;
        vel_b_enc = config.momentum * vel_b_enc - config.learning_rate * grads.bias_enc;
        vel_w_dec = config.momentum * vel_w_dec - config.learning_rate * grads.weights_dec;
        vel_b_dec = config.momentum * vel_b_dec - config.learning_rate * grads.bias_dec;
        model.weights_enc += vel_w_enc;
        model.bias_enc += vel_b_enc;
        model.weights_dec += vel_w_dec;
        model.bias_dec += vel_b_dec;

        if (!model.weights_enc.allFinite() || !model.weights_dec.allFinite() ||
            !model.bias_enc.allFinite() || !model.bias_dec.allFinite()) {
            throw Error(ErrorCode::Diverged,
                        "training diverged at epoch " + std::to_string(epoch) +
                            "; lower learning_rate");
        }
    }

    model.final_loss = ae_loss(model, x);
    if (!std::isfinite(model.final_loss))
        throw Error(ErrorCode::Diverged, "non-finite final loss; lower learning_rate");
    return model;
}

FeatureMatrix ae_features(const AeModel& model, const FeatureMatrix& cohort) {
    if (cohort.cols() != model.input_dim())
        throw Error(ErrorCode::DimensionMismatch, "ae_features: dimension mismatch");
    const Matrix x = model.normalizer.transform(cohort.values);
    const Matrix hidden = sigmoid(
        Matrix((x * model.weights_enc.transpose()).rowwise() + model.bias_enc.transpose()));
    return make_feature_matrix(hidden, "ae_");
}

PatternReport extract_pattern(const AeModel& model, Eigen::Index hidden_index,
                              Eigen::Index n_rois, const std::vector<std::string>& roi_labels) {
    if (hidden_index < 0 || hidden_index >= model.hidden_dim())
        throw Error(ErrorCode::InvalidArgument, "hidden index out of range");
    const Eigen::Index n_edges = n_rois * (n_rois - 1) / 2;
    if (model.input_dim() != n_edges)
        throw Error(ErrorCode::DimensionMismatch,
                    "model input is not an edge vector of " + std::to_string(n_rois) + " ROIs");

    PatternReport report;
    report.hidden_index = hidden_index;
    report.edges.reserve(static_cast<std::size_t>(n_edges));
    Vector roi_importance = Vector::Zero(n_rois);

    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n_rois; ++i) {
        for (Eigen::Index j = i + 1; j < n_rois; ++j, ++k) {
            const double w = model.weights_enc(hidden_index, k);
            report.edges.push_back({i, j, w});
            roi_importance(i) += std::fabs(w);
            roi_importance(j) += std::fabs(w);
        }
    }

    std::stable_sort(report.edges.begin(), report.edges.end(),
                     [](const PatternEdge& a, const PatternEdge& b) {
                         return std::fabs(a.weight) > std::fabs(b.weight);
                     });

    report.rois.reserve(static_cast<std::size_t>(n_rois));
    for (Eigen::Index r = 0; r < n_rois; ++r) {
        PatternRoi roi;
        roi.roi = r;
        roi.importance = roi_importance(r);
        if (r < static_cast<Eigen::Index>(roi_labels.size()))
            roi.label = roi_labels[static_cast<std::size_t>(r)];
        report.rois.push_back(std::move(roi));
    }
    std::stable_sort(report.rois.begin(), report.rois.end(),
                     [](const PatternRoi& a, const PatternRoi& b) {
                         return a.importance > b.importance;
                     });
    return report;
}

FeatureMatrix pca_fit_transform(const FeatureMatrix& train, const FeatureMatrix& cohort,
                                int components) {
    if (train.rows() < 1) throw Error(ErrorCode::InvalidArgument, "pca needs training rows");
    if (cohort.cols() != train.cols())
        throw Error(ErrorCode::DimensionMismatch, "pca: cohort/train dimension mismatch");
    if (components < 1 ||
        components > std::min<Eigen::Index>(train.rows(), train.cols()))
        throw Error(ErrorCode::InvalidArgument,
                    "components must be in [1, min(rows, features)]");

    const Eigen::RowVectorXd mean = train.values.colwise().mean();
    const Matrix centered = train.values.rowwise() - mean;
    const Matrix covariance =
        centered.transpose() * centered /
        std::max(1.0, static_cast<double>(train.rows() - 1));

    Eigen::SelfAdjointEigenSolver<Matrix> solver(covariance);
    if (solver.info() != Eigen::Success)
        throw Error(ErrorCode::SingularSystem, "pca eigendecomposition failed");

    // Eigen returns eigenvalues ascending; take the trailing `components`.
    const Eigen::Index f = train.cols();
    Matrix loadings(f, components);
    for (int c = 0; c < components; ++c) {
        Vector v = solver.eigenvectors().col(f - 1 - c);
        Eigen::Index arg_max = 0;
        v.array().abs().maxCoeff(&arg_max);
        if (v(arg_max) < 0.0) v = -v;
        loadings.col(c) = v;
    }

    const Matrix projected = (cohort.values.rowwise() - mean) * loadings;
    return make_feature_matrix(projected, "pc_");
}

namespace {

nlohmann::json matrix_to_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const nlohmann::json& rows) {
    if (!rows.is_array() || rows.empty()) return Matrix();
    const Eigen::Index r = static_cast<Eigen::Index>(rows.size());
    const Eigen::Index c = static_cast<Eigen::Index>(rows[0].size());
    Matrix m(r, c);
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = rows[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    return m;
}

nlohmann::json vector_to_json(const Vector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_from_json(const nlohmann::json& arr) {
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i) v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

}  // namespace

std::string ae_model_to_json(const AeModel& model) {
    nlohmann::json doc;
    doc["config"] = {{"hidden", model.config.hidden},
                     {"epochs", model.config.epochs},
                     {"learning_rate", model.config.learning_rate},
                     {"momentum", model.config.momentum},
                     {"epsilon", model.config.epsilon},
                     {"decay_decoder", model.config.decay_decoder},
                     {"seed", model.config.seed}};
    doc["normalizer"] = {{"mins", vector_to_json(model.normalizer.mins())},
                         {"maxs", vector_to_json(model.normalizer.maxs())}};
    doc["W"] = matrix_to_json(model.weights_enc);
    doc["b"] = vector_to_json(model.bias_enc);
    doc["W_dec"] = matrix_to_json(model.weights_dec);
    doc["b_dec"] = vector_to_json(model.bias_dec);
    doc["final_loss"] = model.final_loss;
    return doc.dump(2);
}

AeModel ae_model_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    AeModel model;
    const auto& cfg = doc.at("config");
    model.config.hidden = cfg.at("hidden").get<int>();
    model.config.epochs = cfg.at("epochs").get<int>();
    model.config.learning_rate = cfg.at("learning_rate").get<double>();
    model.config.momentum = cfg.at("momentum").get<double>();
    model.config.epsilon = cfg.at("epsilon").get<double>();
    model.config.decay_decoder = cfg.at("decay_decoder").get<bool>();
    model.config.seed = cfg.at("seed").get<std::uint64_t>();
    model.normalizer = Normalizer::from_bounds(vector_from_json(doc.at("normalizer").at("mins")),
                                               vector_from_json(doc.at("normalizer").at("maxs")));
    model.weights_enc = matrix_from_json(doc.at("W"));
    model.bias_enc = vector_from_json(doc.at("b"));
    model.weights_dec = matrix_from_json(doc.at("W_dec"));
    model.bias_dec = vector_from_json(doc.at("b_dec"));
    model.final_loss = doc.at("final_loss").get<double>();
    return model;
}

void save_ae_model(const AeModel& model, const std::string& path) {
    csv::write_text(path, ae_model_to_json(model));
}

AeModel load_ae_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::FileNotFound, "cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ae_model_from_json(text);
}

}  // namespace wena
