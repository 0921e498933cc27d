#include "wena/regressors.hpp"

#include "wena/error.hpp"
#include "wena/rng.hpp"

#include <nlohmann/json.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace wena {

const char* regressor_kind_name(RegressorKind kind) {
    switch (kind) {
        case RegressorKind::Ridge: return "ridge";
        case RegressorKind::EnsembleTree: return "etr";
        case RegressorKind::Svr: return "svr";
        case RegressorKind::Elm: return "elm";
    }
    return "unknown";
}

RegressorKind parse_regressor_kind(const std::string& name) {
    if (name == "ridge" || name == "rr") return RegressorKind::Ridge;
    if (name == "etr" || name == "ensemble_tree") return RegressorKind::EnsembleTree;
    if (name == "svr") return RegressorKind::Svr;
    if (name == "elm" || name == "elmr") return RegressorKind::Elm;
    throw Error(ErrorCode::InvalidArgument, "unknown regressor kind '" + name + "'");
}

namespace {

void check_training_input(const Matrix& x, const Vector& y) {
    if (x.rows() != y.size())
        throw Error(ErrorCode::DimensionMismatch, "X rows and y length differ");
    if (x.rows() < 2) throw Error(ErrorCode::InvalidArgument, "need at least 2 training rows");
    if (!x.allFinite() || !y.allFinite())
        throw Error(ErrorCode::NonFiniteValue, "non-finite training data");
}

// Column means and standard deviations for the scale-sensitive models;
// constant columns get scale 1 so they map to zero after centering.
void fit_zscore(const Matrix& x, Vector& means, Vector& scales) {
    means = x.colwise().mean();
    scales.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double var =
            (x.col(j).array() - means(j)).square().sum() / static_cast<double>(x.rows());
        scales(j) = var > 1e-24 ? std::sqrt(var) : 1.0;
    }
}

Matrix apply_zscore(const Matrix& x, const Vector& means, const Vector& scales) {
    Matrix z(x.rows(), x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j)
        z.col(j) = (x.col(j).array() - means(j)) / scales(j);
    return z;
}

// ---------------------------------------------------------------- trees ----

struct TreeBuilder {
    const Matrix& x;
    const Vector& y;
    int max_depth;
    int min_leaf;
    std::vector<TreeNode> nodes;

    int build(std::vector<Eigen::Index>& rows, int depth) {
        const int node_index = static_cast<int>(nodes.size());
        nodes.emplace_back();

        double sum = 0.0;
        for (const Eigen::Index r : rows) sum += y(r);
        const double node_mean = sum / static_cast<double>(rows.size());
        nodes[static_cast<std::size_t>(node_index)].value = node_mean;

        double sse = 0.0;
        for (const Eigen::Index r : rows) {
            const double d = y(r) - node_mean;
            sse += d * d;
        }

        const bool depth_exhausted = max_depth > 0 && depth >= max_depth;
        if (depth_exhausted || static_cast<int>(rows.size()) < 2 * min_leaf || sse <= 1e-24)
            return node_index;

        int best_feature = -1;
        double best_threshold = 0.0;
        double best_score = sse - 1e-12;  // require a real SSE decrease

        std::vector<std::pair<double, Eigen::Index>> sorted;
        sorted.reserve(rows.size());
        for (Eigen::Index f = 0; f < x.cols(); ++f) {
            sorted.clear();
            for (const Eigen::Index r : rows) sorted.push_back({x(r, f), r});
            std::sort(sorted.begin(), sorted.end());

            // Prefix sums over the sorted order turn each candidate split
            // into an O(1) SSE evaluation.
            double left_sum = 0.0, left_sq = 0.0;
            double total_sq = 0.0;
            for (const auto& [xv, r] : sorted) total_sq += y(r) * y(r);

            const std::size_t count = sorted.size();
            for (std::size_t k = 0; k + 1 < count; ++k) {
                const double yv = y(sorted[k].second);
                left_sum += yv;
                left_sq += yv * yv;
                if (sorted[k].first == sorted[k + 1].first) continue;  // not a boundary
                const auto left_n = static_cast<double>(k + 1);
                const auto right_n = static_cast<double>(count - k - 1);
                if (left_n < min_leaf || right_n < min_leaf) continue;
                const double right_sum = sum - left_sum;
                const double right_sq = total_sq - left_sq;
                const double score = (left_sq - left_sum * left_sum / left_n) +
                                     (right_sq - right_sum * right_sum / right_n);
                if (score < best_score) {
                    best_score = score;
                    best_feature = static_cast<int>(f);
                    best_threshold = 0.5 * (sorted[k].first + sorted[k + 1].first);
                }
            }
        }

        if (best_feature < 0) return node_index;

        std::vector<Eigen::Index> left_rows, right_rows;
        left_rows.reserve(rows.size());
        right_rows.reserve(rows.size());
        for (const Eigen::Index r : rows) {
            if (x(r, best_feature) <= best_threshold)
                left_rows.push_back(r);
            else
                right_rows.push_back(r);
        }
        if (left_rows.empty() || right_rows.empty()) return node_index;

        rows.clear();
        rows.shrink_to_fit();

        const int left_index = build(left_rows, depth + 1);
        const int right_index = build(right_rows, depth + 1);
        TreeNode& node = nodes[static_cast<std::size_t>(node_index)];
        node.feature = best_feature;
        node.threshold = best_threshold;
        node.left = left_index;
        node.right = right_index;
        return node_index;
    }
};

double tree_predict(const TreeModel& tree, const Vector& row) {
    int idx = 0;
    while (tree.nodes[static_cast<std::size_t>(idx)].feature >= 0) {
        const TreeNode& node = tree.nodes[static_cast<std::size_t>(idx)];
        idx = row(node.feature) <= node.threshold ? node.left : node.right;
    }
    return tree.nodes[static_cast<std::size_t>(idx)].value;
}

// ------------------------------------------------------------------ SMO ----

struct SmoProblem {
    const Matrix& kernel;  // S x S RBF kernel
    const Vector& y;
    double c;
    double eps_tube;
    double tol;

    // Stacked variables v = (alpha, alpha*) with signs a = (+1, -1); the
    // gradient of 1/2 v'Qv + p'v is maintained incrementally.
    Vector v;
    Vector grad;
    Eigen::Index s;

    explicit SmoProblem(const Matrix& k, const Vector& labels, double c_, double eps_, double tol_)
        : kernel(k), y(labels), c(c_), eps_tube(eps_), tol(tol_), s(labels.size()) {
        v = Vector::Zero(2 * s);
        grad.resize(2 * s);
        for (Eigen::Index i = 0; i < s; ++i) {
            grad(i) = eps_tube - y(i);
            grad(i + s) = eps_tube + y(i);
        }
    }

    double sign(Eigen::Index i) const { return i < s ? 1.0 : -1.0; }
    Eigen::Index point(Eigen::Index i) const { return i < s ? i : i - s; }

    bool in_up_set(Eigen::Index i) const {
        return sign(i) > 0 ? v(i) < c : v(i) > 0;
    }
    bool in_low_set(Eigen::Index i) const {
        return sign(i) > 0 ? v(i) > 0 : v(i) < c;
    }

    // Maximal violating pair; returns false at optimality (violation < tol).
    bool select_pair(Eigen::Index& out_i, Eigen::Index& out_j, double& violation) const {
        double up_best = -std::numeric_limits<double>::infinity();
        double low_best = std::numeric_limits<double>::infinity();
        Eigen::Index up_idx = -1, low_idx = -1;
        for (Eigen::Index i = 0; i < 2 * s; ++i) {
            const double score = -sign(i) * grad(i);
            if (in_up_set(i) && score > up_best) {
                up_best = score;
                up_idx = i;
            }
            if (in_low_set(i) && score < low_best) {
                low_best = score;
                low_idx = i;
            }
        }
        violation = up_best - low_best;
        out_i = up_idx;
        out_j = low_idx;
        return up_idx >= 0 && low_idx >= 0 && violation >= tol;
    }

    // Joint move along d_i = a_i, d_j = -a_j (keeps the equality constraint).
    void update_pair(Eigen::Index i, Eigen::Index j) {
        const double ai = sign(i);
        const double aj = sign(j);
        const double kii = kernel(point(i), point(i));
        const double kjj = kernel(point(j), point(j));
        const double kij = kernel(point(i), point(j));
        double curvature = kii + kjj - 2.0 * kij;
        if (curvature <= 0.0) curvature = 1e-12;

        double step = -(ai * grad(i) - aj * grad(j)) / curvature;

        // Clip into the box for both coordinates.
        auto clip = [&](double coeff, double value) {
            // value + coeff*step must stay within [0, c]
            if (coeff > 0) {
                step = std::min(step, (c - value) / coeff);
                step = std::max(step, (0.0 - value) / coeff);
            } else {
                step = std::max(step, (c - value) / coeff);
                step = std::min(step, (0.0 - value) / coeff);
            }
        };
        clip(ai, v(i));
        clip(-aj, v(j));
        if (step == 0.0) return;

        v(i) += ai * step;
        v(j) -= aj * step;

        // grad += Q col_i * (ai*step) + Q col_j * (-aj*step);
        // Q(r, t) = a_r a_t K(point(r), point(t)).
        const double di = ai * step;
        const double dj = -aj * step;
        for (Eigen::Index r = 0; r < 2 * s; ++r) {
            const double ar = sign(r);
            grad(r) += ar * ai * kernel(point(r), point(i)) * di +
                       ar * aj * kernel(point(r), point(j)) * dj;
        }
    }

    // Bias from KKT-active (free) variables, midpoint of the bounds otherwise.
    double bias() const {
        double total = 0.0;
        int free_count = 0;
        for (Eigen::Index i = 0; i < 2 * s; ++i) {
            if (v(i) > 0.0 && v(i) < c) {
                total += -sign(i) * grad(i);
                ++free_count;
            }
        }
        if (free_count > 0) return total / free_count;

        double up_best = -std::numeric_limits<double>::infinity();
        double low_best = std::numeric_limits<double>::infinity();
        for (Eigen::Index i = 0; i < 2 * s; ++i) {
            const double score = -sign(i) * grad(i);
            if (in_up_set(i)) up_best = std::max(up_best, score);
            if (in_low_set(i)) low_best = std::min(low_best, score);
        }
        return 0.5 * (up_best + low_best);
    }
};

}  // namespace

// ----------------------------------------------------------------- fits ----

TrainedRegressor fit_ridge(const Matrix& x, const Vector& y, double lambda) {
    check_training_input(x, y);
    if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");

    const Eigen::RowVectorXd x_mean = x.colwise().mean();
    const double y_mean = y.mean();
    const Matrix xc = x.rowwise() - x_mean;
    const Vector yc = y.array() - y_mean;

    Matrix gram = xc.transpose() * xc;
    gram.diagonal().array() += lambda;

    if (lambda == 0.0) {
        Eigen::FullPivLU<Matrix> lu(gram);
        if (!lu.isInvertible())
            throw Error(ErrorCode::SingularSystem,
                        "ridge at lambda=0 requires full column rank");
    }

    RidgeModel model;
    model.beta = Eigen::LDLT<Matrix>(gram).solve(xc.transpose() * yc);
    model.intercept = y_mean - x_mean * model.beta;
    return TrainedRegressor(RegressorKind::Ridge, x.cols(), std::move(model));
}

TrainedRegressor fit_etr(const Matrix& x, const Vector& y, int trees, int max_depth,
                         int min_leaf, std::uint64_t seed, bool bootstrap) {
    check_training_input(x, y);
    if (trees < 1) throw Error(ErrorCode::InvalidArgument, "trees must be >= 1");
    if (min_leaf < 1) throw Error(ErrorCode::InvalidArgument, "min_leaf must be >= 1");

    const Eigen::Index s = x.rows();
    EtrModel model;
    model.trees.resize(static_cast<std::size_t>(trees));

    for (int t = 0; t < trees; ++t) {
        std::vector<Eigen::Index> rows;
        rows.reserve(static_cast<std::size_t>(s));
        if (bootstrap) {
            Rng rng(derive_seed(seed, 0x45545254u, static_cast<std::uint64_t>(t)));
            for (Eigen::Index i = 0; i < s; ++i)
                rows.push_back(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(s))));
            std::sort(rows.begin(), rows.end());
        } else {
            for (Eigen::Index i = 0; i < s; ++i) rows.push_back(i);
        }
        TreeBuilder builder{x, y, max_depth, min_leaf, {}};
        builder.build(rows, 0);
        model.trees[static_cast<std::size_t>(t)].nodes = std::move(builder.nodes);
    }
    return TrainedRegressor(RegressorKind::EnsembleTree, x.cols(), std::move(model));
}

TrainedRegressor fit_svr(const Matrix& x, const Vector& y, double c, double epsilon_tube,
                         double gamma, double tol, std::uint64_t seed, long max_iterations) {
    (void)seed;  // SMO with maximal-violating-pair selection is deterministic
    check_training_input(x, y);
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidArgument, "C must be > 0");
    if (epsilon_tube < 0.0) throw Error(ErrorCode::InvalidArgument, "epsilon_tube must be >= 0");
    if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be > 0");

    const Eigen::Index s = x.rows();
    if (gamma <= 0.0) gamma = 1.0 / static_cast<double>(x.cols());
    if (max_iterations <= 0) max_iterations = std::max<long>(200000, 2000L * s);

    SvrModel model;
    fit_zscore(x, model.feature_means, model.feature_scales);
    model.gamma = gamma;
    const Matrix z = apply_zscore(x, model.feature_means, model.feature_scales);

    Matrix kernel(s, s);
    for (Eigen::Index i = 0; i < s; ++i) {
        kernel(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < s; ++j) {
            const double dist2 = (z.row(i) - z.row(j)).squaredNorm();
            kernel(i, j) = kernel(j, i) = std::exp(-gamma * dist2);
        }
    }

    SmoProblem smo(kernel, y, c, epsilon_tube, tol);
    long iterations = 0;
    Eigen::Index i = 0, j = 0;
    double violation = 0.0;
    while (smo.select_pair(i, j, violation)) {
        smo.update_pair(i, j);
        if (++iterations > max_iterations) {
            throw Error(ErrorCode::NoConvergence,
                        "SMO exceeded " + std::to_string(max_iterations) +
                            " iterations; KKT violation " + std::to_string(violation));
        }
    }

    const Vector beta = smo.v.head(s) - smo.v.tail(s);
    model.bias = smo.bias();

    std::vector<Eigen::Index> keep;
    for (Eigen::Index k = 0; k < s; ++k)
        if (beta(k) != 0.0) keep.push_back(k);
    model.support_vectors.resize(static_cast<Eigen::Index>(keep.size()), x.cols());
    model.coefficients.resize(static_cast<Eigen::Index>(keep.size()));
    for (std::size_t k = 0; k < keep.size(); ++k) {
        model.support_vectors.row(static_cast<Eigen::Index>(k)) = z.row(keep[k]);
        model.coefficients(static_cast<Eigen::Index>(k)) = beta(keep[k]);
    }
    return TrainedRegressor(RegressorKind::Svr, x.cols(), std::move(model));
}

TrainedRegressor fit_elm(const Matrix& x, const Vector& y, int hidden, double lambda,
                         std::uint64_t seed) {
    check_training_input(x, y);
    if (hidden < 1) throw Error(ErrorCode::InvalidArgument, "hidden must be >= 1");
    if (lambda < 0.0) throw Error(ErrorCode::InvalidArgument, "lambda must be >= 0");

    ElmModel model;
    fit_zscore(x, model.feature_means, model.feature_scales);
    const Matrix z = apply_zscore(x, model.feature_means, model.feature_scales);

    Rng rng(derive_seed(seed, 0x454c4du));
    model.input_weights.resize(hidden, x.cols());
    for (Eigen::Index i = 0; i < hidden; ++i)
        for (Eigen::Index j = 0; j < x.cols(); ++j)
            model.input_weights(i, j) = rng.uniform(-1.0, 1.0);
    model.input_bias.resize(hidden);
    for (Eigen::Index i = 0; i < hidden; ++i) model.input_bias(i) = rng.uniform(-1.0, 1.0);

    const Matrix activations =
        (1.0 / (1.0 + (-((z * model.input_weights.transpose()).rowwise() +
                         model.input_bias.transpose()))
                           .array()
                           .exp()))
            .matrix();

    const double y_mean = y.mean();
    const Vector yc = y.array() - y_mean;
    Matrix gram = activations.transpose() * activations;
    gram.diagonal().array() += lambda;
    model.output_weights = Eigen::LDLT<Matrix>(gram).solve(activations.transpose() * yc);
    model.intercept = y_mean;
    return TrainedRegressor(RegressorKind::Elm, x.cols(), std::move(model));
}

TrainedRegressor fit_regressor(const Matrix& x, const Vector& y, const RegressorSpec& spec) {
    switch (spec.kind) {
        case RegressorKind::Ridge:
            return fit_ridge(x, y, spec.get("lambda", 1.0));
        case RegressorKind::EnsembleTree:
            return fit_etr(x, y, static_cast<int>(spec.get("trees", 100)),
                           static_cast<int>(spec.get("max_depth", 12)),
                           static_cast<int>(spec.get("min_leaf", 3)), spec.seed,
                           spec.get("bootstrap", 1.0) != 0.0);
        case RegressorKind::Svr:
            return fit_svr(x, y, spec.get("c", 10.0), spec.get("epsilon_tube", 0.1),
                           spec.get("gamma", 0.0), spec.get("tol", 1e-3), spec.seed);
        case RegressorKind::Elm:
            return fit_elm(x, y, static_cast<int>(spec.get("hidden", 200)),
                           spec.get("lambda", 1e-2), spec.seed);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown regressor kind");
}

// -------------------------------------------------------------- predict ----

double TrainedRegressor::predict_one(const Vector& row) const {
    if (row.size() != feature_dim_)
        throw Error(ErrorCode::DimensionMismatch, "predict: feature dimension mismatch");

    if (const auto* ridge = std::get_if<RidgeModel>(&model_)) {
        return ridge->intercept + row.dot(ridge->beta);
    }
    if (const auto* etr = std::get_if<EtrModel>(&model_)) {
        double total = 0.0;
        for (const auto& tree : etr->trees) total += tree_predict(tree, row);
        return total / static_cast<double>(etr->trees.size());
    }
    if (const auto* svr = std::get_if<SvrModel>(&model_)) {
        Vector z(row.size());
        for (Eigen::Index j = 0; j < row.size(); ++j)
            z(j) = (row(j) - svr->feature_means(j)) / svr->feature_scales(j);
        double value = svr->bias;
        for (Eigen::Index k = 0; k < svr->coefficients.size(); ++k) {
            const double dist2 = (svr->support_vectors.row(k).transpose() - z).squaredNorm();
            value += svr->coefficients(k) * std::exp(-svr->gamma * dist2);
        }
        return value;
    }
    const auto& elm = std::get<ElmModel>(model_);
    Vector z(row.size());
    for (Eigen::Index j = 0; j < row.size(); ++j)
        z(j) = (row(j) - elm.feature_means(j)) / elm.feature_scales(j);
    const Vector activation =
        (1.0 / (1.0 + (-(elm.input_weights * z + elm.input_bias)).array().exp())).matrix();
    return elm.intercept + activation.dot(elm.output_weights);
}

Vector TrainedRegressor::predict(const Matrix& x) const {
    if (x.rows() == 0) return Vector();
    Vector out(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) out(i) = predict_one(x.row(i).transpose());
    if (!out.allFinite())
        throw Error(ErrorCode::NonFiniteValue, "regressor produced non-finite prediction");
    return out;
}

// -------------------------------------------------------------- JSON IO ----

namespace {

nlohmann::json matrix_json(const Matrix& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(rows)}};
}

Matrix matrix_unjson(const nlohmann::json& doc) {
    const auto r = doc.at("rows").get<Eigen::Index>();
    const auto c = doc.at("cols").get<Eigen::Index>();
    Matrix m(r, c);
    const auto& data = doc.at("data");
    for (Eigen::Index i = 0; i < r; ++i)
        for (Eigen::Index j = 0; j < c; ++j)
            m(i, j) = data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].get<double>();
    return m;
}

nlohmann::json vector_json(const Vector& v) {
    nlohmann::json arr = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

Vector vector_unjson(const nlohmann::json& arr) {
    Vector v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t i = 0; i < arr.size(); ++i)
        v(static_cast<Eigen::Index>(i)) = arr[i].get<double>();
    return v;
}

}  // namespace

std::string regressor_to_json(const TrainedRegressor& model) {
    nlohmann::json doc;
    doc["kind"] = regressor_kind_name(model.kind());
    doc["feature_dim"] = model.feature_dim();
    switch (model.kind()) {
        case RegressorKind::Ridge: {
            const auto& m = model.as<RidgeModel>();
            doc["beta"] = vector_json(m.beta);
            doc["intercept"] = m.intercept;
            break;
        }
        case RegressorKind::EnsembleTree: {
            const auto& m = model.as<EtrModel>();
            nlohmann::json trees = nlohmann::json::array();
            for (const auto& tree : m.trees) {
                nlohmann::json nodes = nlohmann::json::array();
                for (const auto& n : tree.nodes)
                    nodes.push_back({n.feature, n.threshold, n.value, n.left, n.right});
                trees.push_back(std::move(nodes));
            }
            doc["trees"] = std::move(trees);
            break;
        }
        case RegressorKind::Svr: {
            const auto& m = model.as<SvrModel>();
            doc["support_vectors"] = matrix_json(m.support_vectors);
            doc["coefficients"] = vector_json(m.coefficients);
            doc["bias"] = m.bias;
            doc["gamma"] = m.gamma;
            doc["feature_means"] = vector_json(m.feature_means);
            doc["feature_scales"] = vector_json(m.feature_scales);
            break;
        }
        case RegressorKind::Elm: {
            const auto& m = model.as<ElmModel>();
            doc["input_weights"] = matrix_json(m.input_weights);
            doc["input_bias"] = vector_json(m.input_bias);
            doc["output_weights"] = vector_json(m.output_weights);
            doc["intercept"] = m.intercept;
            doc["feature_means"] = vector_json(m.feature_means);
            doc["feature_scales"] = vector_json(m.feature_scales);
            break;
        }
    }
    return doc.dump();
}

TrainedRegressor regressor_from_json(const std::string& text) {
    const auto doc = nlohmann::json::parse(text);
    const RegressorKind kind = parse_regressor_kind(doc.at("kind").get<std::string>());
    const auto feature_dim = doc.at("feature_dim").get<Eigen::Index>();
    switch (kind) {
        case RegressorKind::Ridge: {
            RidgeModel m;
            m.beta = vector_unjson(doc.at("beta"));
            m.intercept = doc.at("intercept").get<double>();
            return TrainedRegressor(kind, feature_dim, std::move(m));
        }
        case RegressorKind::EnsembleTree: {
            EtrModel m;
            for (const auto& tree_doc : doc.at("trees")) {
                TreeModel tree;
                for (const auto& n : tree_doc) {
                    TreeNode node;
                    node.feature = n[0].get<int>();
                    node.threshold = n[1].get<double>();
                    node.value = n[2].get<double>();
                    node.left = n[3].get<int>();
                    node.right = n[4].get<int>();
                    tree.nodes.push_back(node);
                }
                m.trees.push_back(std::move(tree));
            }
            return TrainedRegressor(kind, feature_dim, std::move(m));
        }
        case RegressorKind::Svr: {
            SvrModel m;
            m.support_vectors = matrix_unjson(doc.at("support_vectors"));
            m.coefficients = vector_unjson(doc.at("coefficients"));
            m.bias = doc.at("bias").get<double>();
            m.gamma = doc.at("gamma").get<double>();
            m.feature_means = vector_unjson(doc.at("feature_means"));
            m.feature_scales = vector_unjson(doc.at("feature_scales"));
            return TrainedRegressor(kind, feature_dim, std::move(m));
        }
        case RegressorKind::Elm: {
            ElmModel m;
            m.input_weights = matrix_unjson(doc.at("input_weights"));
            m.input_bias = vector_unjson(doc.at("input_bias"));
            m.output_weights = vector_unjson(doc.at("output_weights"));
            m.intercept = doc.at("intercept").get<double>();
            m.feature_means = vector_unjson(doc.at("feature_means"));
            m.feature_scales = vector_unjson(doc.at("feature_scales"));
            return TrainedRegressor(kind, feature_dim, std::move(m));
        }
    }
    throw Error(ErrorCode::ParseError, "unknown regressor kind in checkpoint");
}

}  // namespace wena
