#include "wena/connectivity.hpp"

#include "wena/csv.hpp"
#include "wena/error.hpp"
#include "wena/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wena {

const char* fc_method_name(FcMethod method) {
    switch (method) {
        case FcMethod::Pearson: return "pearson";
        case FcMethod::MutualInformation: return "mi";
        case FcMethod::DistanceCorrelation: return "dcor";
    }
    return "unknown";
}

FcMethod parse_fc_method(const std::string& name) {
    if (name == "pearson" || name == "pc") return FcMethod::Pearson;
    if (name == "mi" || name == "mutual_information") return FcMethod::MutualInformation;
    if (name == "dcor" || name == "dc" || name == "distance_correlation")
        return FcMethod::DistanceCorrelation;
    throw Error(ErrorCode::InvalidArgument, "unknown FC method '" + name + "'");
}

namespace {

Matrix pearson_fc(const Matrix& x) {
    const Eigen::Index t = x.rows();
    const Eigen::Index n = x.cols();
    Matrix centered = x.rowwise() - x.colwise().mean();
    Vector norms(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        norms(j) = centered.col(j).norm();
        if (norms(j) <= 0.0)
            throw Error(ErrorCode::ConstantSeries,
                        "zero-variance column " + std::to_string(j) + " under Pearson");
        centered.col(j) /= norms(j);
    }
    (void)t;
    Matrix fc = centered.transpose() * centered;
    // Clamp rounding spill and pin the diagonal.
    fc = fc.array().min(1.0).max(-1.0).matrix();
    fc.diagonal().setOnes();
    return fc;
}

// Equal-width bin index over [lo, hi]; the top edge is clamped into the last
// bin so max values stay in range.
inline int bin_index(double v, double lo, double width, int bins) {
    if (width <= 0.0) return 0;
    int idx = static_cast<int>((v - lo) / width);
    if (idx < 0) idx = 0;
    if (idx >= bins) idx = bins - 1;
    return idx;
}

Matrix mutual_information_fc(const Matrix& x, int bins) {
    const Eigen::Index t = x.rows();
    const Eigen::Index n = x.cols();
    const double inv_t = 1.0 / static_cast<double>(t);

    std::vector<std::vector<int>> binned(static_cast<std::size_t>(n),
                                         std::vector<int>(static_cast<std::size_t>(t)));
    std::vector<std::vector<double>> marginal(static_cast<std::size_t>(n),
                                              std::vector<double>(static_cast<std::size_t>(bins), 0.0));
    for (Eigen::Index j = 0; j < n; ++j) {
        const double lo = x.col(j).minCoeff();
        const double hi = x.col(j).maxCoeff();
        const double width = (hi - lo) / static_cast<double>(bins);
        for (Eigen::Index i = 0; i < t; ++i) {
            const int b = bin_index(x(i, j), lo, width, bins);
            binned[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = b;
            marginal[static_cast<std::size_t>(j)][static_cast<std::size_t>(b)] += inv_t;
        }
    }

    auto entropy = [&](Eigen::Index j) {
        double h = 0.0;
        for (double p : marginal[static_cast<std::size_t>(j)])
            if (p > 0.0) h -= p * std::log(p);
        return h;
    };

    Matrix fc = Matrix::Zero(n, n);
    std::vector<double> joint(static_cast<std::size_t>(bins * bins));
    for (Eigen::Index a = 0; a < n; ++a) {
        fc(a, a) = entropy(a);
        for (Eigen::Index b = a + 1; b < n; ++b) {
            std::fill(joint.begin(), joint.end(), 0.0);
            const auto& ba = binned[static_cast<std::size_t>(a)];
            const auto& bb = binned[static_cast<std::size_t>(b)];
            for (Eigen::Index i = 0; i < t; ++i)
                joint[static_cast<std::size_t>(ba[static_cast<std::size_t>(i)] * bins +
                                               bb[static_cast<std::size_t>(i)])] += inv_t;
            double mi = 0.0;
            for (int u = 0; u < bins; ++u) {
                const double pu = marginal[static_cast<std::size_t>(a)][static_cast<std::size_t>(u)];
                if (pu <= 0.0) continue;
                for (int v = 0; v < bins; ++v) {
                    const double pj = joint[static_cast<std::size_t>(u * bins + v)];
                    if (pj <= 0.0) continue;
                    const double pv = marginal[static_cast<std::size_t>(b)][static_cast<std::size_t>(v)];
                    mi += pj * std::log(pj / (pu * pv));
                }
            }
            // The plug-in estimate is nonnegative up to rounding.
            fc(a, b) = fc(b, a) = std::max(0.0, mi);
        }
    }
    return fc;
}

// Double-centered pairwise |x_i - x_j| distance matrix for one column.
Matrix centered_distance_matrix(const Vector& col) {
    const Eigen::Index t = col.size();
    Matrix d(t, t);
    for (Eigen::Index i = 0; i < t; ++i)
        for (Eigen::Index j = 0; j < t; ++j) d(i, j) = std::fabs(col(i) - col(j));
    const Vector row_means = d.rowwise().mean();
    const double grand_mean = d.mean();
    for (Eigen::Index i = 0; i < t; ++i)
        for (Eigen::Index j = 0; j < t; ++j)
            d(i, j) = d(i, j) - row_means(i) - row_means(j) + grand_mean;
    return d;
}

Matrix distance_correlation_fc(const Matrix& x) {
    const Eigen::Index t = x.rows();
    const Eigen::Index n = x.cols();
    const double inv_t2 = 1.0 / (static_cast<double>(t) * static_cast<double>(t));

    std::vector<Matrix> centered(static_cast<std::size_t>(n));
    Vector dvar(n);
    for (Eigen::Index j = 0; j < n; ++j) {
        centered[static_cast<std::size_t>(j)] = centered_distance_matrix(x.col(j));
        dvar(j) = centered[static_cast<std::size_t>(j)].squaredNorm() * inv_t2;
    }

    Matrix fc = Matrix::Zero(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        fc(a, a) = dvar(a) > 0.0 ? 1.0 : 0.0;
        for (Eigen::Index b = a + 1; b < n; ++b) {
            if (dvar(a) <= 0.0 || dvar(b) <= 0.0) continue;  // constant series -> 0
            const double dcov2 = (centered[static_cast<std::size_t>(a)].array() *
                                  centered[static_cast<std::size_t>(b)].array())
                                     .sum() *
                                 inv_t2;
            const double dcor2 = dcov2 / std::sqrt(dvar(a) * dvar(b));
            const double dcor = dcor2 > 0.0 ? std::sqrt(dcor2) : 0.0;
            fc(a, b) = fc(b, a) = std::min(1.0, dcor);
        }
    }
    return fc;
}

}  // namespace

ConnectivityMatrix compute_fc(const TimeSeriesMatrix& ts, FcMethod method, int mi_bins) {
    if (ts.t() < 3) throw Error(ErrorCode::TooFewTimePoints, "compute_fc needs T >= 3");
    if (ts.n() < 2) throw Error(ErrorCode::InvalidArgument, "compute_fc needs N >= 2");
    if (method == FcMethod::MutualInformation && mi_bins < 2)
        throw Error(ErrorCode::InvalidArgument, "mi_bins must be >= 2");

    ConnectivityMatrix fc;
    fc.method = method;
    switch (method) {
        case FcMethod::Pearson: fc.values = pearson_fc(ts.values); break;
        case FcMethod::MutualInformation: fc.values = mutual_information_fc(ts.values, mi_bins); break;
        case FcMethod::DistanceCorrelation: fc.values = distance_correlation_fc(ts.values); break;
    }
    return fc;
}

EdgeVector vectorize_edges(const ConnectivityMatrix& fc) {
    const Eigen::Index n = fc.n();
    EdgeVector edges;
    edges.n_rois = n;
    edges.values.resize(n * (n - 1) / 2);
    Eigen::Index k = 0;
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j) edges.values(k++) = fc.values(i, j);
    return edges;
}

SparseNetwork threshold_network(const ConnectivityMatrix& fc, double fraction) {
    if (!(fraction > 0.0) || fraction > 1.0)
        throw Error(ErrorCode::InvalidArgument, "threshold fraction must be in (0, 1]");
    const Eigen::Index n = fc.n();
    const Eigen::Index total_edges = n * (n - 1) / 2;
    const auto keep = static_cast<Eigen::Index>(
        std::ceil(fraction * static_cast<double>(total_edges)));

    std::vector<SparseEdge> all;
    all.reserve(static_cast<std::size_t>(total_edges));
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            all.push_back({i, j, std::fabs(fc.values(i, j))});

    std::stable_sort(all.begin(), all.end(), [](const SparseEdge& a, const SparseEdge& b) {
        if (a.weight != b.weight) return a.weight > b.weight;
        if (a.i != b.i) return a.i < b.i;
        return a.j < b.j;
    });

    SparseNetwork net;
    net.n = n;
    net.retained_fraction = fraction;
    net.edges.assign(all.begin(), all.begin() + keep);
    std::sort(net.edges.begin(), net.edges.end(), [](const SparseEdge& a, const SparseEdge& b) {
        return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    return net;
}

std::vector<std::string> edge_feature_names(Eigen::Index n_rois) {
    std::vector<std::string> names;
    names.reserve(static_cast<std::size_t>(n_rois * (n_rois - 1) / 2));
    char buf[32];
    for (Eigen::Index i = 0; i < n_rois; ++i)
        for (Eigen::Index j = i + 1; j < n_rois; ++j) {
            std::snprintf(buf, sizeof(buf), "edge_%03lld_%03lld", static_cast<long long>(i),
                          static_cast<long long>(j));
            names.emplace_back(buf);
        }
    return names;
}

std::pair<Eigen::Index, Eigen::Index> edge_endpoints(Eigen::Index edge_index, Eigen::Index n_rois) {
    if (edge_index < 0 || edge_index >= n_rois * (n_rois - 1) / 2)
        throw Error(ErrorCode::InvalidArgument, "edge index out of range");
    Eigen::Index k = edge_index;
    for (Eigen::Index i = 0; i < n_rois; ++i) {
        const Eigen::Index row_len = n_rois - 1 - i;
        if (k < row_len) return {i, i + 1 + k};
        k -= row_len;
    }
    throw Error(ErrorCode::InvalidArgument, "edge index out of range");
}

void write_connectivity_csv(const ConnectivityMatrix& fc, const std::string& path) {
    csv::write_numeric_table(path, fc.values);
}

void write_edge_list_csv(const SparseNetwork& net, const std::string& path) {
    std::string out = "i,j,weight\n";
    for (const auto& e : net.edges) {
        out += std::to_string(e.i) + "," + std::to_string(e.j) + "," +
               csv::format_number(e.weight) + "\n";
    }
    csv::write_text(path, out);
}

}  // namespace wena
