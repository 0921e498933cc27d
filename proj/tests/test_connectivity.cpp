#include "wena/connectivity.hpp"

#include "wena/error.hpp"
#include "wena/rng.hpp"

#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <set>

using namespace wena;

namespace {

TimeSeriesMatrix series_from(std::initializer_list<std::initializer_list<double>> rows) {
    const auto r = static_cast<Eigen::Index>(rows.size());
    const auto c = static_cast<Eigen::Index>(rows.begin()->size());
    Matrix m(r, c);
    Eigen::Index i = 0;
    for (const auto& row : rows) {
        Eigen::Index j = 0;
        for (const double v : row) m(i, j++) = v;
        ++i;
    }
    return TimeSeriesMatrix{m};
}

std::vector<double> column(const Matrix& m, Eigen::Index j) {
    std::vector<double> out(static_cast<std::size_t>(m.rows()));
    for (Eigen::Index i = 0; i < m.rows(); ++i) out[static_cast<std::size_t>(i)] = m(i, j);
    return out;
}

}  // namespace

TEST_CASE("pearson FC hand cases") {
    // identical columns correlate at exactly 1
    const auto twin = series_from({{1, 1, 5}, {2, 2, 4}, {3, 3, 2}, {0, 0, 7}});
    const ConnectivityMatrix fc = compute_fc(twin, FcMethod::Pearson);
    CHECK(fc.values(0, 1) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(fc.values(0, 0) == 1.0);

    // x=[1,2,3] vs y=[1,3,2] -> 0.5 by the product-moment formula
    const auto pair = series_from({{1, 1}, {2, 3}, {3, 2}});
    CHECK(compute_fc(pair, FcMethod::Pearson).values(0, 1) == doctest::Approx(0.5).epsilon(1e-14));

    // zero-variance column is an error under Pearson
    const auto flat = series_from({{1, 4}, {1, 5}, {1, 6}});
    CHECK_THROWS_AS(compute_fc(flat, FcMethod::Pearson), Error);
}

TEST_CASE("mutual information hand case: two occupied bins give ln 2") {
    // 10 values split evenly across two bins; MI(x, x) = H(x) = ln 2
    Matrix m(10, 2);
    for (int i = 0; i < 10; ++i) m(i, 0) = m(i, 1) = (i < 5) ? 0.0 : 1.0;
    const ConnectivityMatrix fc = compute_fc(TimeSeriesMatrix{m}, FcMethod::MutualInformation, 16);
    CHECK(fc.values(0, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
    CHECK(fc.values(0, 0) == doctest::Approx(std::log(2.0)).epsilon(1e-12));  // diagonal entropy
    CHECK_THROWS_AS(compute_fc(TimeSeriesMatrix{m}, FcMethod::MutualInformation, 1), Error);
}

TEST_CASE("distance correlation is 1 for affine relations") {
    Matrix m(6, 2);
    for (int i = 0; i < 6; ++i) {
        m(i, 0) = 0.7 * i * i - 2.0 * i;  // any non-constant x
        m(i, 1) = 3.0 * m(i, 0) + 1.0;
    }
    const ConnectivityMatrix fc = compute_fc(TimeSeriesMatrix{m}, FcMethod::DistanceCorrelation);
    CHECK(fc.values(0, 1) == doctest::Approx(1.0).epsilon(1e-12));

    // constant series defined as 0
    Matrix flat(4, 2);
    flat << 1, 2, 1, 3, 1, 4, 1, 5;
    const ConnectivityMatrix fc2 =
        compute_fc(TimeSeriesMatrix{flat}, FcMethod::DistanceCorrelation);
    CHECK(fc2.values(0, 1) == 0.0);
    CHECK(fc2.values(0, 0) == 0.0);
}

TEST_CASE("all three estimators match definitional oracles on random input") {
    Rng rng(101);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix m(20, 8);
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            for (Eigen::Index j = 0; j < m.cols(); ++j) m(i, j) = rng.uniform(-3.0, 3.0);
        const TimeSeriesMatrix ts{m};

        const ConnectivityMatrix pc = compute_fc(ts, FcMethod::Pearson);
        const ConnectivityMatrix mi = compute_fc(ts, FcMethod::MutualInformation, 16);
        const ConnectivityMatrix dc = compute_fc(ts, FcMethod::DistanceCorrelation);

        for (Eigen::Index a = 0; a < 8; ++a) {
            for (Eigen::Index b = a + 1; b < 8; ++b) {
                const auto xa = column(m, a);
                const auto xb = column(m, b);
                CHECK(pc.values(a, b) == doctest::Approx(oracle::pearson(xa, xb)).epsilon(1e-10));
                CHECK(mi.values(a, b) ==
                      doctest::Approx(oracle::mutual_information(xa, xb, 16)).epsilon(1e-10));
                CHECK(dc.values(a, b) ==
                      doctest::Approx(oracle::distance_correlation(xa, xb)).epsilon(1e-10));
            }
            CHECK(mi.values(a, a) ==
                  doctest::Approx(oracle::entropy(column(m, a), 16)).epsilon(1e-10));
        }
    }
}

TEST_CASE("pearson and dcor are invariant to positive affine rescaling") {
    Rng rng(55);
    Matrix m(15, 4);
    for (Eigen::Index i = 0; i < 15; ++i)
        for (Eigen::Index j = 0; j < 4; ++j) m(i, j) = rng.gaussian();

    Matrix scaled = m;
    for (Eigen::Index j = 0; j < 4; ++j)
        scaled.col(j) = (m.col(j).array() * (0.5 + j) + (j - 1.5)).matrix();

    for (const auto method : {FcMethod::Pearson, FcMethod::DistanceCorrelation}) {
        const Matrix base = compute_fc(TimeSeriesMatrix{m}, method).values;
        const Matrix after = compute_fc(TimeSeriesMatrix{scaled}, method).values;
        CHECK((base - after).array().abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("edge vectorization order and length") {
    ConnectivityMatrix fc;
    fc.values.resize(4, 4);
    fc.values << 1, 5, 6, 7,
                 5, 1, 8, 9,
                 6, 8, 1, 10,
                 7, 9, 10, 1;
    const EdgeVector edges = vectorize_edges(fc);
    REQUIRE(edges.values.size() == 6);
    // row-major upper triangle: (0,1),(0,2),(0,3),(1,2),(1,3),(2,3)
    Vector expected(6);
    expected << 5, 6, 7, 8, 9, 10;
    CHECK(edges.values == expected);

    ConnectivityMatrix big;
    big.values = Matrix::Identity(160, 160);
    CHECK(vectorize_edges(big).values.size() == 12720);
    CHECK(vectorize_edges(big).values.array().abs().maxCoeff() == 0.0);

    for (Eigen::Index k = 0; k < 6; ++k) {
        const auto [i, j] = edge_endpoints(k, 4);
        CHECK(fc.values(i, j) == edges.values(k));
    }
}

TEST_CASE("threshold keeps ceil(fraction * E) edges with deterministic ties") {
    // N=5 complete graph, weights 1..10 laid on the upper triangle
    ConnectivityMatrix fc;
    fc.values = Matrix::Zero(5, 5);
    double w = 1.0;
    for (Eigen::Index i = 0; i < 5; ++i)
        for (Eigen::Index j = i + 1; j < 5; ++j) {
            fc.values(i, j) = fc.values(j, i) = w;
            w += 1.0;
        }
    const SparseNetwork net = threshold_network(fc, 0.2);
    REQUIRE(net.edges.size() == 2);  // ceil(0.2 * 10)
    std::multiset<double> kept;
    for (const auto& e : net.edges) kept.insert(e.weight);
    CHECK(kept == std::multiset<double>{9.0, 10.0});

    CHECK(threshold_network(fc, 1.0).edges.size() == 10);

    // all-equal weights: ties resolved to lexicographically smallest pairs
    ConnectivityMatrix equal;
    equal.values = Matrix::Constant(5, 5, 0.5);
    const SparseNetwork tie_net = threshold_network(equal, 0.2);
    REQUIRE(tie_net.edges.size() == 2);
    CHECK(tie_net.edges[0].i == 0);
    CHECK(tie_net.edges[0].j == 1);
    CHECK(tie_net.edges[1].i == 0);
    CHECK(tie_net.edges[1].j == 2);

    CHECK_THROWS_AS(threshold_network(fc, 0.0), Error);
    CHECK_THROWS_AS(threshold_network(fc, 1.5), Error);
}

TEST_CASE("threshold retains strong negative edges by magnitude") {
    ConnectivityMatrix fc;
    fc.values = Matrix::Zero(3, 3);
    fc.values(0, 1) = fc.values(1, 0) = -0.9;
    fc.values(0, 2) = fc.values(2, 0) = 0.4;
    fc.values(1, 2) = fc.values(2, 1) = 0.1;
    const SparseNetwork net = threshold_network(fc, 0.34);  // ceil(0.34*3) = 2
    REQUIRE(net.edges.size() == 2);
    CHECK(net.edges[0].i == 0);
    CHECK(net.edges[0].j == 1);
    CHECK(net.edges[0].weight == doctest::Approx(0.9));  // stored as |w|
}

TEST_CASE("threshold cardinality is exact for all N <= 50 and fraction grid") {
    Rng rng(77);
    for (Eigen::Index n = 5; n <= 50; n += 5) {
        ConnectivityMatrix fc;
        fc.values = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = i + 1; j < n; ++j)
                fc.values(i, j) = fc.values(j, i) = rng.uniform(-1.0, 1.0);
        const Eigen::Index total = n * (n - 1) / 2;
        for (double fraction = 0.05; fraction <= 1.0001; fraction += 0.05) {
            const double f = std::min(fraction, 1.0);
            const auto expected =
                static_cast<std::size_t>(std::ceil(f * static_cast<double>(total)));
            CHECK(threshold_network(fc, f).edges.size() == expected);
        }
    }
}

TEST_CASE("vectorize composed with symmetric reconstruction is the identity") {
    Rng rng(31);
    const Eigen::Index n = 9;
    ConnectivityMatrix fc;
    fc.values = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = i + 1; j < n; ++j)
            fc.values(i, j) = fc.values(j, i) = rng.uniform(-1.0, 1.0);

    const EdgeVector edges = vectorize_edges(fc);
    ConnectivityMatrix rebuilt;
    rebuilt.values = Matrix::Zero(n, n);
    for (Eigen::Index k = 0; k < edges.values.size(); ++k) {
        const auto [i, j] = edge_endpoints(k, n);
        rebuilt.values(i, j) = rebuilt.values(j, i) = edges.values(k);
    }
    CHECK((vectorize_edges(rebuilt).values - edges.values).array().abs().maxCoeff() == 0.0);
}
