#include "wena/synthetic.hpp"

#include "wena/connectivity.hpp"
#include "wena/ingest.hpp"
#include "wena/stats.hpp"

#include "support/tempdir.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace wena;

namespace {

// Mean Pearson FC over the planted edges, one value per subject.
Vector planted_edge_fc(const SyntheticCohort& cohort) {
    Vector mean_fc(static_cast<Eigen::Index>(cohort.subjects.size()));
    for (std::size_t s = 0; s < cohort.subjects.size(); ++s) {
        const ConnectivityMatrix fc =
            compute_fc(cohort.subjects[s].series, FcMethod::Pearson);
        double total = 0.0;
        for (const auto& [i, j] : cohort.planted) total += fc.values(i, j);
        mean_fc(static_cast<Eigen::Index>(s)) = total / static_cast<double>(cohort.planted.size());
    }
    return mean_fc;
}

}  // namespace

TEST_CASE("default cohort shape and determinism") {
    SynthSpec spec;
    spec.subjects = 20;  // keep the unit test small
    spec.seed = 5;
    const SyntheticCohort cohort = generate_cohort(spec);
    REQUIRE(cohort.subjects.size() == 20);
    CHECK(cohort.subjects[0].series.t() == 150);
    CHECK(cohort.subjects[0].series.n() == 20);
    CHECK(cohort.planted.size() == 15);
    // edge vectors from 20 ROIs have length 190
    CHECK(vectorize_edges(compute_fc(cohort.subjects[0].series, FcMethod::Pearson)).values.size() ==
          190);

    const SyntheticCohort again = generate_cohort(spec);
    CHECK(again.subjects[3].score == cohort.subjects[3].score);  // bitwise
    CHECK(again.subjects[7].series.values == cohort.subjects[7].series.values);
    CHECK(again.planted == cohort.planted);
}

TEST_CASE("zero signal strength leaves edges uninformative") {
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SynthSpec spec;
        spec.signal_strength = 0.0;
        spec.seed = seed;
        const SyntheticCohort cohort = generate_cohort(spec);

        Vector scores(static_cast<Eigen::Index>(cohort.subjects.size()));
        for (std::size_t s = 0; s < cohort.subjects.size(); ++s)
            scores(static_cast<Eigen::Index>(s)) = cohort.subjects[s].score;

        // max |r| between the score and any planted-edge FC stays small
        const Vector fc = planted_edge_fc(cohort);
        const double r = std::fabs(pearson(fc, scores).value_or(0.0));
        if (r < 0.25) ++ok;
    }
    CHECK(ok >= 3);  // median over 5 seeds
}

TEST_CASE("strong signal couples planted FC with the latent factor") {
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SynthSpec spec;
        spec.signal_strength = 0.8;
        spec.seed = seed;
        const SyntheticCohort cohort = generate_cohort(spec);

        Vector g(static_cast<Eigen::Index>(cohort.subjects.size()));
        for (std::size_t s = 0; s < cohort.subjects.size(); ++s)
            g(static_cast<Eigen::Index>(s)) = cohort.subjects[s].latent_g;

        const Vector fc = planted_edge_fc(cohort);
        if (pearson(fc, g).value_or(0.0) > 0.5) ++ok;
    }
    CHECK(ok >= 3);
}

TEST_CASE("planted-edge FC is monotonically associated with g (Spearman)") {
    SynthSpec spec;  // defaults
    spec.seed = 3;
    const SyntheticCohort cohort = generate_cohort(spec);
    const Vector fc = planted_edge_fc(cohort);
    Vector g(fc.size());
    for (Eigen::Index i = 0; i < fc.size(); ++i)
        g(i) = cohort.subjects[static_cast<std::size_t>(i)].latent_g;

    // Spearman = Pearson of ranks
    auto ranks = [](const Vector& v) {
        std::vector<Eigen::Index> order(static_cast<std::size_t>(v.size()));
        std::iota(order.begin(), order.end(), Eigen::Index{0});
        std::sort(order.begin(), order.end(),
                  [&](Eigen::Index a, Eigen::Index b) { return v(a) < v(b); });
        Vector r(v.size());
        for (std::size_t pos = 0; pos < order.size(); ++pos)
            r(order[pos]) = static_cast<double>(pos);
        return r;
    };
    const auto rho = pearson(ranks(fc), ranks(g));
    REQUIRE(rho.has_value());
    CHECK(*rho > 0.0);
    CHECK(correlation_p_value(*rho, fc.size()) < 0.01);
}

TEST_CASE("score variance decomposes as designed") {
    SynthSpec spec;
    spec.subjects = 1000;
    spec.rois = 4;          // series content irrelevant here
    spec.planted_edges = 2;
    spec.timepoints = 3;
    spec.noise_sd = 2.0;
    spec.seed = 11;
    const SyntheticCohort cohort = generate_cohort(spec);
    double mean = 0.0;
    for (const auto& s : cohort.subjects) mean += s.score;
    mean /= 1000.0;
    double var = 0.0;
    for (const auto& s : cohort.subjects) var += (s.score - mean) * (s.score - mean);
    var /= 999.0;
    const double expected = 36.0 + 4.0;
    CHECK(std::fabs(var - expected) / expected < 0.20);
}

TEST_CASE("age is negatively associated with the latent factor") {
    SynthSpec spec;
    spec.subjects = 400;
    spec.signal_strength = 0.6;
    spec.rois = 4;
    spec.planted_edges = 1;
    spec.timepoints = 3;
    spec.seed = 21;
    const SyntheticCohort cohort = generate_cohort(spec);
    Vector g(400), age(400);
    for (Eigen::Index i = 0; i < 400; ++i) {
        g(i) = cohort.subjects[static_cast<std::size_t>(i)].latent_g;
        age(i) = cohort.subjects[static_cast<std::size_t>(i)].age;
    }
    const double r = *pearson(g, age);
    CHECK(r < -0.4);  // target -0.6 with sampling noise
}

TEST_CASE("export round-trips through the ingest module") {
    SynthSpec spec;
    spec.subjects = 6;
    spec.rois = 5;
    spec.timepoints = 20;
    spec.planted_edges = 3;
    spec.seed = 9;
    const SyntheticCohort cohort = generate_cohort(spec);

    testutil::TempDir dir("synth");
    const std::string out = (dir.path() / "cohort").string();
    export_cohort(cohort, out);

    const CohortManifest manifest = load_manifest(out + "/manifest.csv");
    REQUIRE(manifest.subjects.size() == 6);
    CHECK(manifest.covariate_names == std::vector<std::string>{"age"});
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(manifest.subjects[i].score == cohort.subjects[i].score);  // bitwise via CSV
        CHECK(manifest.subjects[i].covariates.at("age") == cohort.subjects[i].age);
        const TimeSeriesMatrix ts =
            load_timeseries(out + "/" + manifest.subjects[i].timeseries_path, 5);
        CHECK(ts.values == cohort.subjects[i].series.values);  // bitwise
    }
}
