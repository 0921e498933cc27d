#include "wena/ingest.hpp"

#include "wena/error.hpp"
#include "wena/rng.hpp"

#include "support/tempdir.hpp"

#include <doctest.h>

#include <cmath>
#include <functional>

using namespace wena;

namespace {

bool fails_with(ErrorCode code, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code() == code;
    }
    return false;
}

}  // namespace

TEST_CASE("manifest loads subjects and covariates in file order") {
    testutil::TempDir dir("manifest");
    const auto path = dir.write("m.csv",
                                "subject_id,timeseries_path,score,age\n"
                                "s1,ts1.csv,31.5,24\n"
                                "s2,ts2.csv,28,57.5\n"
                                "s3,ts3.csv,35.25,71\n");
    const CohortManifest manifest = load_manifest(path);
    REQUIRE(manifest.subjects.size() == 3);
    CHECK(manifest.subjects[0].id == "s1");
    CHECK(manifest.subjects[2].score == doctest::Approx(35.25));
    CHECK(manifest.covariate_names == std::vector<std::string>{"age"});
    CHECK(manifest.subjects[1].covariates.at("age") == doctest::Approx(57.5));
    CHECK_FALSE(manifest.subjects[0].motion_path.has_value());
}

TEST_CASE("manifest rejects duplicates and missing columns") {
    testutil::TempDir dir("manifest_bad");
    const auto dup = dir.write("dup.csv",
                               "subject_id,timeseries_path,score\n"
                               "s1,a.csv,1\n"
                               "s1,b.csv,2\n");
    CHECK(fails_with(ErrorCode::DuplicateSubject, [&] { load_manifest(dup); }));

    const auto noscore = dir.write("noscore.csv",
                                   "subject_id,timeseries_path,age\n"
                                   "s1,a.csv,30\n");
    CHECK(fails_with(ErrorCode::MissingColumn, [&] { load_manifest(noscore); }));

    const auto badscore = dir.write("badscore.csv",
                                    "subject_id,timeseries_path,score\n"
                                    "s1,a.csv,abc\n");
    CHECK(fails_with(ErrorCode::ParseError, [&] { load_manifest(badscore); }));

    CHECK(fails_with(ErrorCode::FileNotFound,
                     [&] { load_manifest((dir.path() / "missing.csv").string()); }));
}

TEST_CASE("manifest write/load round-trips exactly") {
    testutil::TempDir dir("manifest_rt");
    const auto path = dir.write("m.csv",
                                "subject_id,timeseries_path,score,motion_path,age,iq\n"
                                "s1,ts1.csv,31.517,m1.csv,24.25,100\n"
                                "s2,ts2.csv,-2.75,,57.125,99.5\n");
    const CohortManifest first = load_manifest(path);
    write_manifest(first, (dir.path() / "rt.csv").string());
    const CohortManifest second = load_manifest((dir.path() / "rt.csv").string());

    REQUIRE(second.subjects.size() == first.subjects.size());
    CHECK(second.covariate_names == first.covariate_names);
    for (std::size_t i = 0; i < first.subjects.size(); ++i) {
        CHECK(second.subjects[i].id == first.subjects[i].id);
        CHECK(second.subjects[i].timeseries_path == first.subjects[i].timeseries_path);
        CHECK(second.subjects[i].motion_path == first.subjects[i].motion_path);
        CHECK(second.subjects[i].score == first.subjects[i].score);  // bitwise
        CHECK(second.subjects[i].covariates == first.subjects[i].covariates);
    }
}

TEST_CASE("timeseries loading validates shape and finiteness") {
    testutil::TempDir dir("ts");
    std::string big;
    for (int t = 0; t < 100; ++t) {
        for (int n = 0; n < 160; ++n) big += (n ? "," : "") + std::to_string(t + n * 0.5);
        big += "\n";
    }
    const auto ok = dir.write("ok.csv", big);
    const TimeSeriesMatrix ts = load_timeseries(ok, 160);
    CHECK(ts.t() == 100);
    CHECK(ts.n() == 160);

    CHECK(fails_with(ErrorCode::RoiCountMismatch, [&] { load_timeseries(ok, 161); }));

    const auto nan_file = dir.write("nan.csv", "1,2\n3,NaN\n5,6\n");
    CHECK(fails_with(ErrorCode::NonFiniteValue, [&] { load_timeseries(nan_file, 2); }));

    const auto ragged = dir.write("ragged.csv", "1,2\n3\n");
    CHECK(fails_with(ErrorCode::ParseError, [&] { load_timeseries(ragged, 2); }));

    // header row is auto-detected
    const auto with_header = dir.write("hdr.csv", "roi_a,roi_b\n1,2\n3,4\n5,6\n");
    CHECK(load_timeseries(with_header, 2).t() == 3);
}

TEST_CASE("head motion hand cases") {
    MotionTrace zero{Matrix::Zero(10, 6)};
    CHECK(head_motion(zero) == 0.0);

    // column 0 increments by exactly 1 per time point: each of the 9 steps
    // contributes sqrt(1) = 1.
    Matrix ramp = Matrix::Zero(10, 6);
    for (int i = 0; i < 10; ++i) ramp(i, 0) = i;
    CHECK(head_motion(MotionTrace{ramp}) == doctest::Approx(1.0).epsilon(1e-15));

    MotionTrace single{Matrix::Zero(1, 6)};
    CHECK(fails_with(ErrorCode::TooFewTimePoints, [&] { head_motion(single); }));
}

TEST_CASE("head motion properties: translation invariance, nonnegativity") {
    Rng rng(7);
    for (int trial = 0; trial < 25; ++trial) {
        const int m = 2 + static_cast<int>(rng.below(20));
        Matrix trace(m, 6);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < 6; ++j) trace(i, j) = rng.uniform(-2.0, 2.0);

        const double base = head_motion(MotionTrace{trace});
        CHECK(base >= 0.0);

        Eigen::RowVectorXd offset(6);
        for (int j = 0; j < 6; ++j) offset(j) = rng.uniform(-5.0, 5.0);
        Matrix shifted = trace.rowwise() + offset;
        CHECK(head_motion(MotionTrace{shifted}) == doctest::Approx(base).epsilon(1e-12));
    }
    // zero iff constant
    Matrix constant = Matrix::Constant(5, 6, 3.25);
    CHECK(head_motion(MotionTrace{constant}) == 0.0);
}

namespace {

std::string motion_csv(const Matrix& m) {
    std::string out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) out += (j ? "," : "") + std::to_string(m(i, j));
        out += "\n";
    }
    return out;
}

}  // namespace

TEST_CASE("qc filter applies the three exclusion rules") {
    testutil::TempDir dir("qc");

    Matrix translation = Matrix::Zero(5, 6);
    translation(3, 1) = 3.0;  // 3.0 mm > 2.5 mm
    Matrix quiet = Matrix::Zero(5, 6);
    Matrix high_fd = Matrix::Zero(5, 6);
    for (int i = 0; i < 5; ++i) high_fd(i, 2) = 0.6 * i;  // each step 0.6 -> mean FD 0.6

    const auto p1 = dir.write("m1.csv", motion_csv(translation));
    const auto p2 = dir.write("m2.csv", motion_csv(quiet));
    const auto p3 = dir.write("m3.csv", motion_csv(high_fd));

    CohortManifest manifest;
    manifest.subjects = {
        {"s1", "ts.csv", p1, 1.0, {}},
        {"s2", "ts.csv", p2, 2.0, {}},
        {"s3", "ts.csv", p3, 3.0, {}},
        {"s4", "ts.csv", std::nullopt, 4.0, {}},
    };

    const auto [retained, report] = qc_filter(manifest);
    REQUIRE(retained.subjects.size() == 2);  // s2 and s4
    CHECK(retained.subjects[0].id == "s2");
    CHECK(retained.subjects[1].id == "s4");
    REQUIRE(report.exclusions.size() == 2);
    CHECK(report.exclusions[0].subject_id == "s1");
    CHECK(report.exclusions[0].rule == "TranslationExceeded");
    CHECK(report.exclusions[0].value == doctest::Approx(3.0));
    CHECK(report.exclusions[1].subject_id == "s3");
    CHECK(report.exclusions[1].rule == "MeanFdExceeded");
    CHECK(report.warnings == std::vector<std::string>{"s4"});

    // infinite thresholds retain everyone
    QcThresholds loose{1e308, 1e308, 1e308};
    const auto [all, none] = qc_filter(manifest, loose);
    CHECK(all.subjects.size() == 4);
    CHECK(none.exclusions.empty());

    const std::string json = qc_report_to_json(report);
    CHECK(json.find("TranslationExceeded") != std::string::npos);
    CHECK(json.find("\"threshold\"") != std::string::npos);
}

TEST_CASE("detrend removes exact lines and is idempotent") {
    // exact line
    Matrix line(4, 1);
    line << 1, 2, 3, 4;
    const TimeSeriesMatrix out = detrend(TimeSeriesMatrix{line});
    CHECK(out.values.array().abs().maxCoeff() < 1e-12);

    // constant column
    Matrix constant = Matrix::Constant(3, 2, 5.0);
    CHECK(detrend(TimeSeriesMatrix{constant}).values.array().abs().maxCoeff() < 1e-12);

    // alternating series: refit slope via the normal equations must be ~0
    Matrix alt(8, 1);
    for (int i = 0; i < 8; ++i) alt(i, 0) = i % 2;
    const Vector col = detrend(TimeSeriesMatrix{alt}).values.col(0);
    CHECK(std::fabs(col.mean()) < 1e-12);
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double xc = i - 3.5;
        sxy += xc * col(i);
        sxx += xc * xc;
    }
    CHECK(std::fabs(sxy / sxx) < 1e-10);

    // idempotence on random data
    Rng rng(11);
    Matrix random(20, 3);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 3; ++j) random(i, j) = rng.uniform(-4.0, 4.0) + 0.3 * i;
    const TimeSeriesMatrix once = detrend(TimeSeriesMatrix{random});
    const TimeSeriesMatrix twice = detrend(once);
    CHECK((once.values - twice.values).array().abs().maxCoeff() < 1e-10);
}
