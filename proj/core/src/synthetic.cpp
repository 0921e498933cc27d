#include "wena/synthetic.hpp"

#include "wena/csv.hpp"
#include "wena/error.hpp"
#include "wena/rng.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>

namespace wena {

namespace {

void validate(const SynthSpec& spec) {
    const Eigen::Index max_edges =
        static_cast<Eigen::Index>(spec.rois) * (spec.rois - 1) / 2;
    if (spec.subjects < 2 || spec.rois < 2 || spec.timepoints < 3)
        throw Error(ErrorCode::InvalidArgument, "synthetic spec too small");
    if (spec.planted_edges < 0 || spec.planted_edges > max_edges)
        throw Error(ErrorCode::InvalidArgument, "planted_edges exceeds N(N-1)/2");
    if (spec.signal_strength < 0.0 || spec.signal_strength > 1.0)
        throw Error(ErrorCode::InvalidArgument, "signal_strength must be in [0, 1]");
    if (spec.noise_sd < 0.0)
        throw Error(ErrorCode::InvalidArgument, "noise_sd must be >= 0");
}

}  // namespace

SyntheticCohort generate_cohort(const SynthSpec& spec) {
    validate(spec);
    SyntheticCohort cohort;
    cohort.spec = spec;

    // Seeded choice of the planted edge set.
    std::vector<std::pair<Eigen::Index, Eigen::Index>> pairs;
    for (Eigen::Index i = 0; i < spec.rois; ++i)
        for (Eigen::Index j = i + 1; j < spec.rois; ++j) pairs.push_back({i, j});
    Rng edge_rng(derive_seed(spec.seed, 0x504c41u));
    edge_rng.shuffle(pairs);
    cohort.planted.assign(pairs.begin(), pairs.begin() + spec.planted_edges);
    std::sort(cohort.planted.begin(), cohort.planted.end());

    cohort.subjects.resize(static_cast<std::size_t>(spec.subjects));
    for (int s = 0; s < spec.subjects; ++s) {
        Rng rng(derive_seed(spec.seed, 0x53554au, static_cast<std::uint64_t>(s)));
        SyntheticSubject& subject = cohort.subjects[static_cast<std::size_t>(s)];

        char id_buf[16];
        std::snprintf(id_buf, sizeof(id_buf), "s%04d", s);
        subject.id = id_buf;

        const double g = rng.gaussian();
        subject.latent_g = g;
        subject.score = 30.0 + 6.0 * g + spec.noise_sd * rng.gaussian();

        const double strength = spec.signal_strength;
        subject.age = 55.0 + 18.0 * (-strength * g +
                                     std::sqrt(std::max(0.0, 1.0 - strength * strength)) *
                                         rng.gaussian());

        // Factor loading m chosen so the target population correlation of a
        // planted pair is c = strength * sigmoid(2g): corr = m^2/(1+m^2) for
        // an ROI incident to exactly one planted edge. The steepened sigmoid
        // keeps c monotone in g while giving the planted columns enough
        // across-subject spread to stand out from FC estimation noise.
        const double c = std::min(0.95, strength / (1.0 + std::exp(-2.0 * g)));
        const double loading = c > 0.0 ? std::sqrt(c / (1.0 - c)) : 0.0;

        const Eigen::Index t = spec.timepoints;
        Matrix series(t, spec.rois);
        for (Eigen::Index row = 0; row < t; ++row)
            for (Eigen::Index roi = 0; roi < spec.rois; ++roi) series(row, roi) = rng.gaussian();

        if (loading > 0.0) {
            for (const auto& [i, j] : cohort.planted) {
                for (Eigen::Index row = 0; row < t; ++row) {
                    const double shared = rng.gaussian();
                    series(row, i) += loading * shared;
                    series(row, j) += loading * shared;
                }
            }
        }
        subject.series.values = std::move(series);
    }
    return cohort;
}

void export_cohort(const SyntheticCohort& cohort, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);

    CohortManifest manifest;
    manifest.roi_count = cohort.spec.rois;
    manifest.covariate_names = {"age"};
    for (const auto& subject : cohort.subjects) {
        const std::string ts_name = "ts_" + subject.id + ".csv";
        csv::write_numeric_table((fs::path(dir) / ts_name).string(), subject.series.values);
        SubjectRecord record;
        record.id = subject.id;
        record.timeseries_path = ts_name;  // relative to the manifest directory
        record.score = subject.score;
        record.covariates["age"] = subject.age;
        manifest.subjects.push_back(std::move(record));
    }
    write_manifest(manifest, (fs::path(dir) / "manifest.csv").string());

    nlohmann::json truth;
    truth["spec"] = {{"subjects", cohort.spec.subjects},
                     {"rois", cohort.spec.rois},
                     {"timepoints", cohort.spec.timepoints},
                     {"planted_edges", cohort.spec.planted_edges},
                     {"signal_strength", cohort.spec.signal_strength},
                     {"noise_sd", cohort.spec.noise_sd},
                     {"seed", cohort.spec.seed}};
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& [i, j] : cohort.planted) edges.push_back({i, j});
    truth["planted_edges"] = std::move(edges);
    nlohmann::json latent = nlohmann::json::object();
    for (const auto& subject : cohort.subjects) latent[subject.id] = subject.latent_g;
    truth["latent_g"] = std::move(latent);
    csv::write_text((fs::path(dir) / "groundtruth.json").string(), truth.dump(2));
}

}  // namespace wena
