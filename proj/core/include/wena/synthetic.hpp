#pragma once

#include "wena/ingest.hpp"
#include "wena/types.hpp"

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace wena {

struct SynthSpec {
    int subjects = 200;
    int rois = 20;
    int timepoints = 150;
    int planted_edges = 15;
    double signal_strength = 0.6;  // in [0, 1]
    double noise_sd = 1.0;
    std::uint64_t seed = 0;
};

struct SyntheticSubject {
    std::string id;
    TimeSeriesMatrix series;
    double score = 0.0;
    double age = 0.0;
    double latent_g = 0.0;
};

/// Desk-scale stand-in cohort: a latent factor g drives the score, an
/// age-like covariate (negatively), and the pairwise correlation of a
/// planted edge set, so downstream recovery is checkable against ground truth.
struct SyntheticCohort {
    SynthSpec spec;
    std::vector<SyntheticSubject> subjects;
    std::vector<std::pair<Eigen::Index, Eigen::Index>> planted;  // i < j, sorted
};

SyntheticCohort generate_cohort(const SynthSpec& spec);

/// Writes manifest.csv, per-subject time-series CSVs and groundtruth.json
/// into `dir`; the manifest is loadable by the ingest module.
void export_cohort(const SyntheticCohort& cohort, const std::string& dir);

}  // namespace wena
