#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ssgl_gam/crossval.hpp"
#include "ssgl_gam/simulate.hpp"

namespace ssgl_gam {

struct StudyConfig {
    SimScenario scenario;
    int test_size = 100;
    std::vector<double> grid = equispaced_grid(1.0, 100.0, 20);
    int folds = 5;
    Penalty penalty = Penalty::ssgl;
    BasisSpec spec;
    EmConfig em;
    SolverConfig solver;
};

/// One simulated train/test replicate. `score` is the test AUC for binary
/// scenarios and the test MSPE for count scenarios.
struct ReplicateRow {
    int replicate = 0;
    std::uint64_t seed = 0;
    double mse = 0.0;
    double mcc = 0.0;
    double score = 0.0;
    double lambda0 = 0.0;
    int n_selected = 0;
    int true_selected = 0;
    bool failed = false;
    std::string error;
    double seconds = 0.0;  // wall time; not part of the reproducible output
};

/// "auc" or "mspe" for the scenario.
std::string score_name(const SimScenario& s);

ReplicateRow run_replicate(const StudyConfig& cfg, int replicate, std::uint64_t seed);

/// reps replicates with seeds derive_seed(base_seed, r); failures become flagged rows.
std::vector<ReplicateRow> run_study(const StudyConfig& cfg, int reps, std::uint64_t base_seed, int jobs);

struct StudySummary {
    double mse = 0.0;
    double mcc = 0.0;
    double score = 0.0;
    double lambda0 = 0.0;
    double n_selected = 0.0;
    double true_selected = 0.0;
    int n_ok = 0;
};

/// Medians of the numeric columns over non-failed rows (NaN when none).
StudySummary median_row(const std::vector<ReplicateRow>& rows);

double median(std::vector<double> v);

}  // namespace ssgl_gam
