#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ssgl_gam/crossval.hpp"

namespace ssgl_gam {

/// Repeated random train/test splits; no stratification.
struct SplitProtocol {
    int n_train = 82;
    int repeats = 50;
    std::uint64_t seed = 1;
};

struct ProstateConfig {
    SplitProtocol protocol;
    std::vector<double> grid = equispaced_grid(1.0, 100.0, 20);
    int folds = 5;
    BasisSpec spec;
    EmConfig em;
    SolverConfig solver;
    int jobs = 1;
    /// Require 102 x 6033 expression data with 52 cases and 50 controls.
    bool strict_dims = true;
};

struct ProstateData {
    Eigen::MatrixXd x;  // subjects x genes
    Eigen::VectorXd y;  // 1 = cancer, 0 = control
    std::vector<std::string> genes;
};

/// Loads expression and label CSVs. Returns nullopt when either file is missing.
std::optional<ProstateData> load_prostate(const std::string& data_path, const std::string& labels_path);

/// Checks label coding and, when strict, the published dimensions.
void validate_prostate(const ProstateData& d, bool strict);

/// Train rows of one repeat: a seeded permutation's first n_train entries, sorted.
std::vector<int> split_train_rows(int n, const SplitProtocol& protocol, int repeat);

struct ProstateReport {
    SbGamFit full_fit;
    CvResult full_cv;
    std::vector<double> aucs;
    std::vector<double> lambda0s;
    std::vector<int> n_selected;
    double mean_auc = 0.0;
};

/// Full-data CV fit plus `repeats` train/test AUCs, each tuned by CV inside its training rows.
ProstateReport run_prostate(const ProstateData& d, const ProstateConfig& cfg);

}  // namespace ssgl_gam
