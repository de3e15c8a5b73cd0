#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ssgl_gam/basis.hpp"
#include "ssgl_gam/em_fit.hpp"

namespace ssgl_gam {

/// Which penalty a path traverses. `group_lasso` sets lambda1 = lambda0 at
/// every grid value, so all groups get the same fixed weight.
enum class Penalty { ssgl, group_lasso };

struct CvConfig {
    int folds = 5;
    std::uint64_t seed = 1;
    int jobs = 1;
};

struct CvResult {
    std::vector<double> grid;          // ascending
    Eigen::MatrixXd fold_errors;       // folds x grid
    std::vector<std::vector<char>> failed;  // folds x grid; 1 where the null-model error was substituted
    Eigen::VectorXd mean_error;
    Eigen::VectorXd std_error;
    int chosen_index = 0;
    double chosen_lambda0 = 0.0;
    std::uint64_t seed = 0;
    int folds = 0;
};

/// Fold id per observation: a seeded permutation dealt round-robin, so fold
/// sizes differ by at most one.
std::vector<int> kfold_split(int n, int folds, std::uint64_t seed);

/// Mean of (y - link_inv(eta))^2.
double cv_error(const Family& f, const Eigen::VectorXd& y, const Eigen::VectorXd& eta);

/// Index of the smallest mean error; near-ties (relative 1e-5, about the EM resolution) go to the larger index.
int choose_lambda_index(const Eigen::VectorXd& mean_error);

/// n equispaced values on [lo, hi] (n == 1 gives {lo}).
std::vector<double> equispaced_grid(double lo, double hi, int n);
/// Parses "lo:hi:n".
std::vector<double> parse_grid(std::string_view text);

/// Grid values below lambda0, then lambda0: a warm-start route to a single fit.
std::vector<double> path_to(const std::vector<double>& grid, double lambda0);

SsglHyper hyper_at(const SsglHyper& base, double lambda0, Penalty penalty);

/// Fits every grid value in ascending order, warm-starting each from the previous.
std::vector<SbGamFit> fit_path(const Family& f, const Eigen::VectorXd& y, const DesignBlocks& design,
                               const SsglHyper& base, const std::vector<double>& grid, Penalty penalty,
                               const EmConfig& em_cfg = {}, const SolverConfig& solver_cfg = {});

struct CvOutcome {
    CvResult cv;
    SbGamFit fit;  // refit on all rows at the chosen lambda0
};

/// K-fold CV over the lambda0 grid. Each fold rescales and places knots on
/// its own training rows; the refit walks the full-data path up to the choice.
CvOutcome cv_fit(const Family& f, const Eigen::VectorXd& y, const Eigen::MatrixXd& x_raw, const BasisSpec& spec,
                 const SsglHyper& base, const std::vector<double>& grid, const CvConfig& cv_cfg,
                 const EmConfig& em_cfg = {}, const SolverConfig& solver_cfg = {}, Penalty penalty = Penalty::ssgl,
                 bool orthonormalize = true);

/// Rescales x_raw and builds its design in one step.
DesignBlocks prepare_design(const Eigen::MatrixXd& x_raw, const BasisSpec& spec, bool orthonormalize = true);

}  // namespace ssgl_gam
