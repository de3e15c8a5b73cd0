#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ssgl_gam/basis.hpp"
#include "ssgl_gam/family.hpp"
#include "ssgl_gam/glasso_solver.hpp"
#include "ssgl_gam/ssgl_prior.hpp"

namespace ssgl_gam {

struct EmConfig {
    double em_tol = 1e-6;     // relative change in the log-posterior
    double coef_tol = 1e-5;   // max group-norm change of beta (basis coordinates)
    int max_em = 100;

    void validate() const;
};

struct EmTraceRow {
    int iteration = 0;
    double log_posterior = 0.0;
    double kappa = 0.0;
    int n_selected = 0;
    int mstep_outer = 0;
    int halvings = 0;
};

/// Warm start in solver coordinates.
struct FitStart {
    Eigen::VectorXd gamma;
    double kappa = 0.5;
};

/**
 * Fitted sparse additive model.
 *
 * `beta` holds the coefficients of the centered spline basis and is what
 * prediction uses. `beta_solver` holds the same groups in the coordinates
 * the spike-and-slab prior acts on (orthonormalized blocks when enabled);
 * inclusion probabilities and the selection threshold refer to these.
 */
struct SbGamFit {
    Family family = Family::gaussian();
    SsglHyper hyper;
    BasisSpec spec;
    std::vector<CovariateBasis> covariates;
    bool orthonormalized = true;

    double intercept = 0.0;
    std::vector<Eigen::VectorXd> beta;
    std::vector<Eigen::VectorXd> beta_solver;
    double kappa = 0.0;
    Eigen::VectorXd pstars;
    double omega = 0.0;
    std::vector<int> selected;  // 0-based covariate indices

    std::vector<EmTraceRow> trace;
    int em_iterations = 0;
    int step_halvings = 0;
    bool converged = false;

    int p() const { return static_cast<int>(beta.size()); }
    int d() const { return spec.df; }
    double lambda0() const { return hyper.lambda0; }
    FitStart warm_start() const;
};

/// Marginal log-posterior with the inclusion indicators summed out:
/// loglik + sum_j log[(1-k) Psi(b_j|l0) + k Psi(b_j|l1)] + (a-1) log k + (b-1) log(1-k).
double log_posterior(const Family& f, const Eigen::VectorXd& y, const GroupedDesign& design,
                     const Eigen::VectorXd& gamma, double kappa, const SsglHyper& h);

/// Indices j with ||beta_j|| > omega.
std::vector<int> threshold_groups(const std::vector<Eigen::VectorXd>& groups, double omega);

/// EM for the MAP estimate: E-step inclusion probabilities, closed-form kappa,
/// then an IRLS group-lasso M-step with adaptive weights.
SbGamFit fit(const Family& f, const Eigen::VectorXd& y, const DesignBlocks& design, const SsglHyper& h,
             const EmConfig& em_cfg = {}, const SolverConfig& solver_cfg = {}, const FitStart* start = nullptr);

enum class Scale { link, response };

/// Predictions at raw covariate rows; out-of-range inputs are clamped and counted.
Eigen::VectorXd predict(const SbGamFit& fit, const Eigen::MatrixXd& x_new_raw, Scale scale,
                        std::size_t* clamped = nullptr);

struct FunctionTable {
    Eigen::VectorXd x;  // grid on the [0,1] scale, endpoints included
    Eigen::VectorXd f;
};

FunctionTable extract_functions(const SbGamFit& fit, int j, int grid_size);

}  // namespace ssgl_gam
