#pragma once

#include <vector>

#include <Eigen/Dense>

#include "ssgl_gam/family.hpp"

namespace ssgl_gam {

struct SolverConfig {
    double outer_tol = 1e-6;    // relative change in the penalized objective
    double inner_tol = 1e-7;    // max relative coefficient change per cycle
    int max_outer = 100;
    int max_inner = 1000;
    double weight_floor = 1e-6;
    double eta_clamp = 30.0;    // |eta| bound for IRLS working quantities (non-gaussian)
    double coef_tol = 1e-6;     // outer stop also needs max |delta gamma| / (1 + |gamma|) below this
    int max_halvings = 30;

    void validate() const;
};

/**
 * Grouped linear model U * gamma = mu * 1 + sum_j X_j beta_j with a shared
 * group size. gamma stores mu first, then the p blocks in order.
 */
struct GroupedDesign {
    const Eigen::MatrixXd& x;  // n x (p*d)
    int d;

    int p() const { return static_cast<int>(x.cols() / d); }
    Eigen::Index n() const { return x.rows(); }
    auto block(int j) const { return x.middleCols(static_cast<Eigen::Index>(j) * d, d); }
    Eigen::VectorXd eta(const Eigen::VectorXd& gamma) const;
};

struct WorkingResponse {
    Eigen::VectorXd z;
    Eigen::VectorXd w;
};

/// IRLS quadratic expansion of -loglik at eta with Fisher weights
/// w = 1/(tau V(mu) g'(mu)^2), floored. z = eta + score/w, which equals
/// eta + g'(mu)(y - mu) whenever the floor is inactive.
WorkingResponse irls_linearize(const Family& f, const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                               const SolverConfig& cfg = {});

struct BcdResult {
    int cycles = 0;
    bool converged = false;
};

/// Weighted group lasso by block coordinate descent:
///   min 0.5 (z - U gamma)' W (z - U gamma) + sum_j lambda_j ||beta_j||_2
/// with an unpenalized intercept. Each block takes an MM group soft-threshold
/// step with h_j = lambda_max(X_j' W X_j). `gamma` is the warm start and result.
BcdResult group_bcd(const Eigen::VectorXd& z, const Eigen::VectorXd& w, const GroupedDesign& design,
                    const Eigen::VectorXd& lambdas, Eigen::VectorXd& gamma, const SolverConfig& cfg = {});

/// 0.5 (z - U gamma)' W (z - U gamma) + sum_j lambda_j ||beta_j||.
double quadratic_objective(const Eigen::VectorXd& z, const Eigen::VectorXd& w, const GroupedDesign& design,
                           const Eigen::VectorXd& lambdas, const Eigen::VectorXd& gamma);

struct KktReport {
    double max_violation = 0.0;
    std::vector<bool> group_ok;
    double intercept_gradient = 0.0;
    bool pass = false;
};

/// Subgradient optimality of the weighted group lasso at gamma.
KktReport kkt_check(const Eigen::VectorXd& gamma, const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                    const GroupedDesign& design, const Eigen::VectorXd& lambdas, double tol);

/// -loglik(gamma) + sum_j lambda_j ||beta_j||.
double penalized_objective(const Family& f, const Eigen::VectorXd& y, const GroupedDesign& design,
                           const Eigen::VectorXd& lambdas, const Eigen::VectorXd& gamma);

struct MstepResult {
    Eigen::VectorXd gamma;
    std::vector<double> objective_trace;  // starting value, then one entry per outer step
    int outer_iterations = 0;
    int halvings = 0;
    int inner_cycles = 0;
    bool converged = false;
};

/// Minimizes -loglik + sum_j lambda_j ||beta_j|| by IRLS outer steps around
/// group_bcd, halving any step that raises the true objective.
MstepResult solve_mstep(const Family& f, const Eigen::VectorXd& y, const GroupedDesign& design,
                        const Eigen::VectorXd& lambdas, const Eigen::VectorXd& gamma_init,
                        const SolverConfig& cfg = {});

}  // namespace ssgl_gam
