#pragma once

#include <Eigen/Dense>

namespace ssgl_gam {

/// Spike-and-slab group lasso hyperparameters for groups of size d.
/// lambda0 == lambda1 is accepted and degenerates to a plain group lasso.
struct SsglHyper {
    double lambda0 = 20.0;
    double lambda1 = 1.0;
    double a = 1.0;
    double b = 1.0;
    int d = 6;

    /// Defaults lambda1 = 1, a = 1, b = p.
    static SsglHyper defaults(int p, int d, double lambda0);

    void validate() const;
    bool degenerate() const { return lambda0 == lambda1; }
};

inline constexpr double kKappaEps = 1e-12;

/// log Psi(beta | lambda) for a group with ||beta||_2 = norm.
double log_psi(double norm, double lambda, int d);
double log_psi(const Eigen::VectorXd& beta, double lambda);

/// Posterior slab probability of a group with the given norm, kept inside [eps, 1-eps].
double pstar(double norm, double kappa, const SsglHyper& h);
double pstar(const Eigen::VectorXd& beta, double kappa, const SsglHyper& h);

/// lambda1 * p + lambda0 * (1 - p).
double adaptive_weight(double pstar, const SsglHyper& h);

/// (a - 1 + sum p*) / (a + b + p - 2), unclamped.
double update_kappa(const Eigen::VectorXd& pstars, const SsglHyper& h);
double clamp_kappa(double kappa);

/// Norm at which spike and slab densities cross; 0 when the slab dominates
/// everywhere (log argument <= 1) or lambda0 == lambda1.
double omega_threshold(const SsglHyper& h, double kappa);

/// log[(1-kappa) Psi(norm | lambda0) + kappa Psi(norm | lambda1)].
double log_mixture(double norm, double kappa, const SsglHyper& h);

}  // namespace ssgl_gam
