#pragma once

#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ssgl_gam {

enum class FamilyKind { gaussian, binomial, poisson, negbinomial, gamma };

/**
 * Exponential-dispersion family with its link.
 *
 * Density exp{(y*theta - b(theta))/tau + c(y, tau)} with mean b'(theta),
 * linked to the additive predictor eta through g(b'(theta)) = eta. The
 * composite xi = (g o b')^{-1} maps eta to theta; it is the identity for the
 * canonical pairs (gaussian-identity, binomial-logit, poisson-log).
 *
 * Supported pairs:
 *   gaussian-identity   b = theta^2/2,              tau = noise variance
 *   binomial-logit      b = log(1 + e^theta)
 *   poisson-log         b = e^theta
 *   negbinomial-log     b = -size*log(1 - e^theta), theta < 0
 *   gamma-log           b = -log(-theta), theta < 0, tau = 1/shape
 *
 * All members are pure; a Family is a small value type.
 */
class Family {
public:
    static Family gaussian(double variance = 1.0);
    static Family binomial();
    static Family poisson();
    static Family negbinomial(double size);
    static Family gamma(double shape);

    /// Parses "gaussian", "binomial", "poisson", "negbinomial" or "gamma".
    static Family from_name(std::string_view name, double nb_size = 1.0, double gamma_shape = 1.0);

    FamilyKind kind() const noexcept { return kind_; }
    std::string name() const;
    double dispersion() const noexcept { return tau_; }
    /// Negative-binomial size alpha; gamma shape. Zero for the other families.
    double shape() const noexcept { return shape_; }
    bool canonical() const noexcept;

    // Cumulant b and its derivatives in the natural parameter.
    double cumulant(double theta) const;
    double mean(double theta) const;
    double variance_b(double theta) const;

    double xi(double eta) const;
    double xi_prime(double eta) const;

    double link(double mu) const;
    double link_inv(double eta) const;
    double link_deriv(double mu) const;
    /// V(mu) = b''((b')^{-1}(mu)).
    double var_fun(double mu) const;

    bool in_mean_domain(double mu) const noexcept;
    /// Throws DataError naming `row` (0-based; reported 1-based) when y is outside the response support.
    void check_response(double y, std::size_t row) const;
    void check_responses(const Eigen::VectorXd& y) const;

    /// Per-observation y*xi(eta) - b(xi(eta)), without the 1/tau factor.
    double unit_loglik(double y, double eta) const;

    /// Intercept-only MLE link(mean(y)); throws DataError when it is undefined.
    double null_intercept(const Eigen::VectorXd& y) const;

private:
    Family(FamilyKind kind, double tau, double shape) : kind_(kind), tau_(tau), shape_(shape) {}

    void check_theta(double theta) const;

    FamilyKind kind_;
    double tau_;
    double shape_;
};

/// (1/tau) * sum_i [y_i xi(eta_i) - b(xi(eta_i))], dropping c(y, tau).
double loglik(const Family& f, const Eigen::VectorXd& y, const Eigen::VectorXd& eta);

/// log(1 + e^u) without overflow.
double log1pexp(double u) noexcept;
/// 1 / (1 + e^{-u}) without overflow.
double logistic(double u) noexcept;

}  // namespace ssgl_gam
