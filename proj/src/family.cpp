#include "ssgl_gam/family.hpp"

#include <cmath>
#include <sstream>

#include "ssgl_gam/errors.hpp"

namespace ssgl_gam {

double log1pexp(double u) noexcept {
    return u > 0.0 ? u + std::log1p(std::exp(-u)) : std::log1p(std::exp(u));
}

double logistic(double u) noexcept {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

Family Family::gaussian(double variance) {
    if (!(variance > 0.0) || !std::isfinite(variance))
        throw ArgumentError("gaussian variance must be a positive finite number");
    return Family(FamilyKind::gaussian, variance, 0.0);
}

Family Family::binomial() { return Family(FamilyKind::binomial, 1.0, 0.0); }

Family Family::poisson() { return Family(FamilyKind::poisson, 1.0, 0.0); }

Family Family::negbinomial(double size) {
    if (!(size > 0.0) || !std::isfinite(size))
        throw ArgumentError("negative binomial size must be a positive finite number");
    return Family(FamilyKind::negbinomial, 1.0, size);
}

Family Family::gamma(double shape) {
    if (!(shape > 0.0) || !std::isfinite(shape))
        throw ArgumentError("gamma shape must be a positive finite number");
    return Family(FamilyKind::gamma, 1.0 / shape, shape);
}

Family Family::from_name(std::string_view name, double nb_size, double gamma_shape) {
    if (name == "gaussian") return gaussian();
    if (name == "binomial") return binomial();
    if (name == "poisson") return poisson();
    if (name == "negbinomial") return negbinomial(nb_size);
    if (name == "gamma") return gamma(gamma_shape);
    throw ArgumentError("unknown family '" + std::string(name) +
                        "' (expected gaussian, binomial, poisson, negbinomial or gamma)");
}

std::string Family::name() const {
    switch (kind_) {
        case FamilyKind::gaussian: return "gaussian";
        case FamilyKind::binomial: return "binomial";
        case FamilyKind::poisson: return "poisson";
        case FamilyKind::negbinomial: return "negbinomial";
        case FamilyKind::gamma: return "gamma";
    }
    return "unknown";
}

bool Family::canonical() const noexcept {
    return kind_ == FamilyKind::gaussian || kind_ == FamilyKind::binomial ||
           kind_ == FamilyKind::poisson;
}

void Family::check_theta(double theta) const {
    if (!std::isfinite(theta)) throw DomainError("natural parameter is not finite");
    if ((kind_ == FamilyKind::negbinomial || kind_ == FamilyKind::gamma) && !(theta < 0.0)) {
        std::ostringstream os;
        os << name() << " natural parameter must be negative, got " << theta;
        throw DomainError(os.str());
    }
}

double Family::cumulant(double theta) const {
    check_theta(theta);
    switch (kind_) {
        case FamilyKind::gaussian: return 0.5 * theta * theta;
        case FamilyKind::binomial: return log1pexp(theta);
        case FamilyKind::poisson: return std::exp(theta);
        case FamilyKind::negbinomial: return -shape_ * std::log(-std::expm1(theta));
        case FamilyKind::gamma: return -std::log(-theta);
    }
    return 0.0;
}

double Family::mean(double theta) const {
    check_theta(theta);
    switch (kind_) {
        case FamilyKind::gaussian: return theta;
        case FamilyKind::binomial: return logistic(theta);
        case FamilyKind::poisson: return std::exp(theta);
        case FamilyKind::negbinomial: return shape_ / std::expm1(-theta);
        case FamilyKind::gamma: return -1.0 / theta;
    }
    return 0.0;
}

double Family::variance_b(double theta) const {
    check_theta(theta);
    switch (kind_) {
        case FamilyKind::gaussian: return 1.0;
        case FamilyKind::binomial: return logistic(theta) * logistic(-theta);
        case FamilyKind::poisson: return std::exp(theta);
        case FamilyKind::negbinomial: {
            const double em = std::expm1(-theta);
            return shape_ * std::exp(-theta) / (em * em);
        }
        case FamilyKind::gamma: return 1.0 / (theta * theta);
    }
    return 0.0;
}

double Family::xi(double eta) const {
    if (!std::isfinite(eta)) throw ArgumentError("linear predictor is not finite");
    switch (kind_) {
        case FamilyKind::negbinomial: return -log1pexp(std::log(shape_) - eta);
        case FamilyKind::gamma: return -std::exp(-eta);
        default: return eta;
    }
}

double Family::xi_prime(double eta) const {
    if (!std::isfinite(eta)) throw ArgumentError("linear predictor is not finite");
    switch (kind_) {
        case FamilyKind::negbinomial: return logistic(std::log(shape_) - eta);
        case FamilyKind::gamma: return std::exp(-eta);
        default: return 1.0;
    }
}

bool Family::in_mean_domain(double mu) const noexcept {
    if (!std::isfinite(mu)) return false;
    switch (kind_) {
        case FamilyKind::gaussian: return true;
        case FamilyKind::binomial: return mu > 0.0 && mu < 1.0;
        default: return mu > 0.0;
    }
}

namespace {
void require_mean(const Family& f, double mu) {
    if (!f.in_mean_domain(mu)) {
        std::ostringstream os;
        os << "mean " << mu << " is outside the " << f.name() << " mean domain";
        throw DomainError(os.str());
    }
}
}  // namespace

double Family::link(double mu) const {
    require_mean(*this, mu);
    switch (kind_) {
        case FamilyKind::gaussian: return mu;
        case FamilyKind::binomial: return std::log(mu) - std::log1p(-mu);
        default: return std::log(mu);
    }
}

double Family::link_inv(double eta) const {
    switch (kind_) {
        case FamilyKind::gaussian: return eta;
        case FamilyKind::binomial: return logistic(eta);
        default: return std::exp(eta);
    }
}

double Family::link_deriv(double mu) const {
    require_mean(*this, mu);
    switch (kind_) {
        case FamilyKind::gaussian: return 1.0;
        case FamilyKind::binomial: return 1.0 / (mu * (1.0 - mu));
        default: return 1.0 / mu;
    }
}

double Family::var_fun(double mu) const {
    require_mean(*this, mu);
    switch (kind_) {
        case FamilyKind::gaussian: return 1.0;
        case FamilyKind::binomial: return mu * (1.0 - mu);
        case FamilyKind::poisson: return mu;
        case FamilyKind::negbinomial: return mu + mu * mu / shape_;
        case FamilyKind::gamma: return mu * mu;
    }
    return 0.0;
}

void Family::check_response(double y, std::size_t row) const {
    bool ok = std::isfinite(y);
    const char* want = "a finite number";
    switch (kind_) {
        case FamilyKind::gaussian: break;
        case FamilyKind::binomial:
            ok = ok && (y == 0.0 || y == 1.0);
            want = "0 or 1";
            break;
        case FamilyKind::poisson:
        case FamilyKind::negbinomial:
            ok = ok && y >= 0.0 && y == std::floor(y);
            want = "a non-negative integer";
            break;
        case FamilyKind::gamma:
            ok = ok && y > 0.0;
            want = "a positive number";
            break;
    }
    if (!ok) {
        std::ostringstream os;
        os << "response at row " << row + 1 << " (1-based) is " << y << "; " << name() << " requires " << want;
        throw DataError(os.str());
    }
}

void Family::check_responses(const Eigen::VectorXd& y) const {
    for (Eigen::Index i = 0; i < y.size(); ++i) check_response(y[i], static_cast<std::size_t>(i));
}

double Family::unit_loglik(double y, double eta) const {
    switch (kind_) {
        case FamilyKind::gaussian: return y * eta - 0.5 * eta * eta;
        case FamilyKind::binomial: return y * eta - log1pexp(eta);
        case FamilyKind::poisson: return y * eta - std::exp(eta);
        case FamilyKind::negbinomial: {
            // theta = -L and log(1 - e^theta) = u - L with u = log(size) - eta.
            const double u = std::log(shape_) - eta;
            const double L = log1pexp(u);
            return -y * L + shape_ * (u - L);
        }
        case FamilyKind::gamma: return -y * std::exp(-eta) - eta;
    }
    return 0.0;
}

double Family::null_intercept(const Eigen::VectorXd& y) const {
    if (y.size() == 0) throw DataError("empty response");
    const double ybar = y.mean();
    if (!in_mean_domain(ybar)) {
        std::ostringstream os;
        os << "response mean " << ybar << " lies outside the " << name()
           << " mean domain; the intercept-only model is undefined";
        throw DataError(os.str());
    }
    return link(ybar);
}

double loglik(const Family& f, const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    if (y.size() != eta.size()) throw ArgumentError("loglik: y and eta lengths differ");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        f.check_response(y[i], static_cast<std::size_t>(i));
        acc += f.unit_loglik(y[i], eta[i]);
    }
    return acc / f.dispersion();
}

}  // namespace ssgl_gam
