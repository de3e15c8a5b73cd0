#include "ssgl_gam/ssgl_prior.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/family.hpp"

namespace ssgl_gam {

SsglHyper SsglHyper::defaults(int p, int d, double lambda0) {
    SsglHyper h;
    h.lambda0 = lambda0;
    h.lambda1 = 1.0;
    h.a = 1.0;
    h.b = static_cast<double>(p);
    h.d = d;
    return h;
}

void SsglHyper::validate() const {
    if (!(lambda1 > 0.0) || !std::isfinite(lambda1)) throw ArgumentError("lambda1 must be positive");
    if (!(lambda0 >= lambda1) || !std::isfinite(lambda0)) {
        std::ostringstream os;
        os << "lambda0 (" << lambda0 << ") must be at least lambda1 (" << lambda1 << ")";
        throw ArgumentError(os.str());
    }
    if (!(a > 0.0) || !(b > 0.0)) throw ArgumentError("beta prior parameters a and b must be positive");
    if (d < 1) throw ArgumentError("group size d must be positive");
}

double log_psi(double norm, double lambda, int d) {
    const double dd = static_cast<double>(d);
    return dd * std::log(lambda) - lambda * norm - dd * std::numbers::ln2 -
           0.5 * (dd - 1.0) * std::log(std::numbers::pi) - std::lgamma(0.5 * (dd + 1.0));
}

double log_psi(const Eigen::VectorXd& beta, double lambda) {
    return log_psi(beta.norm(), lambda, static_cast<int>(beta.size()));
}

namespace {
void check_kappa(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0)) {
        std::ostringstream os;
        os << "kappa must lie in (0,1), got " << kappa;
        throw ArgumentError(os.str());
    }
}

// log-odds of slab versus spike; normalizing constants cancel.
double slab_log_odds(double norm, double kappa, const SsglHyper& h) {
    return std::log(kappa) - std::log1p(-kappa) + h.d * (std::log(h.lambda1) - std::log(h.lambda0)) +
           (h.lambda0 - h.lambda1) * norm;
}
}  // namespace

double pstar(double norm, double kappa, const SsglHyper& h) {
    check_kappa(kappa);
    return std::clamp(logistic(slab_log_odds(norm, kappa, h)), kKappaEps, 1.0 - kKappaEps);
}

double pstar(const Eigen::VectorXd& beta, double kappa, const SsglHyper& h) {
    return pstar(beta.norm(), kappa, h);
}

double adaptive_weight(double p, const SsglHyper& h) {
    if (!(p >= 0.0 && p <= 1.0)) {
        std::ostringstream os;
        os << "inclusion probability must lie in [0,1], got " << p;
        throw ArgumentError(os.str());
    }
    return h.lambda1 * p + h.lambda0 * (1.0 - p);
}

double update_kappa(const Eigen::VectorXd& pstars, const SsglHyper& h) {
    const double p = static_cast<double>(pstars.size());
    const double denom = h.a + h.b + p - 2.0;
    if (!(denom > 0.0)) throw ArgumentError("kappa update requires a + b + p - 2 > 0");
    return (h.a - 1.0 + pstars.sum()) / denom;
}

double clamp_kappa(double kappa) { return std::clamp(kappa, kKappaEps, 1.0 - kKappaEps); }

double omega_threshold(const SsglHyper& h, double kappa) {
    check_kappa(kappa);
    if (h.degenerate()) return 0.0;
    const double log_arg = std::log1p(-kappa) - std::log(kappa) + h.d * (std::log(h.lambda0) - std::log(h.lambda1));
    if (!(log_arg > 0.0)) return 0.0;
    return log_arg / (h.lambda0 - h.lambda1);
}

double log_mixture(double norm, double kappa, const SsglHyper& h) {
    const double spike = std::log1p(-kappa) + log_psi(norm, h.lambda0, h.d);
    const double slab = std::log(kappa) + log_psi(norm, h.lambda1, h.d);
    const double hi = std::max(spike, slab);
    return hi + std::log1p(std::exp(std::min(spike, slab) - hi));
}

}  // namespace ssgl_gam
