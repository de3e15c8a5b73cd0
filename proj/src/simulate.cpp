#include "ssgl_gam/simulate.hpp"

#include <cmath>
#include <numbers>

#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/rng.hpp"

namespace ssgl_gam {

namespace {

constexpr std::uint64_t kCovariateStream = 1;
constexpr std::uint64_t kResponseStream = 2;
constexpr std::uint64_t kTestStream = 0x7465737400000000ULL;

SimData draw(const SimScenario& s, int n, std::uint64_t seed) {
    SimData out;
    out.x.resize(n, s.p);
    Rng rx(derive_seed(seed, kCovariateStream));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < s.p; ++j) out.x(i, j) = rx.uniform();
    out.eta.resize(n);
    for (int i = 0; i < n; ++i) out.eta[i] = true_eta(s.kind, out.x.row(i));
    out.y = draw_response(s.family(), out.eta, derive_seed(seed, kResponseStream));
    out.support = {0, 1, 2, 3};
    return out;
}

}  // namespace

SimScenario SimScenario::named(std::string_view name, std::uint64_t seed) {
    SimScenario s;
    s.seed = seed;
    if (name == "logistic-s5") {
        s.kind = ScenarioKind::logistic_s5;
    } else if (name == "poisson-s5") {
        s.kind = ScenarioKind::poisson_s5;
    } else if (name == "negbinomial-b1") {
        s.kind = ScenarioKind::negbinomial_b1;
        s.n = 500;
        s.p = 50;
    } else {
        throw ArgumentError("unknown scenario '" + std::string(name) +
                            "' (expected logistic-s5, poisson-s5 or negbinomial-b1)");
    }
    return s;
}

std::string SimScenario::name() const {
    switch (kind) {
        case ScenarioKind::logistic_s5: return "logistic-s5";
        case ScenarioKind::poisson_s5: return "poisson-s5";
        case ScenarioKind::negbinomial_b1: return "negbinomial-b1";
    }
    return "";
}

Family SimScenario::family() const {
    switch (kind) {
        case ScenarioKind::logistic_s5: return Family::binomial();
        case ScenarioKind::poisson_s5: return Family::poisson();
        case ScenarioKind::negbinomial_b1: return Family::negbinomial(nb_size);
    }
    return Family::gaussian();
}

void SimScenario::validate() const {
    if (n < 1) throw ArgumentError("scenario needs n >= 1");
    if (p < 4) throw ArgumentError("scenario needs p >= 4 (four active covariates)");
    if (!(nb_size > 0.0) || !std::isfinite(nb_size)) throw ArgumentError("negative binomial size must be positive");
}

double true_eta(ScenarioKind kind, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
    constexpr double pi = std::numbers::pi;
    const double x1 = x[0], x2 = x[1], x3 = x[2], x4 = x[3];
    switch (kind) {
        case ScenarioKind::logistic_s5:
            return 5.0 * std::sin(2.0 * pi * x1) - 4.0 * std::cos(pi * x2) + 1.5 * std::exp(x3 - 1.0) - 2.0 * x4 * x4;
        case ScenarioKind::poisson_s5:
            return 1.5 * std::sin(2.0 * pi * x1) - std::cos(pi * x2) + std::exp(x3) - x4 * x4;
        case ScenarioKind::negbinomial_b1:
            return 1.5 * std::sin(2.0 * pi * x1) - std::cos(pi * x2) + std::exp(x3) - 2.0 * x4 * x4;
    }
    return 0.0;
}

Eigen::VectorXd draw_response(const Family& f, const Eigen::VectorXd& eta, std::uint64_t seed) {
    Rng rng(seed);
    Eigen::VectorXd y(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double mu = f.link_inv(eta[i]);
        switch (f.kind()) {
            case FamilyKind::gaussian: y[i] = mu + std::sqrt(f.dispersion()) * rng.normal(); break;
            case FamilyKind::binomial: y[i] = rng.bernoulli(mu) ? 1.0 : 0.0; break;
            case FamilyKind::poisson: y[i] = static_cast<double>(rng.poisson(mu)); break;
            case FamilyKind::negbinomial: {
                const double alpha = f.shape();
                y[i] = static_cast<double>(rng.poisson(rng.gamma(alpha, mu / alpha)));
                break;
            }
            case FamilyKind::gamma: {
                const double k = f.shape();
                y[i] = rng.gamma(k, mu / k);
                break;
            }
        }
    }
    return y;
}

SimData gen(const SimScenario& s) {
    s.validate();
    return draw(s, s.n, s.seed);
}

SimData gen_test(const SimScenario& s, int m, std::uint64_t seed) {
    s.validate();
    if (m < 1) throw ArgumentError("test size must be positive");
    return draw(s, m, derive_seed(seed, kTestStream));
}

}  // namespace ssgl_gam
