#include "ssgl_gam/em_fit.hpp"

#include <cmath>
#include <sstream>

#include "ssgl_gam/errors.hpp"

namespace ssgl_gam {

void EmConfig::validate() const {
    if (!(em_tol > 0.0) || !(coef_tol > 0.0)) throw ArgumentError("EM tolerances must be positive");
    if (max_em < 1) throw ArgumentError("max EM iterations must be positive");
}

FitStart SbGamFit::warm_start() const {
    FitStart s;
    const int dd = d();
    s.gamma.resize(1 + static_cast<Eigen::Index>(p()) * dd);
    s.gamma[0] = intercept;
    for (int j = 0; j < p(); ++j) s.gamma.segment(1 + j * dd, dd) = beta_solver[static_cast<std::size_t>(j)];
    s.kappa = kappa;
    return s;
}

double log_posterior(const Family& f, const Eigen::VectorXd& y, const GroupedDesign& design,
                     const Eigen::VectorXd& gamma, double kappa, const SsglHyper& h) {
    if (!(kappa > 0.0 && kappa < 1.0)) throw ArgumentError("log_posterior: kappa must lie in (0,1)");
    const Eigen::VectorXd eta = design.eta(gamma);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) ll += f.unit_loglik(y[i], eta[i]);
    double lp = ll / f.dispersion();
    for (int j = 0; j < design.p(); ++j) lp += log_mixture(gamma.segment(1 + j * design.d, design.d).norm(), kappa, h);
    lp += (h.a - 1.0) * std::log(kappa) + (h.b - 1.0) * std::log1p(-kappa);
    if (!std::isfinite(lp)) throw NumericalError("log-posterior is not finite");
    return lp;
}

std::vector<int> threshold_groups(const std::vector<Eigen::VectorXd>& groups, double omega) {
    std::vector<int> out;
    for (std::size_t j = 0; j < groups.size(); ++j)
        if (groups[j].norm() > omega) out.push_back(static_cast<int>(j));
    return out;
}

namespace {

std::vector<Eigen::VectorXd> split_groups(const Eigen::VectorXd& gamma, int p, int d) {
    std::vector<Eigen::VectorXd> out(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) out[static_cast<std::size_t>(j)] = gamma.segment(1 + j * d, d);
    return out;
}

}  // namespace

SbGamFit fit(const Family& f, const Eigen::VectorXd& y, const DesignBlocks& design, const SsglHyper& h,
             const EmConfig& em_cfg, const SolverConfig& solver_cfg, const FitStart* start) {
    h.validate();
    em_cfg.validate();
    solver_cfg.validate();
    if (h.d != design.d()) throw ArgumentError("hyperparameter group size differs from the basis size");
    if (y.size() != design.n()) throw DataError("response length differs from the number of design rows");
    f.check_responses(y);

    const int p = design.p();
    const int d = design.d();
    const GroupedDesign gd{design.solver, d};

    Eigen::VectorXd gamma;
    double kappa;
    if (start) {
        if (start->gamma.size() != 1 + static_cast<Eigen::Index>(p) * d)
            throw ArgumentError("warm start has the wrong number of coefficients");
        gamma = start->gamma;
        kappa = clamp_kappa(start->kappa);
    } else {
        gamma = Eigen::VectorXd::Zero(1 + static_cast<Eigen::Index>(p) * d);
        gamma[0] = f.null_intercept(y);
        kappa = clamp_kappa(h.a / (h.a + h.b));
    }

    SbGamFit out;
    out.family = f;
    out.hyper = h;
    out.spec = design.spec;
    out.covariates = design.covariates;
    out.orthonormalized = design.orthonormalized;

    double lp = log_posterior(f, y, gd, gamma, kappa, h);
    out.trace.push_back({0, lp, kappa, static_cast<int>(threshold_groups(split_groups(gamma, p, d),
                                                                         omega_threshold(h, kappa)).size()),
                         0, 0});

    Eigen::VectorXd pstars(p);
    Eigen::VectorXd lambdas(p);
    for (int t = 1; t <= em_cfg.max_em; ++t) {
        for (int j = 0; j < p; ++j) {
            pstars[j] = pstar(gamma.segment(1 + j * d, d).norm(), kappa, h);
            lambdas[j] = adaptive_weight(pstars[j], h);
        }
        const double kappa_next = clamp_kappa(update_kappa(pstars, h));

        MstepResult ms;
        try {
            ms = solve_mstep(f, y, gd, lambdas, gamma, solver_cfg);
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << "EM iteration " << t << " (lambda0=" << h.lambda0 << "): " << e.what();
            throw NumericalError(os.str());
        }

        double change = 0.0;
        double scale = 1.0;
        for (int j = 0; j < p; ++j) {
            const Eigen::VectorXd diff = ms.gamma.segment(1 + j * d, d) - gamma.segment(1 + j * d, d);
            if (diff.isZero(0.0)) continue;
            change = std::max(change, design.to_basis(j, diff).norm());
            scale = std::max(scale, design.to_basis(j, ms.gamma.segment(1 + j * d, d)).norm());
        }

        gamma = std::move(ms.gamma);
        kappa = kappa_next;
        const double lp_next = log_posterior(f, y, gd, gamma, kappa, h);
        const double rel = std::abs(lp_next - lp) / std::max(1.0, std::abs(lp_next));
        lp = lp_next;

        out.step_halvings += ms.halvings;
        out.em_iterations = t;
        out.trace.push_back({t, lp, kappa,
                             static_cast<int>(threshold_groups(split_groups(gamma, p, d),
                                                               omega_threshold(h, kappa)).size()),
                             ms.outer_iterations, ms.halvings});
        if (rel < em_cfg.em_tol && change < em_cfg.coef_tol * scale) {
            out.converged = true;
            break;
        }
    }

    out.intercept = gamma[0];
    out.kappa = kappa;
    out.beta_solver = split_groups(gamma, p, d);
    out.beta.resize(static_cast<std::size_t>(p));
    out.pstars.resize(p);
    for (int j = 0; j < p; ++j) {
        const auto& bs = out.beta_solver[static_cast<std::size_t>(j)];
        out.beta[static_cast<std::size_t>(j)] = design.to_basis(j, bs);
        out.pstars[j] = pstar(bs.norm(), kappa, h);
    }
    out.omega = omega_threshold(h, kappa);
    out.selected = threshold_groups(out.beta_solver, out.omega);
    return out;
}

Eigen::VectorXd predict(const SbGamFit& fit, const Eigen::MatrixXd& x_new_raw, Scale scale, std::size_t* clamped) {
    if (x_new_raw.cols() != fit.p()) {
        std::ostringstream os;
        os << "prediction data has " << x_new_raw.cols() << " covariate columns; the model expects " << fit.p();
        throw DataError(os.str());
    }
    std::vector<CovariateRange> ranges;
    ranges.reserve(fit.covariates.size());
    for (const auto& c : fit.covariates) ranges.push_back(c.range);
    const Eigen::MatrixXd x01 = apply_rescale(x_new_raw, ranges, clamped);

    Eigen::VectorXd eta = Eigen::VectorXd::Constant(x_new_raw.rows(), fit.intercept);
    for (int j = 0; j < fit.p(); ++j) {
        const auto& bj = fit.beta[static_cast<std::size_t>(j)];
        if (bj.isZero(0.0)) continue;
        eta += eval_function(fit.covariates[static_cast<std::size_t>(j)], fit.spec, bj, x01.col(j));
    }
    if (scale == Scale::response)
        for (Eigen::Index i = 0; i < eta.size(); ++i) eta[i] = fit.family.link_inv(eta[i]);
    return eta;
}

FunctionTable extract_functions(const SbGamFit& fit, int j, int grid_size) {
    if (j < 0 || j >= fit.p()) {
        std::ostringstream os;
        os << "covariate index " << j + 1 << " is out of range (model has " << fit.p() << " covariates)";
        throw ArgumentError(os.str());
    }
    if (grid_size < 2) throw ArgumentError("grid size must be at least 2");
    FunctionTable t;
    t.x = Eigen::VectorXd::LinSpaced(grid_size, 0.0, 1.0);
    t.x[0] = 0.0;
    t.x[grid_size - 1] = 1.0;
    t.f = eval_function(fit.covariates[static_cast<std::size_t>(j)], fit.spec, fit.beta[static_cast<std::size_t>(j)],
                        t.x);
    return t;
}

}  // namespace ssgl_gam
