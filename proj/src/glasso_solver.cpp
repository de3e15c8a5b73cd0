#include "ssgl_gam/glasso_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssgl_gam/errors.hpp"

namespace ssgl_gam {

void SolverConfig::validate() const {
    if (!(outer_tol > 0.0) || !(inner_tol > 0.0) || !(coef_tol > 0.0))
        throw ArgumentError("solver tolerances must be positive");
    if (max_outer < 1 || max_inner < 1) throw ArgumentError("solver iteration limits must be positive");
    if (!(weight_floor > 0.0)) throw ArgumentError("weight floor must be positive");
    if (!(eta_clamp > 0.0)) throw ArgumentError("eta clamp must be positive");
}

Eigen::VectorXd GroupedDesign::eta(const Eigen::VectorXd& gamma) const {
    Eigen::VectorXd out = x * gamma.tail(x.cols());
    out.array() += gamma[0];
    return out;
}

WorkingResponse irls_linearize(const Family& f, const Eigen::VectorXd& y, const Eigen::VectorXd& eta,
                               const SolverConfig& cfg) {
    if (y.size() != eta.size()) throw ArgumentError("irls_linearize: y and eta lengths differ");
    const bool clamp = f.kind() != FamilyKind::gaussian;
    const double tau = f.dispersion();
    WorkingResponse out{Eigen::VectorXd(y.size()), Eigen::VectorXd(y.size())};
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (!std::isfinite(eta[i])) {
            std::ostringstream os;
            os << "non-finite linear predictor at row " << i;
            throw NumericalError(os.str());
        }
        const double e = clamp ? std::clamp(eta[i], -cfg.eta_clamp, cfg.eta_clamp) : eta[i];
        const double mu = f.link_inv(e);
        const double gp = f.link_deriv(mu);
        const double v = f.var_fun(mu);
        const double w_raw = 1.0 / (tau * v * gp * gp);
        const double score = (y[i] - mu) / (tau * v * gp);
        const double w = std::max(w_raw, cfg.weight_floor);
        out.w[i] = w;
        out.z[i] = eta[i] + score / w;
        if (!std::isfinite(out.z[i]) || !std::isfinite(w)) {
            std::ostringstream os;
            os << "non-finite IRLS working quantity at row " << i << " (eta=" << eta[i] << ")";
            throw NumericalError(os.str());
        }
    }
    return out;
}

namespace {

void check_shapes(const Eigen::VectorXd& z, const Eigen::VectorXd& w, const GroupedDesign& design,
                  const Eigen::VectorXd& lambdas, const Eigen::VectorXd& gamma) {
    if (z.size() != design.n() || w.size() != design.n())
        throw ArgumentError("working response and weights must have one entry per row");
    if (lambdas.size() != design.p()) throw ArgumentError("need one penalty weight per group");
    if (gamma.size() != 1 + design.x.cols()) throw ArgumentError("coefficient vector has the wrong length");
    if ((lambdas.array() < 0.0).any()) throw ArgumentError("penalty weights must be non-negative");
}

double largest_eigenvalue(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().maxCoeff();
}

}  // namespace

BcdResult group_bcd(const Eigen::VectorXd& z, const Eigen::VectorXd& w, const GroupedDesign& design,
                    const Eigen::VectorXd& lambdas, Eigen::VectorXd& gamma, const SolverConfig& cfg) {
    check_shapes(z, w, design, lambdas, gamma);
    const int p = design.p();
    const int d = design.d;
    const double wsum = w.sum();

    Eigen::VectorXd r = z - design.eta(gamma);
    Eigen::VectorXd wr = w.cwiseProduct(r);
    std::vector<double> h(static_cast<std::size_t>(p), -1.0);
    std::vector<char> active(static_cast<std::size_t>(p), 0);
    for (int j = 0; j < p; ++j) active[static_cast<std::size_t>(j)] = !gamma.segment(1 + j * d, d).isZero(0.0);

    Eigen::VectorXd tmp(design.n());
    auto cycle = [&](bool full) {
        double change = 0.0;

        const double dm = wr.sum() / wsum;
        gamma[0] += dm;
        r.array() -= dm;
        wr -= dm * w;
        change = std::abs(dm) / (1.0 + std::abs(gamma[0]));

        for (int j = 0; j < p; ++j) {
            const auto ju = static_cast<std::size_t>(j);
            if (!full && !active[ju]) continue;
            auto bj = gamma.segment(1 + j * d, d);
            const auto xj = design.block(j);
            const Eigen::VectorXd v = xj.transpose() * wr;
            const double lam = lambdas[j];
            if (!active[ju] && v.norm() <= lam) continue;

            if (h[ju] < 0.0) h[ju] = largest_eigenvalue(xj.transpose() * w.asDiagonal() * xj);
            const double hj = h[ju];
            if (!(hj > 0.0)) continue;  // all-zero block: beta_j does not enter the fit

            const Eigen::VectorXd u = v + hj * bj;
            const double un = u.norm();
            Eigen::VectorXd next = Eigen::VectorXd::Zero(d);
            if (un > lam) next = ((1.0 - lam / un) / hj) * u;
            const Eigen::VectorXd delta = next - bj;
            if (delta.isZero(0.0)) continue;

            tmp.noalias() = xj * delta;
            r -= tmp;
            wr -= w.cwiseProduct(tmp);
            bj = next;
            active[ju] = !next.isZero(0.0);
            for (int k = 0; k < d; ++k)
                change = std::max(change, std::abs(delta[k]) / (1.0 + std::abs(next[k])));
        }
        if (!std::isfinite(change)) throw NumericalError("group descent produced non-finite coefficients");
        return change;
    };

    BcdResult res;
    while (res.cycles < cfg.max_inner) {
        double change = cycle(true);
        ++res.cycles;
        if (change < cfg.inner_tol) {
            res.converged = true;
            break;
        }
        while (res.cycles < cfg.max_inner) {
            change = cycle(false);
            ++res.cycles;
            if (change < cfg.inner_tol) break;
        }
    }
    return res;
}

double quadratic_objective(const Eigen::VectorXd& z, const Eigen::VectorXd& w, const GroupedDesign& design,
                           const Eigen::VectorXd& lambdas, const Eigen::VectorXd& gamma) {
    check_shapes(z, w, design, lambdas, gamma);
    const Eigen::VectorXd r = z - design.eta(gamma);
    double obj = 0.5 * r.dot(w.cwiseProduct(r));
    for (int j = 0; j < design.p(); ++j) obj += lambdas[j] * gamma.segment(1 + j * design.d, design.d).norm();
    return obj;
}

KktReport kkt_check(const Eigen::VectorXd& gamma, const Eigen::VectorXd& z, const Eigen::VectorXd& w,
                    const GroupedDesign& design, const Eigen::VectorXd& lambdas, double tol) {
    check_shapes(z, w, design, lambdas, gamma);
    KktReport rep;
    const Eigen::VectorXd wr = w.cwiseProduct(z - design.eta(gamma));
    rep.intercept_gradient = std::abs(wr.sum());
    rep.max_violation = rep.intercept_gradient;
    rep.group_ok.resize(static_cast<std::size_t>(design.p()));
    for (int j = 0; j < design.p(); ++j) {
        const Eigen::VectorXd g = design.block(j).transpose() * wr;
        const Eigen::VectorXd bj = gamma.segment(1 + j * design.d, design.d);
        const double bn = bj.norm();
        const double viol = bn > 0.0 ? (g - lambdas[j] * bj / bn).norm() : std::max(0.0, g.norm() - lambdas[j]);
        rep.group_ok[static_cast<std::size_t>(j)] = viol <= tol;
        rep.max_violation = std::max(rep.max_violation, viol);
    }
    rep.pass = rep.max_violation <= tol;
    return rep;
}

double penalized_objective(const Family& f, const Eigen::VectorXd& y, const GroupedDesign& design,
                           const Eigen::VectorXd& lambdas, const Eigen::VectorXd& gamma) {
    const Eigen::VectorXd eta = design.eta(gamma);
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) ll += f.unit_loglik(y[i], eta[i]);
    double obj = -ll / f.dispersion();
    for (int j = 0; j < design.p(); ++j) obj += lambdas[j] * gamma.segment(1 + j * design.d, design.d).norm();
    return obj;
}

MstepResult solve_mstep(const Family& f, const Eigen::VectorXd& y, const GroupedDesign& design,
                        const Eigen::VectorXd& lambdas, const Eigen::VectorXd& gamma_init, const SolverConfig& cfg) {
    cfg.validate();
    if (y.size() != design.n()) throw ArgumentError("response length differs from design rows");
    if (gamma_init.size() != 1 + design.x.cols()) throw ArgumentError("initial coefficients have the wrong length");

    MstepResult res;
    res.gamma = gamma_init;
    double obj = penalized_objective(f, y, design, lambdas, res.gamma);
    if (!std::isfinite(obj)) throw NumericalError("penalized objective is not finite at the starting point");
    res.objective_trace.push_back(obj);

    const bool exact_quadratic = f.kind() == FamilyKind::gaussian;
    for (int outer = 0; outer < cfg.max_outer; ++outer) {
        const WorkingResponse wk = irls_linearize(f, y, design.eta(res.gamma), cfg);
        Eigen::VectorXd next = res.gamma;
        const BcdResult bcd = group_bcd(wk.z, wk.w, design, lambdas, next, cfg);
        res.inner_cycles += bcd.cycles;
        double next_obj = penalized_objective(f, y, design, lambdas, next);

        const double slack = 1e-12 * std::max(1.0, std::abs(obj));
        int halvings = 0;
        while (!(next_obj <= obj + slack)) {
            if (halvings >= cfg.max_halvings) {
                if (std::isfinite(next_obj) && next_obj - obj <= 1e-8 * std::max(1.0, std::abs(obj))) {
                    next = res.gamma;  // no descent left at working precision
                    next_obj = obj;
                    break;
                }
                std::ostringstream os;
                os << "IRLS step failed to decrease the objective after " << halvings << " halvings (outer step "
                   << outer + 1 << ")";
                throw NumericalError(os.str());
            }
            next = 0.5 * (res.gamma + next);
            next_obj = penalized_objective(f, y, design, lambdas, next);
            ++halvings;
        }
        res.halvings += halvings;

        const double scale = 1.0 + res.gamma.cwiseAbs().maxCoeff();
        const double coef_change = (next - res.gamma).cwiseAbs().maxCoeff() / scale;
        const double rel_change = std::abs(obj - next_obj) / std::max(1.0, std::abs(next_obj));
        res.gamma = std::move(next);
        obj = next_obj;
        res.objective_trace.push_back(obj);
        ++res.outer_iterations;

        if (exact_quadratic) {
            res.converged = bcd.converged;
            break;
        }
        if (rel_change < cfg.outer_tol && coef_change < cfg.coef_tol) {
            res.converged = true;
            break;
        }
    }
    return res;
}

}  // namespace ssgl_gam
