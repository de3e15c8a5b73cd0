#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "ssgl_gam/crossval.hpp"
#include "ssgl_gam/em_fit.hpp"
#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/simulate.hpp"

using namespace ssgl_gam;

namespace {

struct Toy {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
};

// Additive signal in the first two of p covariates, drawn for family f.
Toy toy(const Family& f, int n, int p, std::uint64_t seed, double scale = 1.0) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    Toy t;
    t.x.resize(n, p);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < p; ++j) t.x(i, j) = ud(gen);
    Eigen::VectorXd eta(n);
    for (int i = 0; i < n; ++i) eta[i] = scale * (std::sin(2 * M_PI * t.x(i, 0)) + 2.0 * (t.x(i, 1) - 0.5));
    if (f.kind() == FamilyKind::gaussian) {
        std::normal_distribution<double> nd(0.0, std::sqrt(f.dispersion()));
        t.y = eta;
        for (auto& v : t.y) v += nd(gen);
    } else {
        t.y = draw_response(f, eta, seed + 1);
    }
    return t;
}

double max_group_diff(const SbGamFit& a, const SbGamFit& b) {
    double m = 0.0;
    for (int j = 0; j < a.p(); ++j)
        m = std::max(m, (a.beta[static_cast<std::size_t>(j)] - b.beta[static_cast<std::size_t>(j)]).norm());
    return m;
}

SsglHyper hyper_for(int p, double l0) { return SsglHyper::defaults(p, 6, l0); }

}  // namespace

TEST(LogPosterior, NullExample) {
    const Toy t = toy(Family::binomial(), 60, 3, 1);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    const GroupedDesign gd{d.solver, 6};
    SsglHyper h = hyper_for(3, 10);
    h.b = 1.0;
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(19);
    const Family f = Family::binomial();
    gamma[0] = f.null_intercept(t.y);
    const double ll = loglik(f, t.y, Eigen::VectorXd::Constant(60, gamma[0]));
    const double mix = std::log(0.5 * std::exp(log_psi(0.0, 10, 6)) + 0.5 * std::exp(log_psi(0.0, 1, 6)));
    EXPECT_NEAR(log_posterior(f, t.y, gd, gamma, 0.5, h), ll + 3 * mix, 1e-10);
}

TEST(LogPosterior, DegenerateSeparates) {
    const Toy t = toy(Family::gaussian(), 40, 2, 2);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    const GroupedDesign gd{d.solver, 6};
    SsglHyper h = hyper_for(2, 1);
    h.a = 2.0;
    h.b = 3.0;
    Eigen::VectorXd gamma = Eigen::VectorXd::LinSpaced(13, -0.5, 0.7);
    const double k = 0.3;
    double want = loglik(Family::gaussian(), t.y, gd.eta(gamma));
    for (int j = 0; j < 2; ++j) want += log_psi(Eigen::VectorXd(gamma.segment(1 + 6 * j, 6)), 1.0);
    want += std::log(k) + 2.0 * std::log1p(-k);
    EXPECT_NEAR(log_posterior(Family::gaussian(), t.y, gd, gamma, k, h), want, 1e-9);
    EXPECT_THROW(log_posterior(Family::gaussian(), t.y, gd, gamma, 0.0, h), ArgumentError);
}

TEST(EmFit, AscentAcrossFamilies) {
    const std::vector<Family> fams{Family::gaussian(1.0), Family::binomial(), Family::poisson(),
                                   Family::negbinomial(1.0), Family::gamma(2.0)};
    int halvings = 0;
    for (std::size_t k = 0; k < fams.size(); ++k) {
        for (std::uint64_t s = 0; s < 4; ++s) {
            const Toy t = toy(fams[k], 80, 5, 40 + 10 * k + s, fams[k].kind() == FamilyKind::gaussian ? 1.0 : 0.7);
            const DesignBlocks d = prepare_design(t.x, BasisSpec{});
            const SbGamFit m = fit(fams[k], t.y, d, hyper_for(5, 8.0 + s));
            halvings += m.step_halvings;
            for (std::size_t i = 1; i < m.trace.size(); ++i) {
                const double prev = m.trace[i - 1].log_posterior;
                EXPECT_GE(m.trace[i].log_posterior, prev - 1e-8 * std::abs(prev))
                    << fams[k].name() << " seed " << s << " iteration " << i;
            }
        }
    }
    RecordProperty("step_halvings", halvings);
}

TEST(EmFit, SelectionFollowsThreshold) {
    const Toy t = toy(Family::gaussian(0.25), 150, 6, 3);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    const SbGamFit m = fit(Family::gaussian(0.25), t.y, d, hyper_for(6, 15));
    const double omega = omega_threshold(m.hyper, m.kappa);
    EXPECT_DOUBLE_EQ(omega, m.omega);
    std::vector<int> want;
    for (int j = 0; j < 6; ++j)
        if (m.beta_solver[static_cast<std::size_t>(j)].norm() > omega) want.push_back(j);
    EXPECT_EQ(m.selected, want);
    EXPECT_EQ(m.selected, (std::vector<int>{0, 1}));
    EXPECT_TRUE(m.converged);
}

TEST(EmFit, ExtraIterationIsAFixedPoint) {
    const Toy t = toy(Family::binomial(), 150, 6, 4, 2.0);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    EmConfig em;
    const SbGamFit m = fit(Family::binomial(), t.y, d, hyper_for(6, 10), em);
    ASSERT_TRUE(m.converged);
    EmConfig one = em;
    one.max_em = 1;
    const FitStart start = m.warm_start();
    const SbGamFit again = fit(Family::binomial(), t.y, d, hyper_for(6, 10), one, {}, &start);
    EXPECT_LT(max_group_diff(m, again), 10 * em.em_tol);
}

TEST(EmFit, Deterministic) {
    const Toy t = toy(Family::poisson(), 100, 5, 5);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    const SbGamFit a = fit(Family::poisson(), t.y, d, hyper_for(5, 12));
    const SbGamFit b = fit(Family::poisson(), t.y, d, hyper_for(5, 12));
    EXPECT_EQ(a.intercept, b.intercept);
    for (int j = 0; j < 5; ++j) EXPECT_EQ(a.beta[static_cast<std::size_t>(j)], b.beta[static_cast<std::size_t>(j)]);
    EXPECT_EQ(a.kappa, b.kappa);
}

TEST(EmFit, DegenerateEqualsGroupLasso) {
    const Toy t = toy(Family::binomial(), 120, 4, 6);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    SolverConfig tight;
    tight.inner_tol = 1e-12;
    tight.outer_tol = 1e-13;
    tight.coef_tol = 1e-11;
    EmConfig em;
    em.em_tol = 1e-12;
    em.coef_tol = 1e-10;
    const SbGamFit m = fit(Family::binomial(), t.y, d, hyper_for(4, 1.0), em, tight);
    const GroupedDesign gd{d.solver, 6};
    Eigen::VectorXd init = Eigen::VectorXd::Zero(25);
    init[0] = Family::binomial().null_intercept(t.y);
    const MstepResult gl = solve_mstep(Family::binomial(), t.y, gd, Eigen::VectorXd::Ones(4), init, tight);
    EXPECT_NEAR(m.intercept, gl.gamma[0], 1e-6);
    for (int j = 0; j < 4; ++j)
        EXPECT_LE((m.beta_solver[static_cast<std::size_t>(j)] - gl.gamma.segment(1 + 6 * j, 6)).cwiseAbs().maxCoeff(),
                  1e-6);
}

TEST(EmFit, NoiseSelectsNothing) {
    int empty_cold = 0;
    int empty_route = 0;
    for (std::uint64_t s = 0; s < 20; ++s) {
        std::mt19937_64 gen(500 + s);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        Eigen::MatrixXd x(100, 50);
        for (auto& v : x.reshaped()) v = ud(gen);
        const Eigen::VectorXd y = draw_response(Family::binomial(), Eigen::VectorXd::Zero(100), 900 + s);
        const DesignBlocks d = prepare_design(x, BasisSpec{});
        const SsglHyper h = hyper_for(50, 50);
        empty_cold += fit(Family::binomial(), y, d, h).selected.empty();
        const auto path = fit_path(Family::binomial(), y, d, h, path_to(equispaced_grid(1, 100, 20), 50.0),
                                   Penalty::ssgl);
        empty_route += path.back().selected.empty();
    }
    EXPECT_GE(empty_cold, 18);
    EXPECT_GE(empty_route, 18);
}

TEST(PathTo, RouteEndsAtTarget) {
    EXPECT_EQ(path_to({1, 5, 9, 13}, 9.0), (std::vector<double>{1, 5, 9}));
    EXPECT_EQ(path_to({1, 5, 9, 13}, 7.0), (std::vector<double>{1, 5, 7}));
    EXPECT_EQ(path_to({1, 5}, 0.5), (std::vector<double>{0.5}));
}

TEST(EmFit, WarmAndColdAgreeOnClearSignal) {
    const Toy t = toy(Family::gaussian(0.25), 200, 5, 7, 1.5);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    EmConfig em;
    const SbGamFit cold = fit(Family::gaussian(0.25), t.y, d, hyper_for(5, 12), em);
    const auto path = fit_path(Family::gaussian(0.25), t.y, d, hyper_for(5, 4), {4.0, 8.0, 12.0}, Penalty::ssgl, em);
    EXPECT_EQ(cold.selected, path.back().selected);
    EXPECT_LT(max_group_diff(cold, path.back()), 100 * em.em_tol);
}

TEST(EmFit, RejectsMismatchedInputs) {
    const Toy t = toy(Family::gaussian(), 50, 2, 8);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    SsglHyper h = hyper_for(2, 10);
    h.d = 5;
    EXPECT_THROW(fit(Family::gaussian(), t.y, d, h), ArgumentError);
    EXPECT_THROW(fit(Family::gaussian(), t.y.head(10), d, hyper_for(2, 10)), DataError);
    EXPECT_THROW(fit(Family::binomial(), t.y, d, hyper_for(2, 10)), DataError);
}

TEST(Predict, ConstantWhenEmpty) {
    const Toy t = toy(Family::binomial(), 60, 3, 9);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    SbGamFit m = fit(Family::binomial(), t.y, d, hyper_for(3, 80), {}, {});
    for (auto& b : m.beta) b.setZero();
    const Eigen::VectorXd r = predict(m, t.x, Scale::response);
    EXPECT_EQ(r.maxCoeff(), r.minCoeff());
    EXPECT_DOUBLE_EQ(r[0], logistic(m.intercept));
    m.intercept = 0.0;
    EXPECT_EQ(predict(m, t.x.topRows(1), Scale::response)[0], 0.5);
}

TEST(Predict, TrainingRowsMatchFittedValues) {
    const Toy t = toy(Family::poisson(), 120, 4, 10);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    const SbGamFit m = fit(Family::poisson(), t.y, d, hyper_for(4, 6));
    Eigen::VectorXd gamma(25);
    gamma[0] = m.intercept;
    for (int j = 0; j < 4; ++j) gamma.segment(1 + 6 * j, 6) = m.beta_solver[static_cast<std::size_t>(j)];
    const Eigen::VectorXd fitted = GroupedDesign{d.solver, 6}.eta(gamma);
    std::size_t clamped = 99;
    const Eigen::VectorXd pred = predict(m, t.x, Scale::link, &clamped);
    EXPECT_EQ(clamped, 0u);
    EXPECT_LE((pred - fitted).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_THROW(predict(m, t.x.leftCols(3), Scale::link), DataError);
}

TEST(ExtractFunctions, GridContract) {
    const Toy t = toy(Family::gaussian(0.25), 150, 4, 11);
    const DesignBlocks d = prepare_design(t.x, BasisSpec{});
    const SbGamFit m = fit(Family::gaussian(0.25), t.y, d, hyper_for(4, 15));
    ASSERT_TRUE(m.beta[3].isZero(0.0));
    const FunctionTable z = extract_functions(m, 3, 50);
    EXPECT_EQ(z.f.cwiseAbs().maxCoeff(), 0.0);
    const FunctionTable f = extract_functions(m, 0, 200);
    ASSERT_EQ(f.x.size(), 200);
    EXPECT_EQ(f.x[0], 0.0);
    EXPECT_EQ(f.x[199], 1.0);
    // at the training points the curve equals the block fit
    const Eigen::VectorXd x01 = (t.x.col(0).array() - m.covariates[0].range.lo) /
                                (m.covariates[0].range.hi - m.covariates[0].range.lo);
    const Eigen::VectorXd at = eval_function(m.covariates[0], m.spec, m.beta[0], x01);
    EXPECT_LE((at - d.block(0) * m.beta[0]).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_THROW(extract_functions(m, 4, 10), ArgumentError);
    EXPECT_THROW(extract_functions(m, 0, 1), ArgumentError);
}
