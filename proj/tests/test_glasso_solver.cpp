#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/glasso_solver.hpp"

using namespace ssgl_gam;

namespace {

struct Instance {
    Eigen::MatrixXd x;
    Eigen::VectorXd z;
    Eigen::VectorXd w;
    Eigen::VectorXd lambdas;
};

Instance random_instance(std::uint64_t seed, int n, int p, int d, double lam_max, bool unit_weights) {
    std::mt19937_64 gen(seed);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    Instance in;
    in.x = oracle::random_matrix(gen, n, p * d);
    Eigen::VectorXd beta = oracle::random_matrix(gen, p * d, 1);
    in.z = in.x * beta + 0.5 * oracle::random_matrix(gen, n, 1);
    in.w = Eigen::VectorXd::Ones(n);
    if (!unit_weights)
        for (auto& v : in.w) v = 0.2 + ud(gen);
    in.lambdas.resize(p);
    for (auto& l : in.lambdas) l = lam_max * ud(gen);
    return in;
}

Eigen::VectorXd gradient_at(const Family& f, const Eigen::VectorXd& y, const GroupedDesign& gd,
                            const Eigen::VectorXd& gamma, double h = 1e-6) {
    Eigen::VectorXd g(gamma.size());
    for (Eigen::Index k = 0; k < gamma.size(); ++k) {
        Eigen::VectorXd a = gamma, b = gamma;
        a[k] += h;
        b[k] -= h;
        g[k] = (loglik(f, y, gd.eta(a)) - loglik(f, y, gd.eta(b))) / (2 * h);
    }
    return g;
}

}  // namespace

TEST(Irls, Examples) {
    Eigen::VectorXd y(1), eta(1);
    y << 1;
    eta << 0;
    WorkingResponse wr = irls_linearize(Family::binomial(), y, eta);
    EXPECT_DOUBLE_EQ(wr.z[0], 2.0);
    EXPECT_DOUBLE_EQ(wr.w[0], 0.25);
    wr = irls_linearize(Family::poisson(), y, eta);
    EXPECT_DOUBLE_EQ(wr.z[0], 0.0);
    EXPECT_DOUBLE_EQ(wr.w[0], 1.0);
    Eigen::VectorXd yg(3), eg(3);
    yg << 0.3, -2, 5;
    eg << 10, -4, 0.1;
    wr = irls_linearize(Family::gaussian(), yg, eg);
    EXPECT_LE((wr.z - yg).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_EQ(wr.w, Eigen::VectorXd::Ones(3));
}

TEST(Irls, WeightFloorAndNonFinite) {
    Eigen::VectorXd y(1), eta(1);
    y << 1;
    eta << 29;
    const WorkingResponse wr = irls_linearize(Family::binomial(), y, eta);
    EXPECT_GE(wr.w[0], 1e-6);
    eta << std::nan("");
    EXPECT_THROW(irls_linearize(Family::binomial(), y, eta), Error);
}

TEST(GroupBcd, HugePenaltyGivesNullModel) {
    const Instance in = random_instance(1, 30, 3, 2, 0.0, false);
    const GroupedDesign gd{in.x, 2};
    Eigen::VectorXd lam = Eigen::VectorXd::Constant(3, 1e6);
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(7);
    group_bcd(in.z, in.w, gd, lam, gamma);
    EXPECT_EQ(gamma.tail(6).cwiseAbs().maxCoeff(), 0.0);
    EXPECT_NEAR(gamma[0], in.w.dot(in.z) / in.w.sum(), 1e-10);
    EXPECT_TRUE(kkt_check(gamma, in.z, in.w, gd, lam, 1e-4).pass);
}

TEST(GroupBcd, ZeroPenaltyMatchesWls) {
    const Instance in = random_instance(2, 40, 3, 3, 0.0, false);
    const GroupedDesign gd{in.x, 3};
    const Eigen::VectorXd lam = Eigen::VectorXd::Zero(3);
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(10);
    SolverConfig cfg;
    cfg.inner_tol = 1e-12;
    cfg.max_inner = 100000;
    group_bcd(in.z, in.w, gd, lam, gamma, cfg);
    const Eigen::VectorXd want = oracle::dense_wls(in.z, in.w, in.x);
    EXPECT_LE((gamma - want).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(GroupBcd, OrthonormalClosedForm) {
    std::mt19937_64 gen(3);
    Eigen::MatrixXd raw = oracle::random_matrix(gen, 25, 3);
    for (Eigen::Index c = 0; c < 3; ++c) raw.col(c).array() -= raw.col(c).mean();
    const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ() * Eigen::MatrixXd::Identity(25, 3);
    const Eigen::VectorXd z = oracle::random_matrix(gen, 25, 1);
    const Eigen::VectorXd w = Eigen::VectorXd::Ones(25);
    const GroupedDesign gd{q, 3};
    const Eigen::VectorXd xz = q.transpose() * (z.array() - z.mean()).matrix();
    for (double lam : {0.0, 0.3 * xz.norm(), 0.9 * xz.norm(), 2.0 * xz.norm()}) {
        Eigen::VectorXd lv(1);
        lv << lam;
        Eigen::VectorXd gamma = Eigen::VectorXd::Zero(4);
        group_bcd(z, w, gd, lv, gamma);
        const Eigen::VectorXd want = std::max(0.0, 1.0 - lam / xz.norm()) * xz;
        EXPECT_LE((gamma.tail(3) - want).cwiseAbs().maxCoeff(), 1e-8) << lam;
    }
}

TEST(GroupBcd, MatchesProximalGradient) {
    for (std::uint64_t s = 0; s < 25; ++s) {
        const Instance in = random_instance(100 + s, 20, 3, 2, 5.0, s % 2 == 0);
        const GroupedDesign gd{in.x, 2};
        Eigen::VectorXd gamma = Eigen::VectorXd::Zero(7);
        SolverConfig cfg;
        cfg.inner_tol = 1e-13;
        cfg.max_inner = 100000;
        const BcdResult r = group_bcd(in.z, in.w, gd, in.lambdas, gamma, cfg);
        EXPECT_TRUE(r.converged);
        const Eigen::VectorXd want = oracle::prox_group_lasso(in.z, in.w, in.x, 2, in.lambdas);
        EXPECT_LE((gamma - want).cwiseAbs().maxCoeff(), 1e-6) << "instance " << s;
        const KktReport k = kkt_check(gamma, in.z, in.w, gd, in.lambdas, 1e-4);
        EXPECT_TRUE(k.pass) << k.max_violation;
    }
}

TEST(GroupBcd, EachCycleDescends) {
    const Instance in = random_instance(7, 50, 5, 3, 3.0, false);
    const GroupedDesign gd{in.x, 3};
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(16);
    SolverConfig one;
    one.max_inner = 1;
    double prev = quadratic_objective(in.z, in.w, gd, in.lambdas, gamma);
    for (int c = 0; c < 200; ++c) {
        group_bcd(in.z, in.w, gd, in.lambdas, gamma, one);
        const double obj = quadratic_objective(in.z, in.w, gd, in.lambdas, gamma);
        EXPECT_LE(obj, prev + 1e-10 * std::abs(prev));
        prev = obj;
    }
}

TEST(Kkt, DetectsPerturbation) {
    const Instance in = random_instance(8, 40, 3, 2, 1.0, true);
    const GroupedDesign gd{in.x, 2};
    Eigen::VectorXd gamma = Eigen::VectorXd::Zero(7);
    SolverConfig cfg;
    cfg.inner_tol = 1e-12;
    group_bcd(in.z, in.w, gd, in.lambdas, gamma, cfg);
    ASSERT_TRUE(kkt_check(gamma, in.z, in.w, gd, in.lambdas, 1e-4).pass);
    int active = -1;
    for (int j = 0; j < 3; ++j)
        if (gamma.segment(1 + 2 * j, 2).norm() > 0) active = j;
    ASSERT_GE(active, 0);
    gamma[1 + 2 * active] += 0.1;
    const KktReport k = kkt_check(gamma, in.z, in.w, gd, in.lambdas, 1e-4);
    EXPECT_FALSE(k.pass);
    EXPECT_GT(k.max_violation, 1e-4);
}

TEST(Mstep, GaussianIsOneOuterStep) {
    const Instance in = random_instance(9, 30, 2, 2, 1.0, true);
    const GroupedDesign gd{in.x, 2};
    const MstepResult r = solve_mstep(Family::gaussian(), in.z, gd, in.lambdas, Eigen::VectorXd::Zero(5));
    EXPECT_EQ(r.outer_iterations, 1);
    Eigen::VectorXd direct = Eigen::VectorXd::Zero(5);
    group_bcd(in.z, Eigen::VectorXd::Ones(30), gd, in.lambdas, direct);
    EXPECT_LE((r.gamma - direct).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Mstep, UnpenalizedLogisticMatchesNewton) {
    std::mt19937_64 gen(10);
    std::uniform_real_distribution<double> ud(0.0, 1.0);
    const Eigen::MatrixXd x = oracle::random_matrix(gen, 50, 2);
    Eigen::VectorXd y(50);
    for (int i = 0; i < 50; ++i) y[i] = ud(gen) < 1.0 / (1.0 + std::exp(-(0.3 + x(i, 0) - 0.5 * x(i, 1)))) ? 1 : 0;
    const GroupedDesign gd{x, 2};
    SolverConfig cfg;
    cfg.outer_tol = 1e-14;
    cfg.coef_tol = 1e-12;
    cfg.inner_tol = 1e-13;
    const MstepResult r = solve_mstep(Family::binomial(), y, gd, Eigen::VectorXd::Zero(1), Eigen::VectorXd::Zero(3), cfg);
    const Eigen::VectorXd want = oracle::newton_glm(oracle::Glm::logistic, y, x);
    EXPECT_LE((r.gamma - want).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Mstep, NegbinObjectiveNonIncreasing) {
    for (std::uint64_t s = 0; s < 50; ++s) {
        std::mt19937_64 gen(200 + s);
        std::uniform_real_distribution<double> ud(0.0, 1.0);
        const Eigen::MatrixXd x = oracle::random_matrix(gen, 40, 4);
        Eigen::VectorXd y(40);
        std::gamma_distribution<double> gd1(1.0, 1.0);
        for (int i = 0; i < 40; ++i) {
            const double mu = std::exp(0.5 + 0.6 * x(i, 0) - 0.4 * x(i, 2));
            std::poisson_distribution<int> pd(gd1(gen) * mu);
            y[i] = pd(gen);
        }
        const GroupedDesign gd{x, 2};
        Eigen::VectorXd lam(2);
        lam << 0.5 + 3 * ud(gen), 0.5 + 3 * ud(gen);
        const MstepResult r = solve_mstep(Family::negbinomial(1.0), y, gd, lam, Eigen::VectorXd::Zero(5));
        for (std::size_t t = 1; t < r.objective_trace.size(); ++t)
            EXPECT_LE(r.objective_trace[t], r.objective_trace[t - 1] + 1e-8 * std::abs(r.objective_trace[t - 1]))
                << "seed " << s << " step " << t;
    }
}

TEST(Mstep, NegbinStationaryForTrueObjective) {
    std::mt19937_64 gen(300);
    const Eigen::MatrixXd x = oracle::random_matrix(gen, 80, 4);
    Eigen::VectorXd y(80);
    std::gamma_distribution<double> g1(2.0, 0.5);
    for (int i = 0; i < 80; ++i) {
        std::poisson_distribution<int> pd(g1(gen) * std::exp(0.4 + 0.8 * x(i, 0) - 0.5 * x(i, 1)));
        y[i] = pd(gen);
    }
    const GroupedDesign gd{x, 2};
    Eigen::VectorXd lam(2);
    lam << 1.0, 40.0;
    SolverConfig cfg;
    cfg.outer_tol = 1e-13;
    cfg.coef_tol = 1e-10;
    cfg.inner_tol = 1e-12;
    const Family f = Family::negbinomial(2.0);
    const MstepResult r = solve_mstep(f, y, gd, lam, Eigen::VectorXd::Zero(5), cfg);
    const Eigen::VectorXd grad = gradient_at(f, y, gd, r.gamma);
    EXPECT_LE(std::abs(grad[0]), 1e-3);
    for (int j = 0; j < 2; ++j) {
        const Eigen::VectorXd b = r.gamma.segment(1 + 2 * j, 2);
        const Eigen::VectorXd gj = grad.segment(1 + 2 * j, 2);
        if (b.norm() > 0)
            EXPECT_LE((gj - lam[j] * b / b.norm()).norm(), 1e-3);
        else
            EXPECT_LE(gj.norm(), lam[j] + 1e-3);
    }
}

TEST(SolverConfig, Validation) {
    SolverConfig c;
    EXPECT_NO_THROW(c.validate());
    c.inner_tol = 0;
    EXPECT_THROW(c.validate(), ArgumentError);
}
