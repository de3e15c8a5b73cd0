#include <cmath>
#include <limits>
#include <random>

#include <gtest/gtest.h>

#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/family.hpp"

using namespace ssgl_gam;

namespace {

std::vector<Family> all_families() {
    return {Family::gaussian(1.0), Family::binomial(), Family::poisson(), Family::negbinomial(1.0),
            Family::negbinomial(2.5), Family::gamma(2.0)};
}

// A natural parameter valid for f, drawn from u in [-3, 3].
double valid_theta(const Family& f, double u) {
    switch (f.kind()) {
        case FamilyKind::negbinomial:
        case FamilyKind::gamma:
            return -0.5 * std::exp(-u / 2.0);
        default:
            return u;
    }
}

}  // namespace

TEST(Family, CumulantExamples) {
    EXPECT_NEAR(Family::binomial().cumulant(0.0), std::log(2.0), 1e-15);
    EXPECT_DOUBLE_EQ(Family::poisson().cumulant(0.0), 1.0);
    EXPECT_NEAR(Family::negbinomial(1.0).cumulant(-std::log(2.0)), std::log(2.0), 1e-15);
    EXPECT_THROW(Family::negbinomial(1.0).cumulant(0.0), DomainError);
    EXPECT_THROW(Family::negbinomial(1.0).cumulant(0.3), DomainError);
}

TEST(Family, CumulantNoOverflow) {
    const Family f = Family::binomial();
    EXPECT_NEAR(f.cumulant(800.0), 800.0, 1e-9);
    EXPECT_NEAR(f.cumulant(-800.0), 0.0, 1e-300);
    EXPECT_NEAR(f.mean(800.0), 1.0, 1e-15);
    EXPECT_TRUE(std::isfinite(f.mean(-800.0)));
}

TEST(Family, MeanAndVarianceExamples) {
    EXPECT_DOUBLE_EQ(Family::binomial().mean(0.0), 0.5);
    EXPECT_DOUBLE_EQ(Family::binomial().variance_b(0.0), 0.25);
    EXPECT_NEAR(Family::poisson().mean(1.0), std::exp(1.0), 1e-15);
    EXPECT_NEAR(Family::negbinomial(1.0).mean(-std::log(2.0)), 1.0, 1e-14);
}

TEST(Family, XiExamples) {
    EXPECT_EQ(Family::binomial().xi(3.7), 3.7);
    EXPECT_NEAR(Family::negbinomial(1.0).xi(0.0), -std::log(2.0), 1e-15);
    const Family nb = Family::negbinomial(1.0);
    double prev = nb.xi(0.0);
    for (double eta : {1.0, 5.0, 20.0, 40.0}) {
        const double v = nb.xi(eta);
        EXPECT_LT(v, 0.0);
        EXPECT_GT(v, prev);
        prev = v;
    }
    EXPECT_THROW(nb.xi(std::numeric_limits<double>::quiet_NaN()), ArgumentError);
    EXPECT_THROW(nb.xi(std::numeric_limits<double>::infinity()), ArgumentError);
}

TEST(Family, CanonicalIdentityBitExact) {
    std::mt19937_64 gen(11);
    std::uniform_real_distribution<double> ud(-50.0, 50.0);
    for (const Family& f : {Family::gaussian(2.0), Family::binomial(), Family::poisson()}) {
        EXPECT_TRUE(f.canonical());
        for (int i = 0; i < 200; ++i) {
            const double eta = ud(gen);
            EXPECT_EQ(f.xi(eta), eta);
            EXPECT_EQ(f.xi_prime(eta), 1.0);
        }
    }
    EXPECT_FALSE(Family::negbinomial(1.0).canonical());
    EXPECT_FALSE(Family::gamma(1.0).canonical());
}

TEST(Family, LinkExamples) {
    const Family b = Family::binomial();
    EXPECT_DOUBLE_EQ(b.link(0.5), 0.0);
    EXPECT_DOUBLE_EQ(b.link_deriv(0.5), 4.0);
    EXPECT_DOUBLE_EQ(b.var_fun(0.5), 0.25);
    const Family p = Family::poisson();
    EXPECT_DOUBLE_EQ(p.link(1.0), 0.0);
    EXPECT_DOUBLE_EQ(p.link_deriv(1.0), 1.0);
    EXPECT_DOUBLE_EQ(p.var_fun(1.0), 1.0);
    EXPECT_NEAR(Family::negbinomial(2.0).var_fun(2.0), 4.0, 1e-12);
    EXPECT_THROW(b.link(1.5), DomainError);
    EXPECT_THROW(p.link(-1.0), DomainError);
}

TEST(Family, FiniteDifferences) {
    std::mt19937_64 gen(1);
    std::uniform_real_distribution<double> ud(-3.0, 3.0);
    const double h = 1e-5;
    // absolute 1e-6 for values of order one, relative beyond
    auto tol = [](double v) { return 1e-6 * std::max(1.0, std::abs(v)); };
    for (const Family& f : all_families()) {
        for (int i = 0; i < 200; ++i) {
            const double th = valid_theta(f, ud(gen));
            const double db = (f.cumulant(th + h) - f.cumulant(th - h)) / (2 * h);
            EXPECT_NEAR(f.mean(th), db, tol(db)) << f.name() << " theta=" << th;
            const double d2b = (f.mean(th + h) - f.mean(th - h)) / (2 * h);
            EXPECT_NEAR(f.variance_b(th), d2b, tol(d2b)) << f.name();

            const double mu = f.mean(th);
            const double hm = h * std::max(1.0, std::abs(mu)) * (f.kind() == FamilyKind::binomial ? mu * (1 - mu) : 1.0);
            const double dg = (f.link(mu + hm) - f.link(mu - hm)) / (2 * hm);
            EXPECT_NEAR(f.link_deriv(mu), dg, tol(dg)) << f.name();

            const double eta = ud(gen);
            const double dxi = (f.xi(eta + h) - f.xi(eta - h)) / (2 * h);
            EXPECT_NEAR(f.xi_prime(eta), dxi, tol(dxi)) << f.name();
        }
    }
}

TEST(Family, ComposeIdentity) {
    std::mt19937_64 gen(2);
    std::uniform_real_distribution<double> ud(0.001, 0.999);
    for (const Family& f : all_families()) {
        for (int i = 0; i < 200; ++i) {
            double mu = ud(gen);
            if (f.kind() != FamilyKind::binomial) mu = mu * 40.0 - (f.kind() == FamilyKind::gaussian ? 20.0 : 0.0);
            const double back = f.link_inv(f.link(mu));
            EXPECT_NEAR(back, mu, 1e-12 * std::max(1.0, std::abs(mu))) << f.name();
        }
    }
}

TEST(Family, MonotoneMeanPositiveVariance) {
    for (const Family& f : all_families()) {
        double prev = -std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 100; ++i) {
            const double th = valid_theta(f, -3.0 + 0.06 * i);
            const double m = f.mean(th);
            EXPECT_GT(m, prev) << f.name();
            prev = m;
            EXPECT_GT(f.variance_b(th), 0.0);
            EXPECT_GT(f.var_fun(m), 0.0);
        }
    }
}

TEST(Family, LoglikExamples) {
    Eigen::VectorXd y1(1), e1(1);
    y1 << 1;
    e1 << 0;
    EXPECT_NEAR(loglik(Family::binomial(), y1, e1), -std::log(2.0), 1e-15);
    y1 << 2;
    EXPECT_DOUBLE_EQ(loglik(Family::poisson(), y1, e1), -1.0);
    for (const Family& f : all_families()) EXPECT_EQ(loglik(f, Eigen::VectorXd(), Eigen::VectorXd()), 0.0);
}

TEST(Family, LoglikScalesWithDispersion) {
    Eigen::VectorXd y(2), e(2);
    y << 0.5, -1.0;
    e << 0.2, 0.1;
    EXPECT_NEAR(loglik(Family::gaussian(4.0), y, e), loglik(Family::gaussian(1.0), y, e) / 4.0, 1e-15);
}

TEST(Family, SupportViolationsNameTheRow) {
    Eigen::VectorXd y(3);
    y << 0, 1, 2;
    try {
        Family::binomial().check_responses(y);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("row 3"), std::string::npos) << e.what();
    }
    y << 0, 1.5, 2;
    EXPECT_THROW(Family::poisson().check_responses(y), DataError);
    y << 1, 0, 2;
    EXPECT_THROW(Family::gamma(1.0).check_responses(y), DataError);
    y << 1, 0, 2;
    EXPECT_NO_THROW(Family::negbinomial(1.0).check_responses(y));
}

TEST(Family, FromName) {
    EXPECT_EQ(Family::from_name("negbinomial", 3.0).shape(), 3.0);
    EXPECT_EQ(Family::from_name("gamma", 1.0, 4.0).dispersion(), 0.25);
    EXPECT_EQ(Family::from_name("binomial").dispersion(), 1.0);
    EXPECT_THROW(Family::from_name("beta"), ArgumentError);
    EXPECT_THROW(Family::negbinomial(0.0), ArgumentError);
}

TEST(Family, NullIntercept) {
    Eigen::VectorXd y(4);
    y << 1, 0, 0, 0;
    EXPECT_NEAR(Family::binomial().null_intercept(y), std::log(0.25 / 0.75), 1e-14);
    y << 2, 2, 2, 2;
    EXPECT_NEAR(Family::poisson().null_intercept(y), std::log(2.0), 1e-15);
    y.setZero();
    EXPECT_THROW(Family::poisson().null_intercept(y), DataError);
}
