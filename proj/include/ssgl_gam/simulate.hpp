#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "ssgl_gam/family.hpp"

namespace ssgl_gam {

enum class ScenarioKind { logistic_s5, poisson_s5, negbinomial_b1 };

/**
 * Simulation designs with four active covariates (0-based 0..3):
 *
 *   logistic-s5     eta = 5 sin(2 pi x1) - 4 cos(pi x2) + 1.5 e^(x3-1) - 2 x4^2
 *   poisson-s5      eta = 1.5 sin(2 pi x1) - cos(pi x2) + e^x3 - x4^2
 *   negbinomial-b1  eta = 1.5 sin(2 pi x1) - cos(pi x2) + e^x3 - 2 x4^2,  size alpha
 */
struct SimScenario {
    ScenarioKind kind = ScenarioKind::logistic_s5;
    int n = 100;
    int p = 500;
    std::uint64_t seed = 1;
    double nb_size = 1.0;

    /// Scenario with its default n and p (100 x 500, or 500 x 50 for negbinomial-b1).
    static SimScenario named(std::string_view name, std::uint64_t seed = 1);
    std::string name() const;
    Family family() const;
    void validate() const;
};

struct SimData {
    Eigen::MatrixXd x;  // n x p, iid U[0,1)
    Eigen::VectorXd y;
    Eigen::VectorXd eta;  // true linear predictor
    std::vector<int> support;  // 0-based active covariates
};

/// True linear predictor of one row.
double true_eta(ScenarioKind kind, const Eigen::Ref<const Eigen::RowVectorXd>& x);

SimData gen(const SimScenario& s);
/// m fresh rows from a stream independent of the training draw.
SimData gen_test(const SimScenario& s, int m, std::uint64_t seed);

/// Draws y_i from the family with linear predictor eta_i.
Eigen::VectorXd draw_response(const Family& f, const Eigen::VectorXd& eta, std::uint64_t seed);

}  // namespace ssgl_gam
