#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace ssgl_gam {

/// Spline basis per covariate: `df` columns after dropping the first raw
/// B-spline, so df == interior knots + degree.
struct BasisSpec {
    int df = 6;
    int degree = 3;
    std::vector<double> knot_quantiles{0.25, 0.5, 0.75};

    /// df - degree interior knots at equispaced quantiles k/(m+1).
    static BasisSpec with_df(int df, int degree = 3);

    /// Throws ArgumentError on an inconsistent spec.
    void validate() const;
    int raw_size() const { return df + 1; }
};

struct CovariateRange {
    double lo = 0.0;
    double hi = 1.0;
};

struct Rescaled {
    Eigen::MatrixXd x;
    std::vector<CovariateRange> ranges;
};

/// Maps each column affinely onto [0,1]. Constant columns are a DataError.
Rescaled rescale(const Eigen::MatrixXd& x_raw);

/// Applies stored ranges; values outside [0,1] are clamped and counted.
Eigen::MatrixXd apply_rescale(const Eigen::MatrixXd& x_raw, const std::vector<CovariateRange>& ranges,
                              std::size_t* clamped = nullptr);

/// Type-7 (linear interpolation) sample quantile of an unsorted vector.
double sample_quantile(std::vector<double> values, double q);

/// Clamped knot vector on [0,1]: degree+1 copies of each boundary around the interior knots.
std::vector<double> clamped_knots(const std::vector<double>& interior, int degree);

/// All raw B-spline basis values at x in [0,1] (size interior + degree + 1).
Eigen::VectorXd bspline_basis(double x, const std::vector<double>& knots, int degree);

/// What prediction needs to rebuild one covariate's centered basis.
struct CovariateBasis {
    CovariateRange range;
    std::vector<double> interior_knots;
    Eigen::VectorXd column_means;  // means of the kept raw columns on the training rows
};

/**
 * Centered spline design for p covariates, stored as one n x (p*d) matrix
 * whose j-th d-column block is X_j.
 *
 * `solver` holds the blocks the optimizer sees. With orthonormalization on,
 * solver block j is X_j * T_j with (X_j T_j)'(X_j T_j) = I; coefficients
 * map back as beta_j = T_j * beta_solver_j. Otherwise T_j = I.
 */
struct DesignBlocks {
    BasisSpec spec;
    std::vector<CovariateBasis> covariates;
    Eigen::MatrixXd centered;
    Eigen::MatrixXd solver;
    std::vector<Eigen::MatrixXd> transforms;
    bool orthonormalized = false;

    int p() const { return static_cast<int>(covariates.size()); }
    int d() const { return spec.df; }
    Eigen::Index n() const { return centered.rows(); }

    auto block(int j) const { return centered.middleCols(static_cast<Eigen::Index>(j) * d(), d()); }
    auto solver_block(int j) const { return solver.middleCols(static_cast<Eigen::Index>(j) * d(), d()); }

    /// beta_j in centered-basis coordinates from solver coordinates.
    Eigen::VectorXd to_basis(int j, const Eigen::VectorXd& solver_coef) const;
};

/// Builds the design from covariates already rescaled to [0,1].
/// `ranges` (one per column) are stored for prediction; empty means identity.
DesignBlocks build_design(const Eigen::MatrixXd& x01, const BasisSpec& spec,
                          std::vector<CovariateRange> ranges = {}, bool orthonormalize = true);

/// Largest singular value of a dense matrix.
double spectral_norm(const Eigen::MatrixXd& m);

/// max_j ||X_j||_2 over the centered blocks.
double design_norm_diag(const DesignBlocks& blocks);

/// Centered basis rows at new points (already on the [0,1] scale).
Eigen::MatrixXd centered_basis(const CovariateBasis& cov, const BasisSpec& spec, const Eigen::VectorXd& x01);

/// f_j at new [0,1]-scale points: centered_basis(x) * beta_j.
Eigen::VectorXd eval_function(const CovariateBasis& cov, const BasisSpec& spec, const Eigen::VectorXd& beta_j,
                              const Eigen::VectorXd& x01);

}  // namespace ssgl_gam
