#include "ssgl_gam/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ssgl_gam/errors.hpp"

namespace ssgl_gam {

BasisSpec BasisSpec::with_df(int df, int degree) {
    BasisSpec spec;
    spec.df = df;
    spec.degree = degree;
    spec.knot_quantiles.clear();
    const int m = df - degree;
    for (int k = 1; k <= m; ++k) spec.knot_quantiles.push_back(static_cast<double>(k) / (m + 1));
    spec.validate();
    return spec;
}

void BasisSpec::validate() const {
    if (degree < 1) throw ArgumentError("spline degree must be at least 1");
    if (df < 2) throw ArgumentError("basis size d must be at least 2");
    for (std::size_t k = 0; k < knot_quantiles.size(); ++k) {
        const double q = knot_quantiles[k];
        if (!(q > 0.0 && q < 1.0)) throw ArgumentError("knot quantiles must lie strictly inside (0,1)");
        if (k > 0 && !(q > knot_quantiles[k - 1]))
            throw ArgumentError("knot quantiles must be strictly increasing");
    }
    if (static_cast<int>(knot_quantiles.size()) + degree != df) {
        std::ostringstream os;
        os << "basis size d=" << df << " is inconsistent with degree " << degree << " and "
           << knot_quantiles.size() << " interior knots (need d = knots + degree)";
        throw ArgumentError(os.str());
    }
}

Rescaled rescale(const Eigen::MatrixXd& x_raw) {
    if (x_raw.rows() < 2) throw DataError("rescale needs at least two rows");
    Rescaled out;
    out.ranges.resize(static_cast<std::size_t>(x_raw.cols()));
    for (Eigen::Index j = 0; j < x_raw.cols(); ++j) {
        const auto col = x_raw.col(j);
        if (!col.allFinite()) {
            std::ostringstream os;
            os << "covariate column " << j + 1 << " contains non-finite values";
            throw DataError(os.str());
        }
        const double lo = col.minCoeff();
        const double hi = col.maxCoeff();
        if (!(hi > lo)) {
            std::ostringstream os;
            os << "covariate column " << j + 1 << " is constant and cannot be rescaled";
            throw DataError(os.str());
        }
        out.ranges[static_cast<std::size_t>(j)] = {lo, hi};
    }
    out.x = apply_rescale(x_raw, out.ranges);
    return out;
}

Eigen::MatrixXd apply_rescale(const Eigen::MatrixXd& x_raw, const std::vector<CovariateRange>& ranges,
                              std::size_t* clamped) {
    if (static_cast<std::size_t>(x_raw.cols()) != ranges.size()) {
        std::ostringstream os;
        os << "expected " << ranges.size() << " covariate columns, got " << x_raw.cols();
        throw DataError(os.str());
    }
    std::size_t n_clamped = 0;
    Eigen::MatrixXd x(x_raw.rows(), x_raw.cols());
    for (Eigen::Index j = 0; j < x_raw.cols(); ++j) {
        const auto& r = ranges[static_cast<std::size_t>(j)];
        for (Eigen::Index i = 0; i < x_raw.rows(); ++i) {
            double v = (x_raw(i, j) - r.lo) / (r.hi - r.lo);
            if (v < 0.0 || v > 1.0) {
                v = std::clamp(v, 0.0, 1.0);
                ++n_clamped;
            }
            x(i, j) = v;
        }
    }
    if (clamped) *clamped = n_clamped;
    return x;
}

double sample_quantile(std::vector<double> values, double q) {
    if (values.empty()) throw ArgumentError("quantile of an empty sample");
    std::sort(values.begin(), values.end());
    const double h = (static_cast<double>(values.size()) - 1.0) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    if (lo + 1 >= values.size()) return values.back();
    return values[lo] + (h - static_cast<double>(lo)) * (values[lo + 1] - values[lo]);
}

std::vector<double> clamped_knots(const std::vector<double>& interior, int degree) {
    std::vector<double> t(static_cast<std::size_t>(degree + 1), 0.0);
    t.insert(t.end(), interior.begin(), interior.end());
    t.insert(t.end(), static_cast<std::size_t>(degree + 1), 1.0);
    return t;
}

Eigen::VectorXd bspline_basis(double x, const std::vector<double>& knots, int degree) {
    const int n_basis = static_cast<int>(knots.size()) - degree - 1;
    x = std::clamp(x, knots.front(), knots.back());

    // Knot span s with knots[s] <= x < knots[s+1]; the right end uses the last span.
    int s = n_basis - 1;
    if (x < knots[static_cast<std::size_t>(n_basis)]) {
        auto it = std::upper_bound(knots.begin() + degree, knots.begin() + n_basis + 1, x);
        s = static_cast<int>(it - knots.begin()) - 1;
    }

    std::vector<double> N(static_cast<std::size_t>(degree + 1), 0.0);
    std::vector<double> left(static_cast<std::size_t>(degree + 1), 0.0);
    std::vector<double> right(static_cast<std::size_t>(degree + 1), 0.0);
    N[0] = 1.0;
    for (int j = 1; j <= degree; ++j) {
        left[j] = x - knots[static_cast<std::size_t>(s + 1 - j)];
        right[j] = knots[static_cast<std::size_t>(s + j)] - x;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double temp = N[r] / (right[r + 1] + left[j - r]);
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }

    Eigen::VectorXd out = Eigen::VectorXd::Zero(n_basis);
    for (int i = 0; i <= degree; ++i) out[s - degree + i] = N[static_cast<std::size_t>(i)];
    return out;
}

namespace {

// Raw basis rows with the first column dropped.
Eigen::MatrixXd kept_basis(const std::vector<double>& interior, const BasisSpec& spec, const Eigen::VectorXd& x01) {
    const auto knots = clamped_knots(interior, spec.degree);
    Eigen::MatrixXd out(x01.size(), spec.df);
    for (Eigen::Index i = 0; i < x01.size(); ++i) {
        const Eigen::VectorXd raw = bspline_basis(x01[i], knots, spec.degree);
        out.row(i) = raw.tail(spec.df).transpose();
    }
    return out;
}

}  // namespace

Eigen::MatrixXd centered_basis(const CovariateBasis& cov, const BasisSpec& spec, const Eigen::VectorXd& x01) {
    Eigen::MatrixXd b = kept_basis(cov.interior_knots, spec, x01);
    b.rowwise() -= cov.column_means.transpose();
    return b;
}

Eigen::VectorXd eval_function(const CovariateBasis& cov, const BasisSpec& spec, const Eigen::VectorXd& beta_j,
                              const Eigen::VectorXd& x01) {
    if (beta_j.size() != spec.df) throw ArgumentError("eval_function: coefficient length differs from d");
    return centered_basis(cov, spec, x01) * beta_j;
}

Eigen::VectorXd DesignBlocks::to_basis(int j, const Eigen::VectorXd& solver_coef) const {
    return transforms[static_cast<std::size_t>(j)] * solver_coef;
}

DesignBlocks build_design(const Eigen::MatrixXd& x01, const BasisSpec& spec, std::vector<CovariateRange> ranges,
                          bool orthonormalize) {
    spec.validate();
    const Eigen::Index n = x01.rows();
    const int p = static_cast<int>(x01.cols());
    const int d = spec.df;
    if (n <= d) {
        std::ostringstream os;
        os << "need more rows (" << n << ") than basis functions per covariate (" << d << ")";
        throw DataError(os.str());
    }
    if (ranges.empty()) ranges.assign(static_cast<std::size_t>(p), CovariateRange{});
    if (static_cast<int>(ranges.size()) != p) throw ArgumentError("build_design: one range per covariate required");

    DesignBlocks out;
    out.spec = spec;
    out.orthonormalized = orthonormalize;
    out.covariates.resize(static_cast<std::size_t>(p));
    out.centered.resize(n, static_cast<Eigen::Index>(p) * d);
    out.solver.resize(n, static_cast<Eigen::Index>(p) * d);
    out.transforms.resize(static_cast<std::size_t>(p));

    for (int j = 0; j < p; ++j) {
        const Eigen::VectorXd col = x01.col(j);
        CovariateBasis& cov = out.covariates[static_cast<std::size_t>(j)];
        cov.range = ranges[static_cast<std::size_t>(j)];

        std::vector<double> values(col.data(), col.data() + col.size());
        double prev = 0.0;
        for (double q : spec.knot_quantiles) {
            const double k = sample_quantile(values, q);
            if (!(k > prev) || !(k < 1.0)) {
                std::ostringstream os;
                os << "covariate " << j + 1 << ": tied sample quantiles give duplicate knots at " << k
                   << "; reduce the number of knots (--knots / --df)";
                throw KnotError(os.str());
            }
            cov.interior_knots.push_back(k);
            prev = k;
        }

        const Eigen::MatrixXd raw = kept_basis(cov.interior_knots, spec, col);
        cov.column_means = raw.colwise().mean().transpose();
        Eigen::MatrixXd block = raw;
        block.rowwise() -= cov.column_means.transpose();
        out.centered.middleCols(static_cast<Eigen::Index>(j) * d, d) = block;

        Eigen::MatrixXd T = Eigen::MatrixXd::Identity(d, d);
        if (orthonormalize) {
            Eigen::JacobiSVD<Eigen::MatrixXd> svd(block, Eigen::ComputeThinV);
            const Eigen::VectorXd s = svd.singularValues();
            if (!(s[d - 1] > 1e-8 * s[0])) {
                std::ostringstream os;
                os << "covariate " << j + 1 << ": spline block is rank deficient (too few distinct values)";
                throw DataError(os.str());
            }
            T = svd.matrixV() * s.cwiseInverse().asDiagonal();
        }
        out.solver.middleCols(static_cast<Eigen::Index>(j) * d, d) = block * T;
        out.transforms[static_cast<std::size_t>(j)] = std::move(T);
    }
    return out;
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.transpose() * m, Eigen::EigenvaluesOnly);
    return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

double design_norm_diag(const DesignBlocks& blocks) {
    if (blocks.p() == 0) throw ArgumentError("design_norm_diag: no blocks");
    double best = 0.0;
    for (int j = 0; j < blocks.p(); ++j) best = std::max(best, spectral_norm(blocks.block(j)));
    return best;
}

}  // namespace ssgl_gam
