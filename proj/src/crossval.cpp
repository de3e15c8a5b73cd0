#include "ssgl_gam/crossval.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>

#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/parallel.hpp"
#include "ssgl_gam/rng.hpp"

namespace ssgl_gam {

std::vector<int> kfold_split(int n, int folds, std::uint64_t seed) {
    if (folds < 2 || folds > n) {
        std::ostringstream os;
        os << "number of folds must lie in [2, n=" << n << "], got " << folds;
        throw ArgumentError(os.str());
    }
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(seed);
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<int> fold(static_cast<std::size_t>(n));
    for (std::size_t pos = 0; pos < perm.size(); ++pos)
        fold[static_cast<std::size_t>(perm[pos])] = static_cast<int>(pos % static_cast<std::size_t>(folds));
    return fold;
}

double cv_error(const Family& f, const Eigen::VectorXd& y, const Eigen::VectorXd& eta) {
    if (y.size() != eta.size()) throw ArgumentError("cv_error: lengths differ");
    if (y.size() == 0) throw ArgumentError("cv_error: empty validation set");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double r = y[i] - f.link_inv(eta[i]);
        acc += r * r;
    }
    return acc / static_cast<double>(y.size());
}

int choose_lambda_index(const Eigen::VectorXd& mean_error) {
    if (mean_error.size() == 0) throw ArgumentError("empty error curve");
    const double best = mean_error.minCoeff();
    const double tol = 1e-5 * std::max(std::abs(best), 1e-300);
    int chosen = 0;
    for (Eigen::Index g = 0; g < mean_error.size(); ++g)
        if (mean_error[g] <= best + tol) chosen = static_cast<int>(g);
    return chosen;
}

std::vector<double> equispaced_grid(double lo, double hi, int n) {
    if (n < 1) throw ArgumentError("grid needs at least one point");
    if (!(hi >= lo)) throw ArgumentError("grid upper end must not be below the lower end");
    if (n == 1) return {lo};
    std::vector<double> g(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) g[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (n - 1);
    g.back() = hi;
    return g;
}

std::vector<double> parse_grid(std::string_view text) {
    const auto c1 = text.find(':');
    const auto c2 = c1 == std::string_view::npos ? c1 : text.find(':', c1 + 1);
    if (c2 == std::string_view::npos) throw ArgumentError("grid must look like lo:hi:n, got '" + std::string(text) + "'");
    double lo = 0.0;
    double hi = 0.0;
    int n = 0;
    auto parse = [&](std::string_view s, auto& out) {
        const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
        if (res.ec != std::errc() || res.ptr != s.data() + s.size())
            throw ArgumentError("cannot parse grid component '" + std::string(s) + "'");
    };
    parse(text.substr(0, c1), lo);
    parse(text.substr(c1 + 1, c2 - c1 - 1), hi);
    parse(text.substr(c2 + 1), n);
    if (!(lo > 0.0)) throw ArgumentError("grid values must be positive");
    return equispaced_grid(lo, hi, n);
}

std::vector<double> path_to(const std::vector<double>& grid, double lambda0) {
    std::vector<double> out;
    for (double v : grid)
        if (v < lambda0) out.push_back(v);
    out.push_back(lambda0);
    return out;
}

SsglHyper hyper_at(const SsglHyper& base, double lambda0, Penalty penalty) {
    SsglHyper h = base;
    h.lambda0 = lambda0;
    if (penalty == Penalty::group_lasso) h.lambda1 = lambda0;
    return h;
}

std::vector<SbGamFit> fit_path(const Family& f, const Eigen::VectorXd& y, const DesignBlocks& design,
                               const SsglHyper& base, const std::vector<double>& grid, Penalty penalty,
                               const EmConfig& em_cfg, const SolverConfig& solver_cfg) {
    if (grid.empty()) throw ArgumentError("lambda0 grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw ArgumentError("lambda0 grid must be ascending");
    std::vector<SbGamFit> out;
    out.reserve(grid.size());
    for (double lam : grid) {
        const SsglHyper h = hyper_at(base, lam, penalty);
        if (out.empty()) {
            out.push_back(fit(f, y, design, h, em_cfg, solver_cfg));
        } else {
            const FitStart start = out.back().warm_start();
            out.push_back(fit(f, y, design, h, em_cfg, solver_cfg, &start));
        }
    }
    return out;
}

DesignBlocks prepare_design(const Eigen::MatrixXd& x_raw, const BasisSpec& spec, bool orthonormalize) {
    Rescaled r = rescale(x_raw);
    return build_design(r.x, spec, std::move(r.ranges), orthonormalize);
}

namespace {

Eigen::MatrixXd take_rows(const Eigen::MatrixXd& m, const std::vector<int>& rows) {
    Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), m.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Eigen::Index>(i)) = m.row(rows[i]);
    return out;
}

Eigen::VectorXd take(const Eigen::VectorXd& v, const std::vector<int>& rows) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
    return out;
}

struct FoldErrors {
    std::vector<double> error;
    std::vector<char> failed;
};

// One fold's warm-started path. A grid value whose fit fails numerically is
// scored with the null model and the path restarts cold at the next value.
FoldErrors run_fold(const Family& f, const Eigen::VectorXd& y_tr, const Eigen::MatrixXd& x_tr,
                    const Eigen::VectorXd& y_va, const Eigen::MatrixXd& x_va, const BasisSpec& spec,
                    const SsglHyper& base, const std::vector<double>& grid, Penalty penalty, const EmConfig& em_cfg,
                    const SolverConfig& solver_cfg, bool orthonormalize) {
    const DesignBlocks design = prepare_design(x_tr, spec, orthonormalize);
    const double null_err = cv_error(f, y_va, Eigen::VectorXd::Constant(y_va.size(), f.null_intercept(y_tr)));

    FoldErrors out{std::vector<double>(grid.size()), std::vector<char>(grid.size(), 0)};
    std::optional<FitStart> start;
    for (std::size_t g = 0; g < grid.size(); ++g) {
        const SsglHyper h = hyper_at(base, grid[g], penalty);
        try {
            SbGamFit m = fit(f, y_tr, design, h, em_cfg, solver_cfg, start ? &*start : nullptr);
            out.error[g] = cv_error(f, y_va, predict(m, x_va, Scale::link));
            start = m.warm_start();
        } catch (const NumericalError&) {
            out.error[g] = null_err;
            out.failed[g] = 1;
            start.reset();
        }
    }
    return out;
}

}  // namespace

CvOutcome cv_fit(const Family& f, const Eigen::VectorXd& y, const Eigen::MatrixXd& x_raw, const BasisSpec& spec,
                 const SsglHyper& base, const std::vector<double>& grid, const CvConfig& cv_cfg,
                 const EmConfig& em_cfg, const SolverConfig& solver_cfg, Penalty penalty, bool orthonormalize) {
    if (grid.empty()) throw ArgumentError("lambda0 grid is empty");
    if (!std::is_sorted(grid.begin(), grid.end())) throw ArgumentError("lambda0 grid must be ascending");
    if (y.size() != x_raw.rows()) throw DataError("response length differs from the number of covariate rows");
    f.check_responses(y);

    const int n = static_cast<int>(y.size());
    const int K = cv_cfg.folds;
    const std::vector<int> fold = kfold_split(n, K, cv_cfg.seed);

    CvResult cv;
    cv.grid = grid;
    cv.seed = cv_cfg.seed;
    cv.folds = K;
    cv.fold_errors.resize(K, static_cast<Eigen::Index>(grid.size()));
    cv.failed.resize(static_cast<std::size_t>(K));

    std::vector<FoldErrors> per_fold(static_cast<std::size_t>(K));
    parallel_for(static_cast<std::size_t>(K), cv_cfg.jobs, [&](std::size_t k) {
        std::vector<int> tr;
        std::vector<int> va;
        for (int i = 0; i < n; ++i) (fold[static_cast<std::size_t>(i)] == static_cast<int>(k) ? va : tr).push_back(i);
        per_fold[k] = run_fold(f, take(y, tr), take_rows(x_raw, tr), take(y, va), take_rows(x_raw, va), spec, base,
                               grid, penalty, em_cfg, solver_cfg, orthonormalize);
    });
    for (int k = 0; k < K; ++k) {
        const auto& fe = per_fold[static_cast<std::size_t>(k)];
        for (std::size_t g = 0; g < grid.size(); ++g) cv.fold_errors(k, static_cast<Eigen::Index>(g)) = fe.error[g];
        cv.failed[static_cast<std::size_t>(k)] = fe.failed;
    }

    cv.mean_error = cv.fold_errors.colwise().mean().transpose();
    cv.std_error.resize(cv.mean_error.size());
    for (Eigen::Index g = 0; g < cv.mean_error.size(); ++g) {
        const double var = (cv.fold_errors.col(g).array() - cv.mean_error[g]).square().sum() / (K - 1);
        cv.std_error[g] = std::sqrt(var / K);
    }
    cv.chosen_index = choose_lambda_index(cv.mean_error);
    cv.chosen_lambda0 = grid[static_cast<std::size_t>(cv.chosen_index)];

    const DesignBlocks design = prepare_design(x_raw, spec, orthonormalize);
    const std::vector<double> prefix(grid.begin(), grid.begin() + cv.chosen_index + 1);
    std::vector<SbGamFit> path = fit_path(f, y, design, base, prefix, penalty, em_cfg, solver_cfg);
    return CvOutcome{std::move(cv), std::move(path.back())};
}

}  // namespace ssgl_gam
