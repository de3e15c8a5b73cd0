#include "ssgl_gam/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "ssgl_gam/errors.hpp"

namespace ssgl_gam {

namespace {

void same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const char* what) {
    if (a.size() != b.size()) {
        std::ostringstream os;
        os << what << ": lengths differ (" << a.size() << " vs " << b.size() << ")";
        throw MetricError(os.str());
    }
    if (a.size() == 0) throw MetricError(std::string(what) + ": empty input");
}

}  // namespace

SelectionCounts selection_counts(const std::vector<int>& selected, const std::vector<int>& truth, int p) {
    std::vector<char> sel(static_cast<std::size_t>(p), 0);
    std::vector<char> tru(static_cast<std::size_t>(p), 0);
    for (int j : selected) {
        if (j < 0 || j >= p) throw MetricError("selected index out of range");
        sel[static_cast<std::size_t>(j)] = 1;
    }
    for (int j : truth) {
        if (j < 0 || j >= p) throw MetricError("true support index out of range");
        tru[static_cast<std::size_t>(j)] = 1;
    }
    SelectionCounts c;
    for (std::size_t j = 0; j < sel.size(); ++j) {
        if (sel[j] && tru[j]) ++c.tp;
        else if (sel[j]) ++c.fp;
        else if (tru[j]) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double mse_f(const Eigen::VectorXd& fhat, const Eigen::VectorXd& ftrue) {
    same_length(fhat, ftrue, "mse");
    return (fhat - ftrue).squaredNorm() / static_cast<double>(fhat.size());
}

double mcc(const SelectionCounts& c) {
    const double tp = static_cast<double>(c.tp), tn = static_cast<double>(c.tn);
    const double fp = static_cast<double>(c.fp), fn = static_cast<double>(c.fn);
    const double den = (tp + fp) * (tp + fn) * (tn + fp) * (tn + fn);
    if (den == 0.0) return 0.0;
    return (tp * tn - fp * fn) / std::sqrt(den);
}

double auc(const Eigen::VectorXd& y, const Eigen::VectorXd& scores) {
    same_length(y, scores, "auc");
    const Eigen::Index m = y.size();
    long n_pos = 0;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (y[i] != 0.0 && y[i] != 1.0) throw MetricError("auc: labels must be 0 or 1");
        if (!std::isfinite(scores[i])) throw MetricError("auc: non-finite score");
        n_pos += y[i] == 1.0;
    }
    const long n_neg = static_cast<long>(m) - n_pos;
    if (n_pos == 0 || n_neg == 0) throw MetricError("auc: both classes must be present");

    std::vector<Eigen::Index> order(static_cast<std::size_t>(m));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return scores[a] < scores[b]; });
    double rank_sum = 0.0;
    for (std::size_t lo = 0; lo < order.size();) {
        std::size_t hi = lo;
        while (hi + 1 < order.size() && scores[order[hi + 1]] == scores[order[lo]]) ++hi;
        const double midrank = 0.5 * static_cast<double>(lo + hi) + 1.0;
        for (std::size_t k = lo; k <= hi; ++k)
            if (y[order[k]] == 1.0) rank_sum += midrank;
        lo = hi + 1;
    }
    const double np = static_cast<double>(n_pos);
    return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

double mspe(const Eigen::VectorXd& y, const Eigen::VectorXd& mean_hat) {
    same_length(y, mean_hat, "mspe");
    return (y - mean_hat).squaredNorm() / static_cast<double>(y.size());
}

}  // namespace ssgl_gam
