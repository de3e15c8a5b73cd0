#include "ssgl_gam/realdata.hpp"

#include <algorithm>
#include <filesystem>
#include <numeric>
#include <sstream>

#include "ssgl_gam/csv.hpp"
#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/metrics.hpp"
#include "ssgl_gam/parallel.hpp"
#include "ssgl_gam/rng.hpp"

namespace ssgl_gam {

std::optional<ProstateData> load_prostate(const std::string& data_path, const std::string& labels_path) {
    if (!std::filesystem::exists(data_path) || !std::filesystem::exists(labels_path)) return std::nullopt;
    const CsvTable xt = read_csv(data_path);
    const CsvTable lt = read_csv(labels_path);
    if (lt.data.cols() != 1) throw DataError("'" + labels_path + "' must have exactly one column");
    ProstateData d;
    d.x = xt.data;
    d.y = lt.data.col(0);
    d.genes = xt.header;
    return d;
}

void validate_prostate(const ProstateData& d, bool strict) {
    if (d.x.rows() != d.y.size()) {
        std::ostringstream os;
        os << "expression data has " << d.x.rows() << " rows but there are " << d.y.size() << " labels";
        throw DataError(os.str());
    }
    long cases = 0;
    for (Eigen::Index i = 0; i < d.y.size(); ++i) {
        if (d.y[i] != 0.0 && d.y[i] != 1.0) {
            std::ostringstream os;
            os << "label row " << i + 1 << " is " << d.y[i] << "; labels must be 0 or 1";
            throw DataError(os.str());
        }
        cases += d.y[i] == 1.0;
    }
    if (!strict) return;
    if (d.x.rows() != 102 || d.x.cols() != 6033) {
        std::ostringstream os;
        os << "expected 102 x 6033 expression data, got " << d.x.rows() << " x " << d.x.cols();
        throw DataError(os.str());
    }
    if (cases != 52) {
        std::ostringstream os;
        os << "expected 52 cases and 50 controls, got " << cases << " and " << d.y.size() - cases;
        throw DataError(os.str());
    }
}

std::vector<int> split_train_rows(int n, const SplitProtocol& protocol, int repeat) {
    if (protocol.n_train < 2 || protocol.n_train >= n) throw ArgumentError("training size must lie in [2, n)");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    Rng rng(derive_seed(protocol.seed, static_cast<std::uint64_t>(repeat)));
    for (std::size_t i = perm.size() - 1; i > 0; --i) std::swap(perm[i], perm[rng.below(i + 1)]);
    std::vector<int> train(perm.begin(), perm.begin() + protocol.n_train);
    std::sort(train.begin(), train.end());
    return train;
}

ProstateReport run_prostate(const ProstateData& d, const ProstateConfig& cfg) {
    validate_prostate(d, cfg.strict_dims);
    const Family f = Family::binomial();
    const int n = static_cast<int>(d.x.rows());
    const int p = static_cast<int>(d.x.cols());
    const SsglHyper base = SsglHyper::defaults(p, cfg.spec.df, cfg.grid.front());

    ProstateReport rep;
    {
        CvConfig cv;
        cv.folds = cfg.folds;
        cv.seed = derive_seed(cfg.protocol.seed, 0xF011);
        cv.jobs = cfg.jobs;
        CvOutcome out = cv_fit(f, d.y, d.x, cfg.spec, base, cfg.grid, cv, cfg.em, cfg.solver);
        rep.full_fit = std::move(out.fit);
        rep.full_cv = std::move(out.cv);
    }

    const auto R = static_cast<std::size_t>(cfg.protocol.repeats);
    rep.aucs.assign(R, 0.0);
    rep.lambda0s.assign(R, 0.0);
    rep.n_selected.assign(R, 0);
    parallel_for(R, cfg.jobs, [&](std::size_t r) {
        const std::vector<int> tr = split_train_rows(n, cfg.protocol, static_cast<int>(r));
        std::vector<char> in_train(static_cast<std::size_t>(n), 0);
        for (int i : tr) in_train[static_cast<std::size_t>(i)] = 1;
        std::vector<int> te;
        for (int i = 0; i < n; ++i)
            if (!in_train[static_cast<std::size_t>(i)]) te.push_back(i);

        Eigen::MatrixXd x_tr(static_cast<Eigen::Index>(tr.size()), p);
        Eigen::VectorXd y_tr(static_cast<Eigen::Index>(tr.size()));
        for (std::size_t i = 0; i < tr.size(); ++i) {
            x_tr.row(static_cast<Eigen::Index>(i)) = d.x.row(tr[i]);
            y_tr[static_cast<Eigen::Index>(i)] = d.y[tr[i]];
        }
        Eigen::MatrixXd x_te(static_cast<Eigen::Index>(te.size()), p);
        Eigen::VectorXd y_te(static_cast<Eigen::Index>(te.size()));
        for (std::size_t i = 0; i < te.size(); ++i) {
            x_te.row(static_cast<Eigen::Index>(i)) = d.x.row(te[i]);
            y_te[static_cast<Eigen::Index>(i)] = d.y[te[i]];
        }

        CvConfig cv;
        cv.folds = cfg.folds;
        cv.seed = derive_seed(cfg.protocol.seed, 0x5EED0000 + r);
        const CvOutcome out = cv_fit(f, y_tr, x_tr, cfg.spec, base, cfg.grid, cv, cfg.em, cfg.solver);
        rep.aucs[r] = auc(y_te, predict(out.fit, x_te, Scale::link));
        rep.lambda0s[r] = out.cv.chosen_lambda0;
        rep.n_selected[r] = static_cast<int>(out.fit.selected.size());
    });
    rep.mean_auc = std::accumulate(rep.aucs.begin(), rep.aucs.end(), 0.0) / static_cast<double>(R);
    return rep;
}

}  // namespace ssgl_gam
