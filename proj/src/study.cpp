#include "ssgl_gam/study.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/metrics.hpp"
#include "ssgl_gam/parallel.hpp"
#include "ssgl_gam/rng.hpp"

namespace ssgl_gam {

std::string score_name(const SimScenario& s) { return s.kind == ScenarioKind::logistic_s5 ? "auc" : "mspe"; }

ReplicateRow run_replicate(const StudyConfig& cfg, int replicate, std::uint64_t seed) {
    const auto t0 = std::chrono::steady_clock::now();
    ReplicateRow row;
    row.replicate = replicate;
    row.seed = seed;
    try {
        SimScenario s = cfg.scenario;
        s.seed = seed;
        const SimData train = gen(s);
        const SimData test = gen_test(s, cfg.test_size, seed);
        const Family f = s.family();

        const SsglHyper base = SsglHyper::defaults(s.p, cfg.spec.df, cfg.grid.front());
        CvConfig cv_cfg;
        cv_cfg.folds = cfg.folds;
        cv_cfg.seed = derive_seed(seed, 3);
        const CvOutcome out = cv_fit(f, train.y, train.x, cfg.spec, base, cfg.grid, cv_cfg, cfg.em, cfg.solver,
                                     cfg.penalty);

        const Eigen::VectorXd eta_hat = predict(out.fit, test.x, Scale::link);
        row.mse = mse_f(eta_hat, test.eta);
        row.mcc = mcc(selection_counts(out.fit.selected, train.support, s.p));
        if (s.kind == ScenarioKind::logistic_s5) {
            row.score = auc(test.y, eta_hat);
        } else {
            Eigen::VectorXd mean_hat(eta_hat.size());
            for (Eigen::Index i = 0; i < eta_hat.size(); ++i) mean_hat[i] = f.link_inv(eta_hat[i]);
            row.score = mspe(test.y, mean_hat);
        }
        row.lambda0 = out.cv.chosen_lambda0;
        row.n_selected = static_cast<int>(out.fit.selected.size());
        for (int j : out.fit.selected)
            row.true_selected += std::count(train.support.begin(), train.support.end(), j) > 0;
    } catch (const Error& e) {
        row.failed = true;
        row.error = e.what();
    }
    row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return row;
}

std::vector<ReplicateRow> run_study(const StudyConfig& cfg, int reps, std::uint64_t base_seed, int jobs) {
    if (reps < 1) throw ArgumentError("number of replicates must be positive");
    std::vector<ReplicateRow> rows(static_cast<std::size_t>(reps));
    parallel_for(rows.size(), jobs, [&](std::size_t r) {
        rows[r] = run_replicate(cfg, static_cast<int>(r) + 1, derive_seed(base_seed, r));
    });
    return rows;
}

double median(std::vector<double> v) {
    if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
    std::sort(v.begin(), v.end());
    const std::size_t m = v.size() / 2;
    return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

StudySummary median_row(const std::vector<ReplicateRow>& rows) {
    std::vector<double> mse, mc, score, lam, nsel, ntrue;
    for (const auto& r : rows) {
        if (r.failed) continue;
        mse.push_back(r.mse);
        mc.push_back(r.mcc);
        score.push_back(r.score);
        lam.push_back(r.lambda0);
        nsel.push_back(r.n_selected);
        ntrue.push_back(r.true_selected);
    }
    StudySummary m;
    m.mse = median(mse);
    m.mcc = median(mc);
    m.score = median(score);
    m.lambda0 = median(lam);
    m.n_selected = median(nsel);
    m.true_selected = median(ntrue);
    m.n_ok = static_cast<int>(mse.size());
    return m;
}

}  // namespace ssgl_gam
