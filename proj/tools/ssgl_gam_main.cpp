// ssgl-gam: command-line front end for sparse Bayesian GAM fitting.
//
// Exit codes: 0 ok, 1 usage, 2 data, 3 numerical.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "ssgl_gam/basis.hpp"
#include "ssgl_gam/crossval.hpp"
#include "ssgl_gam/csv.hpp"
#include "ssgl_gam/em_fit.hpp"
#include "ssgl_gam/errors.hpp"
#include "ssgl_gam/metrics.hpp"
#include "ssgl_gam/model_io.hpp"
#include "ssgl_gam/parallel.hpp"
#include "ssgl_gam/realdata.hpp"
#include "ssgl_gam/simulate.hpp"
#include "ssgl_gam/study.hpp"

namespace fs = std::filesystem;
using namespace ssgl_gam;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string sibling(const std::string& path, const std::string& suffix) {
    fs::path p(path);
    return (p.parent_path() / (p.stem().string() + suffix)).string();
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        char* end = nullptr;
        const double v = std::strtod(tok.c_str(), &end);
        if (tok.empty() || *end != '\0') throw ArgumentError(std::string("cannot parse ") + what + " '" + text + "'");
        out.push_back(v);
    }
    return out;
}

// Options shared by fit and cv.
struct ModelFlags {
    std::string data;
    std::string family = "binomial";
    double nb_size = 1.0;
    double gamma_shape = 1.0;
    double variance = 1.0;
    double lambda1 = 1.0;
    double a = 1.0;
    double b = 0.0;  // 0 means p
    int df = 0;      // 0 means derived from the knots
    int degree = 3;
    std::string knots;
    bool no_ortho = false;
    double tol = 1e-6;
    int max_iter = 100;
    double inner_tol = 1e-7;
    int inner_max_iter = 1000;

    void add(CLI::App* c) {
        c->add_option("--data", data, "CSV with a y column and covariate columns")->required();
        c->add_option("--family", family, "gaussian, binomial, poisson, negbinomial or gamma");
        c->add_option("--nb-size", nb_size, "negative binomial size alpha");
        c->add_option("--gamma-shape", gamma_shape, "gamma shape");
        c->add_option("--variance", variance, "gaussian noise variance");
        c->add_option("--lambda1", lambda1, "slab scale");
        c->add_option("--a", a, "beta prior a");
        c->add_option("--b", b, "beta prior b (default p)");
        c->add_option("--df", df, "basis functions per covariate (default 6)");
        c->add_option("--degree", degree, "spline degree");
        c->add_option("--knots", knots, "interior knot quantiles, comma separated");
        c->add_flag("--no-orthonormalize", no_ortho, "fit on the raw centered blocks");
        c->add_option("--tol", tol, "EM relative tolerance");
        c->add_option("--max-iter", max_iter, "EM iteration limit");
        c->add_option("--inner-tol", inner_tol, "group descent tolerance");
        c->add_option("--inner-max-iter", inner_max_iter, "group descent cycle limit");
    }

    Family make_family() const {
        if (family == "gaussian") return Family::gaussian(variance);
        return Family::from_name(family, nb_size, gamma_shape);
    }

    BasisSpec spec() const {
        BasisSpec s;
        s.degree = degree;
        if (!knots.empty()) {
            s.knot_quantiles = parse_list(knots, "--knots");
            s.df = df > 0 ? df : static_cast<int>(s.knot_quantiles.size()) + degree;
        } else if (df > 0 || degree != 3) {
            s = BasisSpec::with_df(df > 0 ? df : 6, degree);
        }
        s.validate();
        return s;
    }

    SsglHyper hyper(int p, double lambda0) const {
        SsglHyper h = SsglHyper::defaults(p, spec().df, lambda0);
        h.lambda1 = lambda1;
        h.a = a;
        if (b > 0.0) h.b = b;
        return h;
    }

    EmConfig em() const {
        EmConfig c;
        c.em_tol = tol;
        c.max_em = max_iter;
        return c;
    }

    SolverConfig solver() const {
        SolverConfig c;
        c.inner_tol = inner_tol;
        c.max_inner = inner_max_iter;
        return c;
    }
};

XyData load_xy(const std::string& path) { return split_xy(read_csv(path), path); }

void write_selected(const SbGamFit& m, const std::vector<std::string>& names, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "index,name,norm,pstar\n";
    for (int j : m.selected)
        out << j + 1 << ',' << names[static_cast<std::size_t>(j)] << ','
            << format_double(m.beta_solver[static_cast<std::size_t>(j)].norm()) << ','
            << format_double(m.pstars[j]) << '\n';
}

void write_trace(const SbGamFit& m, const std::string& path) {
    Eigen::MatrixXd t(static_cast<Eigen::Index>(m.trace.size()), 6);
    for (std::size_t i = 0; i < m.trace.size(); ++i) {
        const auto& r = m.trace[i];
        t.row(static_cast<Eigen::Index>(i)) << r.iteration, r.log_posterior, r.kappa, r.n_selected, r.mstep_outer,
            r.halvings;
    }
    write_csv(path, {"iteration", "log_posterior", "kappa", "n_selected", "mstep_outer", "halvings"}, t);
}

void report_fit(const SbGamFit& m, const DesignBlocks& design, bool cold) {
    const double norm = design_norm_diag(design);
    std::cout << "lambda0 " << m.lambda0() << ": selected " << m.selected.size() << " of " << m.p()
              << " covariates, kappa " << m.kappa << ", omega " << m.omega << ", " << m.em_iterations
              << " EM iterations\n";
    std::cout << "design norm ratio ||X||*^2 d/n = " << norm * norm * design.d() / static_cast<double>(design.n())
              << "\n";
    if (cold && m.selected.empty()) std::cerr << "note: nothing selected; zero starts often stall at the null model\n";
    if (!m.converged) std::cerr << "warning: EM did not converge within " << m.em_iterations << " iterations\n";
    if (m.step_halvings > 0) std::cerr << "note: " << m.step_halvings << " IRLS step halvings\n";
}

void write_curves(const SbGamFit& m, const std::vector<int>& which, int grid_size, const std::string& path) {
    std::vector<FunctionTable> tables;
    for (int j : which) tables.push_back(extract_functions(m, j, grid_size));
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << "j,x,x_raw,f\n";
    for (std::size_t k = 0; k < which.size(); ++k) {
        const FunctionTable& t = tables[k];
        const auto& r = m.covariates[static_cast<std::size_t>(which[k])].range;
        for (Eigen::Index i = 0; i < t.x.size(); ++i)
            out << which[k] + 1 << ',' << format_double(t.x[i]) << ',' << format_double(r.lo + t.x[i] * (r.hi - r.lo))
                << ',' << format_double(t.f[i]) << '\n';
    }
}

// Outputs written by the running subcommand; recorded in the manifest.
struct RunState {
    std::vector<std::string> outputs;
    std::vector<std::string> output_flags;
    std::string manifest;
    std::uint64_t seed = 0;
    bool has_seed = false;
};

json options_json(const CLI::App* sub, bool given) {
    json j = json::object();
    for (const CLI::Option* opt : sub->get_options()) {
        const std::string name = opt->get_single_name();
        if (name.empty() || name == "help") continue;
        const bool set = opt->count() > 0;
        if (set != given) continue;
        if (opt->get_type_size() == 0) {
            j[name] = set;
        } else if (set) {
            const auto res = opt->reduced_results();
            j[name] = res.size() == 1 ? json(res[0]) : json(res);
        } else {
            j[name] = opt->get_default_str();
        }
    }
    return j;
}

void write_manifest(const CLI::App* sub, const RunState& st, double seconds) {
    if (st.manifest.empty()) return;
    json j;
    j["tool"] = "ssgl-gam";
    j["version"] = kVersion;
    j["subcommand"] = sub->get_name();
    j["args"] = options_json(sub, true);
    j["defaults"] = options_json(sub, false);
    if (st.has_seed) j["seed"] = st.seed;
    j["cwd"] = fs::current_path().string();
    json outs = json::array();
    for (const auto& o : st.outputs) outs.push_back(fs::absolute(o).string());
    j["outputs"] = outs;
    j["output_flags"] = st.output_flags;
    j["duration_seconds"] = seconds;
    std::ofstream out(st.manifest);
    if (!out) throw DataError("cannot write manifest '" + st.manifest + "'");
    out << j.dump(2) << '\n';
}

int run(std::vector<std::string> args);

int cmd_replay(const std::string& manifest_path, bool check) {
    std::ifstream in(manifest_path);
    if (!in) throw DataError("cannot open manifest '" + manifest_path + "'");
    json m;
    try {
        in >> m;
    } catch (const json::exception& e) {
        throw DataError(manifest_path + ": malformed manifest: " + e.what());
    }
    const std::string sub = m.at("subcommand").get<std::string>();
    const std::set<std::string> out_flags(m.at("output_flags").begin(), m.at("output_flags").end());
    const fs::path cwd = m.at("cwd").get<std::string>();
    const fs::path tmp = fs::temp_directory_path() /
                         ("ssgl-gam-replay-" + std::to_string(std::chrono::steady_clock::now().time_since_epoch().count()));
    if (check) fs::create_directories(tmp);

    std::vector<std::string> argv{sub};
    for (const auto& [name, value] : m.at("args").items()) {
        const std::string flag = "--" + name;
        if (value.is_boolean()) {
            if (value.get<bool>()) argv.push_back(flag);
            continue;
        }
        std::vector<std::string> vals;
        if (value.is_array()) {
            for (const auto& v : value) vals.push_back(v.get<std::string>());
        } else {
            vals.push_back(value.get<std::string>());
        }
        for (auto& v : vals) {
            if (check && out_flags.count(name)) v = (tmp / fs::path(v).filename()).string();
            argv.push_back(flag);
            argv.push_back(v);
        }
    }

    const fs::path here = fs::current_path();
    fs::current_path(cwd);
    int code = 0;
    try {
        code = run(argv);
    } catch (...) {
        fs::current_path(here);
        throw;
    }
    fs::current_path(here);
    if (code != 0 || !check) return code;

    int mismatches = 0;
    for (const auto& o : m.at("outputs")) {
        const fs::path orig = o.get<std::string>();
        const fs::path again = tmp / orig.filename();
        std::ifstream a(orig, std::ios::binary), b(again, std::ios::binary);
        const std::string sa((std::istreambuf_iterator<char>(a)), {});
        const std::string sb((std::istreambuf_iterator<char>(b)), {});
        const bool same = a.good() || a.eof() ? (b.good() || b.eof()) && sa == sb : false;
        std::cout << (same ? "identical " : "DIFFERS   ") << orig.string() << "\n";
        mismatches += !same;
    }
    fs::remove_all(tmp);
    if (mismatches > 0) {
        std::cerr << "replay: " << mismatches << " output(s) differ\n";
        return 3;
    }
    return 0;
}

int run(std::vector<std::string> args) {
    CLI::App app{"Sparse Bayesian generalized additive models (spike-and-slab group lasso)", "ssgl-gam"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);
    const int env_jobs = default_jobs();
    RunState st;

    // simulate
    std::string sim_scenario = "logistic-s5", sim_out, sim_eta_out, sim_test_out;
    int sim_n = 0, sim_p = 0, sim_test = 100;
    std::uint64_t sim_seed = 1;
    auto* sim = app.add_subcommand("simulate", "draw a synthetic data set");
    sim->add_option("--scenario", sim_scenario, "logistic-s5, poisson-s5 or negbinomial-b1");
    sim->add_option("--n", sim_n, "observations (scenario default if 0)");
    sim->add_option("--p", sim_p, "covariates (scenario default if 0)");
    sim->add_option("--seed", sim_seed, "random seed");
    sim->add_option("--out", sim_out, "output CSV (y,x1,...,xp)")->required();
    sim->add_option("--eta-out", sim_eta_out, "optional CSV of the true linear predictor");
    sim->add_option("--test-out", sim_test_out, "optional independent test set (y,x1,...,xp)");
    sim->add_option("--test-size", sim_test, "rows in the test set");

    // fit
    ModelFlags fit_flags;
    double fit_lambda0 = 20.0;
    bool fit_cold = false;
    std::string fit_out, fit_route = "1:100:20";
    auto* fitc = app.add_subcommand("fit", "fit at a single lambda0");
    fit_flags.add(fitc);
    fitc->add_option("--lambda0", fit_lambda0, "spike scale (must exceed lambda1)");
    fitc->add_option("--path-grid", fit_route, "warm starts come from this lo:hi:n grid's values below --lambda0");
    fitc->add_flag("--cold", fit_cold, "start EM from zero at --lambda0 alone");
    fitc->add_option("--out", fit_out, "model file (JSON)")->required();

    // cv
    ModelFlags cv_flags;
    int cv_folds = 5, cv_jobs = env_jobs;
    std::uint64_t cv_seed = 1;
    std::string cv_grid = "1:100:20", cv_out, cv_model_out, cv_penalty = "ssgl";
    auto* cvc = app.add_subcommand("cv", "choose lambda0 by K-fold cross-validation");
    cv_flags.add(cvc);
    cvc->add_option("--folds", cv_folds, "number of folds");
    cvc->add_option("--seed", cv_seed, "fold assignment seed");
    cvc->add_option("--lambda0-grid", cv_grid, "lo:hi:n equispaced grid");
    cvc->add_option("--penalty", cv_penalty, "ssgl or glasso (lambda1 = lambda0)");
    cvc->add_option("--jobs", cv_jobs, "folds fitted concurrently");
    cvc->add_option("--out", cv_out, "CV curve CSV")->required();
    cvc->add_option("--model-out", cv_model_out, "model refit at the chosen lambda0");

    // predict
    std::string pr_model, pr_data, pr_out, pr_scale = "link";
    auto* prc = app.add_subcommand("predict", "predict from a model file");
    prc->add_option("--model", pr_model, "model file")->required();
    prc->add_option("--data", pr_data, "CSV of covariates (a y column is ignored)")->required();
    prc->add_option("--scale", pr_scale, "link or response");
    prc->add_option("--out", pr_out, "prediction CSV")->required();

    // eval
    std::string ev_data, ev_pred, ev_eta, ev_model, ev_family = "binomial", ev_support, ev_out;
    double ev_nb_size = 1.0, ev_gamma_shape = 1.0;
    auto* evc = app.add_subcommand("eval", "score link-scale predictions");
    evc->add_option("--data", ev_data, "test CSV with a y column")->required();
    evc->add_option("--pred", ev_pred, "predictions CSV with an eta column")->required();
    evc->add_option("--eta-true", ev_eta, "CSV with the true eta column (for MSE)");
    evc->add_option("--model", ev_model, "model file (for MCC)");
    evc->add_option("--support", ev_support, "true covariates, 1-based, comma separated (for MCC)");
    evc->add_option("--family", ev_family, "response family");
    evc->add_option("--nb-size", ev_nb_size, "negative binomial size");
    evc->add_option("--gamma-shape", ev_gamma_shape, "gamma shape");
    evc->add_option("--out", ev_out, "metrics CSV")->required();

    // replicate
    std::string rp_scenario = "logistic-s5", rp_grid = "1:100:20", rp_method = "sbgam", rp_out;
    int rp_reps = 20, rp_folds = 5, rp_n = 0, rp_p = 0, rp_test = 100, rp_jobs = env_jobs;
    std::uint64_t rp_seed = 1;
    auto* rpc = app.add_subcommand("replicate", "simulation study over many seeds");
    rpc->add_option("--scenario", rp_scenario, "logistic-s5, poisson-s5 or negbinomial-b1");
    rpc->add_option("--reps", rp_reps, "replicates");
    rpc->add_option("--seed", rp_seed, "base seed");
    rpc->add_option("--lambda0-grid", rp_grid, "lo:hi:n equispaced grid");
    rpc->add_option("--folds", rp_folds, "CV folds");
    rpc->add_option("--method", rp_method, "sbgam or glasso");
    rpc->add_option("--n", rp_n, "observations (scenario default if 0)");
    rpc->add_option("--p", rp_p, "covariates (scenario default if 0)");
    rpc->add_option("--test-size", rp_test, "fresh test points per replicate");
    rpc->add_option("--jobs", rp_jobs, "replicates run concurrently");
    rpc->add_option("--out", rp_out, "summary CSV")->required();

    // curves
    std::string cu_model, cu_which = "selected", cu_out;
    int cu_grid = 100;
    auto* cuc = app.add_subcommand("curves", "tabulate fitted component functions");
    cuc->add_option("--model", cu_model, "model file")->required();
    cuc->add_option("--covariates", cu_which, "'selected', 'all' or 1-based indices");
    cuc->add_option("--grid-size", cu_grid, "points per function");
    cuc->add_option("--out", cu_out, "long-format CSV (j,x,x_raw,f)")->required();

    // prostate
    std::string ps_data, ps_labels, ps_grid = "1:100:20", ps_out;
    int ps_repeats = 50, ps_train = 82, ps_folds = 5, ps_jobs = env_jobs;
    std::uint64_t ps_seed = 1;
    bool ps_relaxed = false;
    auto* psc = app.add_subcommand("prostate", "prostate expression study (data obtained separately)");
    psc->add_option("--data", ps_data, "subjects x genes expression CSV")->required();
    psc->add_option("--labels", ps_labels, "one-column CSV, 1 = cancer")->required();
    psc->add_option("--repeats", ps_repeats, "random train/test splits");
    psc->add_option("--n-train", ps_train, "training rows per split");
    psc->add_option("--seed", ps_seed, "seed");
    psc->add_option("--lambda0-grid", ps_grid, "lo:hi:n equispaced grid");
    psc->add_option("--folds", ps_folds, "CV folds");
    psc->add_option("--jobs", ps_jobs, "splits run concurrently");
    psc->add_flag("--relaxed", ps_relaxed, "accept other dimensions and class counts");
    psc->add_option("--out", ps_out, "per-split CSV")->required();

    // replay
    std::string rl_manifest;
    bool rl_check = false;
    auto* rlc = app.add_subcommand("replay", "re-run a recorded manifest");
    rlc->add_option("manifest", rl_manifest, "manifest JSON")->required();
    rlc->add_flag("--check", rl_check, "write to a scratch directory and compare outputs byte for byte");

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    const auto t0 = std::chrono::steady_clock::now();
    CLI::App* used = app.get_subcommands().front();

    if (sim->parsed()) {
        SimScenario s = SimScenario::named(sim_scenario, sim_seed);
        if (sim_n > 0) s.n = sim_n;
        if (sim_p > 0) s.p = sim_p;
        const SimData d = gen(s);
        std::vector<std::string> header{"y"};
        for (int j = 1; j <= s.p; ++j) header.push_back("x" + std::to_string(j));
        auto write_sim = [&](const SimData& sd, const std::string& path) {
            Eigen::MatrixXd t(sd.x.rows(), sd.x.cols() + 1);
            t << sd.y, sd.x;
            write_csv(path, header, t);
            st.outputs.push_back(path);
        };
        write_sim(d, sim_out);
        st.output_flags = {"out", "eta-out", "test-out"};
        if (!sim_eta_out.empty()) {
            write_csv(sim_eta_out, {"eta_true"}, d.eta);
            st.outputs.push_back(sim_eta_out);
        }
        if (!sim_test_out.empty()) {
            if (sim_test < 1) throw ArgumentError("--test-size must be positive");
            const SimData td = gen_test(s, sim_test, sim_seed);
            write_sim(td, sim_test_out);
            write_csv(sibling(sim_test_out, ".eta.csv"), {"eta_true"}, td.eta);
            st.outputs.push_back(sibling(sim_test_out, ".eta.csv"));
        }
        st.manifest = sibling(sim_out, ".manifest.json");
        st.seed = sim_seed;
        st.has_seed = true;
    } else if (fitc->parsed()) {
        const XyData d = load_xy(fit_flags.data);
        const Family f = fit_flags.make_family();
        const SsglHyper h = fit_flags.hyper(static_cast<int>(d.x.cols()), fit_lambda0);
        if (!(h.lambda0 > h.lambda1)) throw ArgumentError("--lambda0 must exceed --lambda1");
        const DesignBlocks design = prepare_design(d.x, fit_flags.spec(), !fit_flags.no_ortho);
        SbGamFit m;
        if (!fit_cold) {
            const std::vector<double> grid = path_to(parse_grid(fit_route), h.lambda0);
            m = std::move(fit_path(f, d.y, design, h, grid, Penalty::ssgl, fit_flags.em(), fit_flags.solver()).back());
        } else {
            m = fit(f, d.y, design, h, fit_flags.em(), fit_flags.solver());
        }
        save_model(m, fit_out);
        write_selected(m, d.x_names, sibling(fit_out, ".selected.csv"));
        write_trace(m, sibling(fit_out, ".trace.csv"));
        report_fit(m, design, fit_cold);
        st.outputs = {fit_out, sibling(fit_out, ".selected.csv"), sibling(fit_out, ".trace.csv")};
        st.output_flags = {"out"};
        st.manifest = sibling(fit_out, ".manifest.json");
    } else if (cvc->parsed()) {
        const XyData d = load_xy(cv_flags.data);
        const Family f = cv_flags.make_family();
        const std::vector<double> grid = parse_grid(cv_grid);
        const SsglHyper h = cv_flags.hyper(static_cast<int>(d.x.cols()), grid.front());
        Penalty pen = Penalty::ssgl;
        if (cv_penalty == "glasso") pen = Penalty::group_lasso;
        else if (cv_penalty != "ssgl") throw ArgumentError("--penalty must be ssgl or glasso");
        if (pen == Penalty::ssgl && !(grid.front() >= h.lambda1))
            throw ArgumentError("lambda0 grid must not go below --lambda1");
        CvConfig cc;
        cc.folds = cv_folds;
        cc.seed = cv_seed;
        cc.jobs = cv_jobs;
        const CvOutcome out = cv_fit(f, d.y, d.x, cv_flags.spec(), h, grid, cc, cv_flags.em(), cv_flags.solver(), pen,
                                     !cv_flags.no_ortho);
        Eigen::MatrixXd t(static_cast<Eigen::Index>(grid.size()), 4);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            int failed = 0;
            for (const auto& row : out.cv.failed) failed += row[g];
            t.row(static_cast<Eigen::Index>(g)) << grid[g], out.cv.mean_error[static_cast<Eigen::Index>(g)],
                out.cv.std_error[static_cast<Eigen::Index>(g)], failed;
        }
        write_csv(cv_out, {"lambda0", "mean_error", "std_error", "failed_folds"}, t);
        st.outputs.push_back(cv_out);
        std::cout << "chosen lambda0 " << format_double(out.cv.chosen_lambda0) << "\n";
        std::cout << "selected " << out.fit.selected.size() << " of " << out.fit.p() << " covariates\n";
        if (!cv_model_out.empty()) {
            save_model(out.fit, cv_model_out);
            write_selected(out.fit, d.x_names, sibling(cv_model_out, ".selected.csv"));
            write_trace(out.fit, sibling(cv_model_out, ".trace.csv"));
            st.outputs.insert(st.outputs.end(), {cv_model_out, sibling(cv_model_out, ".selected.csv"),
                                                 sibling(cv_model_out, ".trace.csv")});
        }
        st.output_flags = {"out", "model-out"};
        st.manifest = sibling(cv_out, ".manifest.json");
        st.seed = cv_seed;
        st.has_seed = true;
    } else if (prc->parsed()) {
        Scale scale;
        if (pr_scale == "link") scale = Scale::link;
        else if (pr_scale == "response") scale = Scale::response;
        else throw ArgumentError("--scale must be link or response");
        const SbGamFit m = load_model(pr_model);
        const CsvTable t = read_csv(pr_data);
        const int yc = t.column("y");
        Eigen::MatrixXd x(t.data.rows(), t.data.cols() - (yc >= 0 ? 1 : 0));
        for (Eigen::Index c = 0, k = 0; c < t.data.cols(); ++c)
            if (c != yc) x.col(k++) = t.data.col(c);
        std::size_t clamped = 0;
        const Eigen::VectorXd pred = predict(m, x, scale, &clamped);
        if (clamped > 0) std::cerr << "warning: " << clamped << " covariate values outside the training range were clamped\n";
        write_csv(pr_out, {scale == Scale::link ? "eta" : "mean"}, pred);
        st.outputs.push_back(pr_out);
        st.output_flags = {"out"};
        st.manifest = sibling(pr_out, ".manifest.json");
    } else if (evc->parsed()) {
        const Family f = Family::from_name(ev_family, ev_nb_size, ev_gamma_shape);
        const XyData d = load_xy(ev_data);
        const CsvTable pt = read_csv(ev_pred);
        const int ec = pt.column("eta");
        if (ec < 0) throw DataError("'" + ev_pred + "' has no eta column");
        const Eigen::VectorXd eta = pt.data.col(ec);
        if (eta.size() != d.y.size()) throw DataError("prediction and test files have different row counts");
        std::vector<std::string> header;
        std::vector<double> values;
        if (!ev_eta.empty()) {
            const CsvTable et = read_csv(ev_eta);
            const int tc = et.column("eta_true");
            if (tc < 0) throw DataError("'" + ev_eta + "' has no eta_true column");
            header.push_back("mse");
            values.push_back(mse_f(eta, et.data.col(tc)));
        }
        if (!ev_model.empty() && !ev_support.empty()) {
            const SbGamFit m = load_model(ev_model);
            std::vector<int> truth;
            for (double v : parse_list(ev_support, "--support")) truth.push_back(static_cast<int>(v) - 1);
            header.push_back("mcc");
            values.push_back(mcc(selection_counts(m.selected, truth, m.p())));
        }
        if (f.kind() == FamilyKind::binomial) {
            header.push_back("auc");
            values.push_back(auc(d.y, eta));
        }
        Eigen::VectorXd mean(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) mean[i] = f.link_inv(eta[i]);
        header.push_back("mspe");
        values.push_back(mspe(d.y, mean));
        write_csv(ev_out, header, Eigen::Map<Eigen::RowVectorXd>(values.data(), static_cast<Eigen::Index>(values.size())));
        st.outputs.push_back(ev_out);
        st.output_flags = {"out"};
        st.manifest = sibling(ev_out, ".manifest.json");
    } else if (rpc->parsed()) {
        StudyConfig cfg;
        cfg.scenario = SimScenario::named(rp_scenario);
        if (rp_n > 0) cfg.scenario.n = rp_n;
        if (rp_p > 0) cfg.scenario.p = rp_p;
        cfg.test_size = rp_test;
        cfg.grid = parse_grid(rp_grid);
        cfg.folds = rp_folds;
        if (rp_method == "glasso") cfg.penalty = Penalty::group_lasso;
        else if (rp_method != "sbgam") throw ArgumentError("--method must be sbgam or glasso");
        const auto rows = run_study(cfg, rp_reps, rp_seed, rp_jobs);
        const StudySummary med = median_row(rows);
        const std::string score = score_name(cfg.scenario);
        {
            std::ofstream out(rp_out);
            if (!out) throw DataError("cannot write '" + rp_out + "'");
            out << "replicate,seed,mse,mcc," << score << ",lambda0,n_selected,true_selected,failed\n";
            for (const auto& r : rows)
                out << r.replicate << ',' << r.seed << ',' << format_double(r.mse) << ',' << format_double(r.mcc)
                    << ',' << format_double(r.score) << ',' << format_double(r.lambda0) << ',' << r.n_selected << ','
                    << r.true_selected << ',' << (r.failed ? 1 : 0) << '\n';
            out << "median,," << format_double(med.mse) << ',' << format_double(med.mcc) << ','
                << format_double(med.score) << ',' << format_double(med.lambda0) << ','
                << format_double(med.n_selected) << ',' << format_double(med.true_selected) << ','
                << rp_reps - med.n_ok << '\n';
        }
        const std::string timing = sibling(rp_out, ".timing.csv");
        {
            std::ofstream out(timing);
            out << "replicate,seconds,error\n";
            for (const auto& r : rows) {
                std::string err = r.error;
                for (char& c : err)
                    if (c == ',' || c == '\n') c = ';';
                out << r.replicate << ',' << format_double(r.seconds) << ',' << err << '\n';
            }
        }
        for (const auto& r : rows)
            if (r.failed) std::cerr << "replicate " << r.replicate << " failed: " << r.error << "\n";
        std::cout << rp_scenario << " (" << rp_method << "), " << rp_reps << " replicates: median MSE "
                  << med.mse << ", MCC " << med.mcc << ", " << score << " " << med.score << "\n";
        st.outputs.push_back(rp_out);
        st.output_flags = {"out"};
        st.manifest = sibling(rp_out, ".manifest.json");
        st.seed = rp_seed;
        st.has_seed = true;
    } else if (cuc->parsed()) {
        const SbGamFit m = load_model(cu_model);
        std::vector<int> which;
        if (cu_which == "selected") {
            which = m.selected;
        } else if (cu_which == "all") {
            for (int j = 0; j < m.p(); ++j) which.push_back(j);
        } else {
            for (double v : parse_list(cu_which, "--covariates")) {
                if (v != std::floor(v)) throw ArgumentError("covariate indices must be integers");
                which.push_back(static_cast<int>(v) - 1);
            }
        }
        write_curves(m, which, cu_grid, cu_out);
        st.outputs.push_back(cu_out);
        st.output_flags = {"out"};
        st.manifest = sibling(cu_out, ".manifest.json");
    } else if (psc->parsed()) {
        const auto data = load_prostate(ps_data, ps_labels);
        if (!data) {
            std::cout << "prostate data not found (" << ps_data << ", " << ps_labels << "); skipping\n";
            return 0;
        }
        ProstateConfig cfg;
        cfg.protocol = {ps_train, ps_repeats, ps_seed};
        cfg.grid = parse_grid(ps_grid);
        cfg.folds = ps_folds;
        cfg.jobs = ps_jobs;
        cfg.strict_dims = !ps_relaxed;
        const ProstateReport rep = run_prostate(*data, cfg);
        Eigen::MatrixXd t(static_cast<Eigen::Index>(rep.aucs.size()), 4);
        for (std::size_t r = 0; r < rep.aucs.size(); ++r)
            t.row(static_cast<Eigen::Index>(r)) << static_cast<double>(r + 1), rep.aucs[r], rep.lambda0s[r],
                rep.n_selected[r];
        write_csv(ps_out, {"repeat", "auc", "lambda0", "n_selected"}, t);
        const std::string model = sibling(ps_out, ".model.json");
        save_model(rep.full_fit, model);
        write_selected(rep.full_fit, data->genes, sibling(ps_out, ".selected.csv"));
        write_curves(rep.full_fit, rep.full_fit.selected, 100, sibling(ps_out, ".curves.csv"));
        std::cout << "full data: selected " << rep.full_fit.selected.size() << " of " << rep.full_fit.p()
                  << " genes (published analysis: 21) at lambda0 " << rep.full_cv.chosen_lambda0 << "\n";
        std::cout << "mean test AUC over " << rep.aucs.size() << " splits: " << rep.mean_auc
                  << " (published: 0.89)\n";
        st.outputs = {ps_out, model, sibling(ps_out, ".selected.csv"), sibling(ps_out, ".curves.csv")};
        st.output_flags = {"out"};
        st.manifest = sibling(ps_out, ".manifest.json");
        st.seed = ps_seed;
        st.has_seed = true;
    } else if (rlc->parsed()) {
        return cmd_replay(rl_manifest, rl_check);
    }

    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_manifest(used, st, secs);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        return run(args);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}
