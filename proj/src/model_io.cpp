#include "ssgl_gam/model_io.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

#include "ssgl_gam/errors.hpp"

namespace ssgl_gam {

using nlohmann::json;

namespace {

json vec(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd to_vec(const json& a) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size()));
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

Family family_from(const json& j) {
    const auto name = j.at("name").get<std::string>();
    if (name == "gaussian") return Family::gaussian(j.at("dispersion").get<double>());
    if (name == "negbinomial") return Family::negbinomial(j.at("shape").get<double>());
    if (name == "gamma") return Family::gamma(j.at("shape").get<double>());
    return Family::from_name(name);
}

}  // namespace

std::string model_to_json(const SbGamFit& fit) {
    json j;
    j["format_version"] = kModelFormatVersion;
    j["family"] = {{"name", fit.family.name()}, {"dispersion", fit.family.dispersion()}, {"shape", fit.family.shape()}};
    j["hyper"] = {{"lambda0", fit.hyper.lambda0}, {"lambda1", fit.hyper.lambda1}, {"a", fit.hyper.a},
                  {"b", fit.hyper.b}, {"d", fit.hyper.d}};
    j["basis"] = {{"df", fit.spec.df}, {"degree", fit.spec.degree}, {"knot_quantiles", fit.spec.knot_quantiles}};
    j["orthonormalized"] = fit.orthonormalized;
    json covs = json::array();
    for (const auto& c : fit.covariates)
        covs.push_back({{"lo", c.range.lo}, {"hi", c.range.hi}, {"interior_knots", c.interior_knots},
                        {"column_means", vec(c.column_means)}});
    j["covariates"] = std::move(covs);
    j["intercept"] = fit.intercept;
    json beta = json::array();
    json beta_solver = json::array();
    for (int k = 0; k < fit.p(); ++k) {
        beta.push_back(vec(fit.beta[static_cast<std::size_t>(k)]));
        beta_solver.push_back(vec(fit.beta_solver[static_cast<std::size_t>(k)]));
    }
    j["beta"] = std::move(beta);
    j["beta_solver"] = std::move(beta_solver);
    j["kappa"] = fit.kappa;
    j["pstar"] = vec(fit.pstars);
    j["omega"] = fit.omega;
    j["selected"] = fit.selected;
    j["em_iterations"] = fit.em_iterations;
    j["step_halvings"] = fit.step_halvings;
    j["converged"] = fit.converged;
    return j.dump(1);
}

SbGamFit model_from_json(const std::string& text, const std::string& source) {
    try {
        const json j = json::parse(text);
        const int version = j.at("format_version").get<int>();
        if (version != kModelFormatVersion) {
            std::ostringstream os;
            os << source << ": unsupported model format_version " << version;
            throw DataError(os.str());
        }
        SbGamFit m;
        m.family = family_from(j.at("family"));
        const auto& h = j.at("hyper");
        m.hyper.lambda0 = h.at("lambda0").get<double>();
        m.hyper.lambda1 = h.at("lambda1").get<double>();
        m.hyper.a = h.at("a").get<double>();
        m.hyper.b = h.at("b").get<double>();
        m.hyper.d = h.at("d").get<int>();
        const auto& b = j.at("basis");
        m.spec.df = b.at("df").get<int>();
        m.spec.degree = b.at("degree").get<int>();
        m.spec.knot_quantiles = b.at("knot_quantiles").get<std::vector<double>>();
        m.spec.validate();
        m.orthonormalized = j.at("orthonormalized").get<bool>();
        for (const auto& c : j.at("covariates")) {
            CovariateBasis cb;
            cb.range = {c.at("lo").get<double>(), c.at("hi").get<double>()};
            cb.interior_knots = c.at("interior_knots").get<std::vector<double>>();
            cb.column_means = to_vec(c.at("column_means"));
            if (cb.column_means.size() != m.spec.df) throw DataError(source + ": column_means has the wrong length");
            m.covariates.push_back(std::move(cb));
        }
        m.intercept = j.at("intercept").get<double>();
        for (const auto& g : j.at("beta")) m.beta.push_back(to_vec(g));
        for (const auto& g : j.at("beta_solver")) m.beta_solver.push_back(to_vec(g));
        if (m.beta.size() != m.covariates.size() || m.beta_solver.size() != m.covariates.size())
            throw DataError(source + ": coefficient groups do not match the covariates");
        for (std::size_t k = 0; k < m.beta.size(); ++k)
            if (m.beta[k].size() != m.spec.df || m.beta_solver[k].size() != m.spec.df)
                throw DataError(source + ": coefficient group has the wrong size");
        m.kappa = j.at("kappa").get<double>();
        m.pstars = to_vec(j.at("pstar"));
        m.omega = j.at("omega").get<double>();
        m.selected = j.at("selected").get<std::vector<int>>();
        m.em_iterations = j.at("em_iterations").get<int>();
        m.step_halvings = j.at("step_halvings").get<int>();
        m.converged = j.at("converged").get<bool>();
        return m;
    } catch (const json::exception& e) {
        throw DataError(source + ": malformed model file: " + e.what());
    } catch (const ArgumentError& e) {
        throw DataError(source + ": invalid model file: " + e.what());
    }
}

void save_model(const SbGamFit& fit, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw DataError("cannot write '" + path + "'");
    out << model_to_json(fit) << '\n';
    if (!out) throw DataError("error while writing '" + path + "'");
}

SbGamFit load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open model file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return model_from_json(ss.str(), path);
}

}  // namespace ssgl_gam
