#include "nonprob/estimate.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

#include "nonprob/csv_io.hpp"
#include "nonprob/errors.hpp"
#include "nonprob/outcome.hpp"
#include "nonprob/variance.hpp"

namespace nonprob {

ColumnList EstimateConfig::all_columns() const {
    ColumnList out;
    for (const ColumnList* list : {&propensity_columns, &outcome_columns, &match_columns}) {
        for (const auto& c : *list) {
            if (std::find(out.begin(), out.end(), c) == out.end()) out.push_back(c);
        }
    }
    return out;
}

namespace {

bool needs_population_size(Method m) {
    return m == Method::IPW1 || m == Method::DR1 || m == Method::KH || m == Method::C1;
}

}  // namespace

std::vector<EstimateReport> run_estimate(const NonProbSample& a, const ProbSample& b, const EstimateConfig& cfg) {
    if (cfg.estimators.empty()) throw UsageError("no estimators requested");
    for (Method m : cfg.estimators) {
        if (needs_population_size(m) && !cfg.population_size) {
            throw UsageError("estimator " + std::string(to_string(m)) + " requires the population size (--pop-size)");
        }
    }
    const double n_pop = cfg.population_size.value_or(0.0);
    const auto plan = DesignVariancePlan::for_sample(b);

    std::optional<PropensityFit> pf;
    std::optional<OutcomeFit> of;
    std::optional<PropensityFit> pooled;
    auto prop = [&]() -> const PropensityFit& {
        if (!pf) pf = fit_propensity(a, b, cfg.propensity_columns, cfg.newton);
        return *pf;
    };
    auto outcome = [&]() -> const OutcomeFit& {
        if (!of) of = fit_outcome(a, cfg.outcome_columns, cfg.outcome_link, cfg.newton);
        return *of;
    };
    auto naive_pooled = [&]() -> const PropensityFit& {
        if (!pooled) pooled = fit_naive_pooled(a, b, cfg.propensity_columns, cfg.newton);
        return *pooled;
    };

    std::vector<EstimateReport> reports;
    for (Method m : cfg.estimators) {
        EstimateReport r;
        r.method = m;
        r.n_a = a.size();
        r.n_b = b.size();
        switch (m) {
            case Method::Naive:
                r.point = mu_naive(a);
                break;
            case Method::C1:
                r.point = mu_ipw1(a, naive_pooled().pi_A_hat, n_pop);
                break;
            case Method::C2:
                r.point = mu_ipw2(a, naive_pooled().pi_A_hat);
                break;
            case Method::IPW1:
                r.point = mu_ipw1(a, prop().pi_A_hat, n_pop);
                if (cfg.plugin_variance) r.variance = var_ipw1_plugin(a, b, prop(), r.point, n_pop, plan);
                break;
            case Method::IPW2:
                r.point = mu_ipw2(a, prop().pi_A_hat);
                if (cfg.plugin_variance) r.variance = var_ipw2_plugin(a, b, prop(), r.point, plan);
                break;
            case Method::REG:
                r.point = mu_reg(b, outcome());
                break;
            case Method::SM:
                r.point = mu_sm_nn(a, b, cfg.match_columns.empty() ? cfg.outcome_columns : cfg.match_columns,
                                   cfg.matching);
                break;
            case Method::DR1:
                r.point = mu_dr1(a, b, prop().pi_A_hat, outcome(), n_pop);
                break;
            case Method::DR2:
                r.point = mu_dr2(a, b, prop().pi_A_hat, outcome());
                if (cfg.plugin_variance) r.variance = var_dr2_plugin(a, b, prop(), outcome(), plan);
                break;
            case Method::KH: {
                const KhFit kh = fit_kh_joint(a, b, n_pop, cfg.propensity_columns, cfg.outcome_columns,
                                              cfg.outcome_link, cfg.newton);
                r.point = mu_kh(a, b, kh, n_pop);
                if (cfg.kh_variance) r.variance = var_kh(a, b, kh, n_pop, std::nullopt, plan).value;
                break;
            }
        }
        if (r.variance) {
            const auto [lo, hi] = confidence_interval(r.point, *r.variance, cfg.level);
            r.ci_lower = lo;
            r.ci_upper = hi;
        }
        reports.push_back(r);
    }
    return reports;
}

std::vector<EstimateReport> run_estimate(const std::filesystem::path& sample_a, const std::filesystem::path& sample_b,
                                         const EstimateConfig& cfg) {
    const ColumnList cols = cfg.all_columns();
    const NonProbSample a = load_sample_a(read_csv(sample_a), cfg.y, cols);
    const ProbSample b = load_sample_b(read_csv(sample_b), cols, cfg.weight, Design{cfg.design, std::nullopt});
    return run_estimate(a, b, cfg);
}

std::string reports_json(const std::vector<EstimateReport>& reports) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) {
        nlohmann::ordered_json j;
        j["method"] = std::string(to_string(r.method));
        j["point"] = r.point;
        j["variance"] = r.variance ? nlohmann::ordered_json(*r.variance) : nlohmann::ordered_json(nullptr);
        j["se"] = r.variance ? nlohmann::ordered_json(std::sqrt(*r.variance)) : nlohmann::ordered_json(nullptr);
        j["ci_lower"] = r.ci_lower ? nlohmann::ordered_json(*r.ci_lower) : nlohmann::ordered_json(nullptr);
        j["ci_upper"] = r.ci_upper ? nlohmann::ordered_json(*r.ci_upper) : nlohmann::ordered_json(nullptr);
        j["n_a"] = r.n_a;
        j["n_b"] = r.n_b;
        arr.push_back(std::move(j));
    }
    nlohmann::ordered_json doc;
    doc["reports"] = std::move(arr);
    return doc.dump(2) + "\n";
}

}  // namespace nonprob
