#include "nonprob/simulation.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include <fmt/format.h>
#include <json.hpp>

#include "nonprob/errors.hpp"
#include "nonprob/estimators.hpp"
#include "nonprob/metrics.hpp"
#include "nonprob/outcome.hpp"
#include "nonprob/propensity.hpp"
#include "nonprob/variance.hpp"

namespace nonprob {

std::string_view to_string(VarianceEstimator v) {
    switch (v) {
        case VarianceEstimator::IPW1: return "v_ipw1";
        case VarianceEstimator::IPW2: return "v_ipw2";
        case VarianceEstimator::PLUG: return "v_plug";
        case VarianceEstimator::KH: return "v_kh";
    }
    return "?";
}

std::optional<VarianceEstimator> parse_variance_estimator(std::string_view s) {
    for (auto v : {VarianceEstimator::IPW1, VarianceEstimator::IPW2, VarianceEstimator::PLUG, VarianceEstimator::KH}) {
        if (s == to_string(v) || s == to_string(v).substr(2)) return v;
    }
    return std::nullopt;
}

unsigned default_worker_count() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("NONPROB_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<unsigned>(std::min<long>(v, 256));
    }
    return hw;
}

namespace {

constexpr std::size_t kMethods = 10;
constexpr std::size_t kVariances = 4;
constexpr std::uint64_t kPopulationRegenTag = 0xA5A5A5A5A5A5A5A5ULL;

Method paired_method(VarianceEstimator v) {
    switch (v) {
        case VarianceEstimator::IPW1: return Method::IPW1;
        case VarianceEstimator::IPW2: return Method::IPW2;
        case VarianceEstimator::PLUG: return Method::DR2;
        case VarianceEstimator::KH: return Method::KH;
    }
    return Method::DR2;
}

struct Replicate {
    bool ok = false;
    double mu = 0.0;
    std::array<double, kMethods> point{};
    std::array<double, kVariances> variance{};
};

struct Needs {
    std::array<bool, kMethods> point{};
    std::array<bool, kVariances> variance{};
};

std::size_t idx(Method m) { return static_cast<std::size_t>(m); }
std::size_t idx(VarianceEstimator v) { return static_cast<std::size_t>(v); }

Replicate run_replicate(const SimPopulation& pop, Scenario scenario, SplitMix64 rng, double n_pop,
                        const Needs& needs) {
    Replicate out;
    out.mu = pop.mu_y;
    out.point.fill(std::numeric_limits<double>::quiet_NaN());
    out.variance.fill(std::numeric_limits<double>::quiet_NaN());

    const SampledPair s = build_samples(pop, scenario, rng);
    const auto& a = s.a;
    const auto& b = s.b;
    const auto& cols = s.columns;
    auto need = [&](Method m) { return needs.point[idx(m)]; };
    auto need_v = [&](VarianceEstimator v) { return needs.variance[idx(v)]; };

    if (need(Method::Naive)) out.point[idx(Method::Naive)] = mu_naive(a);
    if (need(Method::C1) || need(Method::C2)) {
        const Vector pt = fit_naive_pooled(a, b, cols.propensity).pi_A_hat;
        if (need(Method::C1)) out.point[idx(Method::C1)] = mu_ipw1(a, pt, n_pop);
        if (need(Method::C2)) out.point[idx(Method::C2)] = mu_ipw2(a, pt);
    }
    if (need(Method::SM)) out.point[idx(Method::SM)] = mu_sm_nn(a, b, cols.outcome);

    const bool want_prop = need(Method::IPW1) || need(Method::IPW2) || need(Method::DR1) || need(Method::DR2);
    const bool want_out = need(Method::REG) || need(Method::DR1) || need(Method::DR2);
    std::optional<PropensityFit> pf;
    std::optional<OutcomeFit> of;
    if (want_prop) pf = fit_propensity(a, b, cols.propensity);
    if (want_out) of = fit_linear(a, cols.outcome);

    if (need(Method::IPW1)) out.point[idx(Method::IPW1)] = mu_ipw1(a, pf->pi_A_hat, n_pop);
    if (need(Method::IPW2)) out.point[idx(Method::IPW2)] = mu_ipw2(a, pf->pi_A_hat);
    if (need(Method::REG)) out.point[idx(Method::REG)] = mu_reg(b, *of);
    if (need(Method::DR1)) out.point[idx(Method::DR1)] = mu_dr1(a, b, pf->pi_A_hat, *of, n_pop);
    if (need(Method::DR2)) out.point[idx(Method::DR2)] = mu_dr2(a, b, pf->pi_A_hat, *of);

    std::optional<KhFit> kh;
    if (need(Method::KH)) {
        kh = fit_kh_joint(a, b, n_pop, cols.propensity, cols.outcome, Link::Linear);
        out.point[idx(Method::KH)] = mu_kh(a, b, *kh, n_pop);
    }

    const auto plan = DesignVariancePlan::for_sample(b);
    if (need_v(VarianceEstimator::IPW1)) {
        out.variance[idx(VarianceEstimator::IPW1)] =
            var_ipw1_plugin(a, b, *pf, out.point[idx(Method::IPW1)], n_pop, plan);
    }
    if (need_v(VarianceEstimator::IPW2)) {
        out.variance[idx(VarianceEstimator::IPW2)] = var_ipw2_plugin(a, b, *pf, out.point[idx(Method::IPW2)], plan);
    }
    if (need_v(VarianceEstimator::PLUG)) {
        out.variance[idx(VarianceEstimator::PLUG)] = var_dr2_plugin(a, b, *pf, *of, plan);
    }
    if (need_v(VarianceEstimator::KH)) {
        out.variance[idx(VarianceEstimator::KH)] = var_kh(a, b, *kh, n_pop, std::nullopt, plan).value;
    }
    out.ok = true;
    return out;
}

std::vector<Replicate> run_pass(const SimulationOptions& opts, const SimPopulation* fixed_pop, std::uint64_t seed,
                                const Needs& needs) {
    const int reps = opts.replicates;
    std::vector<Replicate> results(static_cast<std::size_t>(reps));
    std::atomic<int> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;
    const double n_pop = static_cast<double>(opts.spec.population_size);

    auto worker = [&] {
        for (int r = next++; r < reps; r = next++) {
            try {
                std::optional<SimPopulation> own;
                const SimPopulation* pop = fixed_pop;
                if (!pop) {
                    ScenarioSpec s = opts.spec;
                    s.seed = SplitMix64::mix(seed ^ kPopulationRegenTag ^ static_cast<std::uint64_t>(r));
                    own = gen_population(s);
                    pop = &*own;
                }
                results[static_cast<std::size_t>(r)] =
                    run_replicate(*pop, opts.spec.scenario, SplitMix64::stream(seed, static_cast<std::uint64_t>(r)),
                                  n_pop, needs);
            } catch (const Error&) {
                results[static_cast<std::size_t>(r)].ok = false;
            } catch (...) {
                std::lock_guard lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
            }
        }
    };

    unsigned workers = opts.threads ? opts.threads : default_worker_count();
    workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(reps)));
    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (fatal) std::rethrow_exception(fatal);
    return results;
}

int count_failures(const std::vector<Replicate>& reps) {
    return static_cast<int>(std::count_if(reps.begin(), reps.end(), [](const Replicate& r) { return !r.ok; }));
}

void check_failures(int failures, int total, double max_rate, const char* pass) {
    if (static_cast<double>(failures) > max_rate * static_cast<double>(total)) {
        throw SimulationAborted(fmt::format("{} pass: {} of {} replicates failed (limit {:.1f}%)", pass, failures,
                                            total, 100.0 * max_rate));
    }
}

}  // namespace

SimulationResult run_simulation(const SimulationOptions& opts) {
    opts.spec.validate();
    if (opts.replicates < 2) throw DomainError("run_simulation: at least 2 replicates required");

    Needs main_needs;
    for (Method m : opts.estimators) main_needs.point[idx(m)] = true;
    Needs ref_needs;
    for (VarianceEstimator v : opts.variances) {
        main_needs.variance[idx(v)] = true;
        main_needs.point[idx(paired_method(v))] = true;
        ref_needs.point[idx(paired_method(v))] = true;
    }

    std::optional<SimPopulation> pop;
    if (!opts.regenerate_population) pop = gen_population(opts.spec);
    const SimPopulation* fixed = pop ? &*pop : nullptr;

    SimulationResult result;
    result.spec = opts.spec;
    result.replicates = opts.replicates;
    result.mu_y = pop ? pop->mu_y : std::numeric_limits<double>::quiet_NaN();

    const auto main = run_pass(opts, fixed, opts.spec.seed, main_needs);
    result.failures = count_failures(main);
    check_failures(result.failures, opts.replicates, opts.max_failure_rate, "main");

    std::vector<const Replicate*> ok;
    for (const auto& r : main) {
        if (r.ok) ok.push_back(&r);
    }
    const auto n_ok = static_cast<Eigen::Index>(ok.size());

    // Relative errors (est - mu) / mu; with a fixed population mu is the same in every replicate.
    auto collect = [&](const std::vector<const Replicate*>& rs, Method m, Vector& err, Vector& mu) {
        err.resize(static_cast<Eigen::Index>(rs.size()));
        mu.resize(err.size());
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            err(i) = rs[static_cast<std::size_t>(i)]->point[idx(m)] - rs[static_cast<std::size_t>(i)]->mu;
            mu(i) = rs[static_cast<std::size_t>(i)]->mu;
        }
    };

    for (Method m : opts.estimators) {
        Vector err, mu;
        collect(ok, m, err, mu);
        EstimatorSummary s{m};
        s.rb_pct = 100.0 * err.cwiseQuotient(mu).mean();
        s.mse = err.squaredNorm() / static_cast<double>(n_ok);
        result.estimators.push_back(s);
    }

    if (!opts.variances.empty()) {
        const auto ref = run_pass(opts, fixed, opts.spec.seed + kReferencePassSeedOffset, ref_needs);
        result.reference_failures = count_failures(ref);
        check_failures(result.reference_failures, opts.replicates, opts.max_failure_rate, "reference");
        std::vector<const Replicate*> ref_ok;
        for (const auto& r : ref) {
            if (r.ok) ref_ok.push_back(&r);
        }
        const double z = normal_quantile_two_sided(0.95);
        for (VarianceEstimator v : opts.variances) {
            const Method m = paired_method(v);
            Vector ref_err, ref_mu;
            collect(ref_ok, m, ref_err, ref_mu);
            VarianceSummary s{v};
            s.reference_variance = empirical_variance(ref_err);
            Vector est(n_ok);
            int covered = 0;
            for (Eigen::Index i = 0; i < n_ok; ++i) {
                const Replicate& r = *ok[static_cast<std::size_t>(i)];
                est(i) = r.variance[idx(v)];
                const double half = z * std::sqrt(est(i));
                if (r.point[idx(m)] - half <= r.mu && r.mu <= r.point[idx(m)] + half) ++covered;
            }
            s.mean_estimate = est.mean();
            s.rb_pct = metric_var_rb(est, s.reference_variance);
            s.cp_pct = 100.0 * covered / static_cast<double>(n_ok);
            result.variances.push_back(s);
        }
    }
    return result;
}

std::string point_table_csv(const SimulationResult& r) {
    std::string out(kPointTableHeader);
    out += '\n';
    for (const auto& e : r.estimators) {
        out += fmt::format("{},{:g},{},{},{},{:.6f},{:.6f}\n", to_string(r.spec.scenario), r.spec.rho, r.spec.n_a,
                           r.spec.n_b, to_string(e.method), e.rb_pct, e.mse);
    }
    return out;
}

std::string variance_table_csv(const SimulationResult& r) {
    std::string out(kVarianceTableHeader);
    out += '\n';
    for (const auto& v : r.variances) {
        out += fmt::format("{},{:g},{},{},{},{:.6f},{:.6f}\n", to_string(r.spec.scenario), r.spec.rho, r.spec.n_a,
                           r.spec.n_b, to_string(v.estimator), v.rb_pct, v.cp_pct);
    }
    return out;
}

std::string summary_json(const SimulationResult& r) {
    nlohmann::ordered_json j;
    j["spec"] = {{"scenario", std::string(to_string(r.spec.scenario))},
                 {"rho", r.spec.rho},
                 {"n_a", r.spec.n_a},
                 {"n_b", r.spec.n_b},
                 {"population_size", r.spec.population_size},
                 {"seed", r.spec.seed}};
    j["replicates"] = r.replicates;
    j["failures"] = r.failures;
    j["reference_failures"] = r.reference_failures;
    if (std::isfinite(r.mu_y)) j["mu_y"] = r.mu_y;
    j["estimators"] = nlohmann::ordered_json::array();
    for (const auto& e : r.estimators) {
        j["estimators"].push_back({{"estimator", std::string(to_string(e.method))}, {"rb_pct", e.rb_pct}, {"mse", e.mse}});
    }
    j["variance_estimators"] = nlohmann::ordered_json::array();
    for (const auto& v : r.variances) {
        j["variance_estimators"].push_back({{"variance_estimator", std::string(to_string(v.estimator))},
                                            {"rb_pct", v.rb_pct},
                                            {"cp_pct", v.cp_pct},
                                            {"reference_variance", v.reference_variance},
                                            {"mean_estimate", v.mean_estimate}});
    }
    return j.dump(2) + "\n";
}

void write_simulation_outputs(const SimulationResult& r, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    auto write = [&](const char* name, const std::string& body) {
        std::ofstream f(dir / name, std::ios::binary);
        if (!f) throw Error("cannot write " + (dir / name).string());
        f << body;
    };
    write("point_estimators.csv", point_table_csv(r));
    write("variance_estimators.csv", variance_table_csv(r));
    write("summary.json", summary_json(r));
}

}  // namespace nonprob
