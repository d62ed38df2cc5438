// Command-line front end: Monte Carlo study and estimation from CSV files.
//
// Exit codes: 0 success, 1 estimation failure, 2 input/schema error,
// 3 non-convergence abort.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "nonprob/csv_io.hpp"
#include "nonprob/errors.hpp"
#include "nonprob/estimate.hpp"
#include "nonprob/simgen.hpp"
#include "nonprob/simulation.hpp"

namespace {

constexpr int kOk = 0;
constexpr int kEstimationFailure = 1;
constexpr int kInputError = 2;
constexpr int kNotConverged = 3;

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Finite-population mean estimation with a non-probability sample and a reference probability sample"};
    app.require_subcommand(1);

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo study on a simulated population");
    std::string scenario = "TT";
    nonprob::SimulationOptions sim_opts;
    std::int64_t n_a = 500, n_b = 1000, pop_size = 20000;
    std::uint64_t seed = 1;
    std::string sim_out;
    std::string dump_dir;
    std::string sim_estimators;
    std::string sim_variances;
    unsigned threads = 0;
    sim->add_option("--scenario", scenario, "TT, FT or TF")->check(CLI::IsMember({"TT", "FT", "TF"}));
    sim->add_option("--rho", sim_opts.spec.rho, "correlation between y and the linear predictor")->required();
    sim->add_option("--n-a", n_a, "expected size of sample A")->required();
    sim->add_option("--n-b", n_b, "expected size of sample B")->required();
    sim->add_option("--reps", sim_opts.replicates, "number of replicates")->required();
    sim->add_option("--seed", seed, "base seed")->required();
    sim->add_option("--pop-size", pop_size, "population size N");
    sim->add_flag("--regen-population", sim_opts.regenerate_population, "draw a fresh population per replicate");
    sim->add_option("--estimators", sim_estimators, "comma list of point estimators (default: naive,c1,c2,ipw1,ipw2,reg,dr2)");
    sim->add_option("--variances", sim_variances, "comma list of v_ipw1,v_ipw2,v_plug,v_kh or 'none'");
    sim->add_option("--threads", threads, "worker cap (overrides NONPROB_THREADS)");
    sim->add_option("--out", sim_out, "output directory")->required();
    sim->add_option("--dump-samples", dump_dir, "also write the first replicate's samples as sample_a.csv / sample_b.csv");

    // estimate
    auto* est = app.add_subcommand("estimate", "Estimate a population mean from two CSV samples");
    std::string path_a, path_b, prop_x, out_x, match_x, est_list = "ipw2,dr2", variance = "plugin", est_out;
    std::string design = "unspecified", link = "linear";
    nonprob::EstimateConfig cfg;
    double est_pop = 0.0;
    est->add_option("--sample-a", path_a, "CSV for the non-probability sample")->required();
    est->add_option("--sample-b", path_b, "CSV for the probability sample")->required();
    est->add_option("--y", cfg.y, "response column in sample A")->required();
    est->add_option("--prop-x", prop_x, "comma list of propensity covariates (empty for intercept only)")->required();
    est->add_option("--out-x", out_x, "comma list of outcome covariates")->required();
    est->add_option("--match-x", match_x, "comma list of matching covariates for sm (default: outcome covariates)");
    est->add_option("--weight", cfg.weight, "design weight column in sample B");
    auto* pop_opt = est->add_option("--pop-size", est_pop, "population size N");
    est->add_option("--estimators", est_list, "comma list of naive,c1,c2,ipw1,ipw2,reg,sm,dr1,dr2,kh");
    est->add_option("--variance", variance, "comma list of plugin, kh or none");
    est->add_option("--design", design, "sample B design for variance estimation")
        ->check(CLI::IsMember({"poisson", "srs", "unspecified"}));
    est->add_option("--outcome-link", link, "outcome model link")->check(CLI::IsMember({"linear", "logistic"}));
    est->add_flag("--standardize-match", cfg.matching.standardize, "scale matching columns by their pooled sd");
    est->add_option("--out", est_out, "JSON report path (stdout when omitted)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kInputError;
    }

    try {
        if (*sim) {
            sim_opts.spec.scenario = nonprob::parse_scenario(scenario);
            sim_opts.spec.n_a = n_a;
            sim_opts.spec.n_b = n_b;
            sim_opts.spec.population_size = pop_size;
            sim_opts.spec.seed = seed;
            sim_opts.threads = threads;
            if (!sim_estimators.empty()) {
                sim_opts.estimators.clear();
                for (const auto& s : split_list(sim_estimators)) {
                    auto m = nonprob::parse_method(s);
                    if (!m) throw nonprob::UsageError("unknown estimator '" + s + "'");
                    sim_opts.estimators.push_back(*m);
                }
            }
            if (!sim_variances.empty()) {
                sim_opts.variances.clear();
                if (sim_variances != "none") {
                    for (const auto& s : split_list(sim_variances)) {
                        auto v = nonprob::parse_variance_estimator(s);
                        if (!v) throw nonprob::UsageError("unknown variance estimator '" + s + "'");
                        sim_opts.variances.push_back(*v);
                    }
                }
            }
            if (!dump_dir.empty()) {
                const auto pair = nonprob::build_samples(sim_opts.spec);
                std::filesystem::create_directories(dump_dir);
                nonprob::write_sample_a_csv(std::filesystem::path(dump_dir) / "sample_a.csv", pair.a);
                nonprob::write_sample_b_csv(std::filesystem::path(dump_dir) / "sample_b.csv", pair.b);
            }
            const auto result = nonprob::run_simulation(sim_opts);
            nonprob::write_simulation_outputs(result, sim_out);
            if (result.failures > 0) {
                std::cerr << result.failures << " of " << result.replicates << " replicates failed and were skipped\n";
            }
            return kOk;
        }

        cfg.propensity_columns = split_list(prop_x);
        cfg.outcome_columns = split_list(out_x);
        cfg.match_columns = split_list(match_x);
        if (pop_opt->count() > 0) cfg.population_size = est_pop;
        cfg.estimators.clear();
        for (const auto& s : split_list(est_list)) {
            auto m = nonprob::parse_method(s);
            if (!m) throw nonprob::UsageError("unknown estimator '" + s + "'");
            cfg.estimators.push_back(*m);
        }
        cfg.plugin_variance = false;
        cfg.kh_variance = false;
        for (const auto& v : split_list(variance)) {
            if (v == "plugin") cfg.plugin_variance = true;
            else if (v == "kh") cfg.kh_variance = true;
            else if (v != "none") throw nonprob::UsageError("unknown variance choice '" + v + "'");
        }
        cfg.outcome_link = link == "logistic" ? nonprob::Link::Logistic : nonprob::Link::Linear;
        cfg.design = design == "poisson" ? nonprob::DesignKind::Poisson
                     : design == "srs"   ? nonprob::DesignKind::SRS
                                         : nonprob::DesignKind::Unspecified;

        const auto reports = nonprob::run_estimate(path_a, path_b, cfg);
        const std::string json = nonprob::reports_json(reports);
        if (est_out.empty()) {
            std::cout << json;
        } else {
            std::ofstream f(est_out, std::ios::binary);
            if (!f) throw nonprob::UsageError("cannot write " + est_out);
            f << json;
        }
        return kOk;
    } catch (const nonprob::SchemaError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const nonprob::UsageError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const nonprob::NotConvergedError& e) {
        std::cerr << "not converged: " << e.what() << '\n';
        return kNotConverged;
    } catch (const nonprob::SimulationAborted& e) {
        std::cerr << "aborted: " << e.what() << '\n';
        return kNotConverged;
    } catch (const nonprob::DimensionError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kInputError;
    } catch (const nonprob::Error& e) {
        std::cerr << "estimation failed: " << e.what() << '\n';
        return kEstimationFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kEstimationFailure;
    }
}
