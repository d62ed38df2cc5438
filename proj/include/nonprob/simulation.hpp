#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nonprob/simgen.hpp"
#include "nonprob/types.hpp"

namespace nonprob {

/// Variance estimators and the point estimator each one accompanies.
enum class VarianceEstimator {
    IPW1,  // with IPW1
    IPW2,  // with IPW2
    PLUG,  // plug-in, with DR2
    KH,    // doubly robust, with KH
};

std::string_view to_string(VarianceEstimator v);
std::optional<VarianceEstimator> parse_variance_estimator(std::string_view s);

struct SimulationOptions {
    ScenarioSpec spec;
    int replicates = 1000;
    std::vector<Method> estimators{Method::Naive, Method::C1,  Method::C2, Method::IPW1,
                                   Method::IPW2,  Method::REG, Method::DR2};
    std::vector<VarianceEstimator> variances{VarianceEstimator::IPW1, VarianceEstimator::IPW2,
                                             VarianceEstimator::PLUG, VarianceEstimator::KH};
    // Draw a fresh population for every replicate instead of resampling one.
    bool regenerate_population = false;
    // Worker cap; 0 means NONPROB_THREADS or the hardware concurrency.
    unsigned threads = 0;
    double max_failure_rate = 0.01;
};

struct EstimatorSummary {
    Method method;
    double rb_pct = 0.0;
    double mse = 0.0;
};

struct VarianceSummary {
    VarianceEstimator estimator;
    double rb_pct = 0.0;
    double cp_pct = 0.0;
    // Monte Carlo variance of the paired point estimator from the independent reference pass.
    double reference_variance = 0.0;
    double mean_estimate = 0.0;
};

struct SimulationResult {
    ScenarioSpec spec;
    int replicates = 0;
    int failures = 0;
    int reference_failures = 0;
    double mu_y = 0.0;
    std::vector<EstimatorSummary> estimators;
    std::vector<VarianceSummary> variances;
};

/// Seed offset of the reference pass that estimates the true variance of each
/// point estimator.
inline constexpr std::uint64_t kReferencePassSeedOffset = 0x5DEECE66DULL;

/// Monte Carlo study: one population (unless regenerating), `replicates`
/// independent sample pairs, metrics aggregated in replicate order so the
/// result does not depend on the worker count. Variance metrics use a second,
/// independently seeded pass to obtain the reference variance.
///
/// Throws SimulationAborted when more than `max_failure_rate` of the
/// replicates in either pass fail.
SimulationResult run_simulation(const SimulationOptions& opts);

inline constexpr std::string_view kPointTableHeader = "scenario,rho,n_a,n_b,estimator,rb_pct,mse";
inline constexpr std::string_view kVarianceTableHeader = "scenario,rho,n_a,n_b,variance_estimator,rb_pct,cp_pct";

std::string point_table_csv(const SimulationResult& r);
std::string variance_table_csv(const SimulationResult& r);
std::string summary_json(const SimulationResult& r);

/// Writes point_estimators.csv, variance_estimators.csv and summary.json into `dir`.
void write_simulation_outputs(const SimulationResult& r, const std::filesystem::path& dir);

/// Worker count from NONPROB_THREADS (if set) capped by the hardware concurrency.
unsigned default_worker_count();

}  // namespace nonprob
