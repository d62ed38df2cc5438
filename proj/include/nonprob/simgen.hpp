#pragma once

#include <cstdint>
#include <string_view>

#include <Eigen/Dense>

#include "nonprob/rng.hpp"
#include "nonprob/types.hpp"

namespace nonprob {

/// Working-model pattern: (outcome, propensity) correct (T) or false (F).
enum class Scenario { TT, FT, TF };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view s);

struct ScenarioSpec {
    double rho = 0.5;
    Eigen::Index n_a = 500;
    Eigen::Index n_b = 1000;
    Scenario scenario = Scenario::TT;
    Eigen::Index population_size = 20000;
    std::uint64_t seed = 1;

    void validate() const;
};

/// Simulated population with the quantities the samplers need.
struct SimPopulation {
    FinitePopulation frame;  // columns x1..x4
    Vector eta;              // 2 + x1 + x2 + x3 + x4
    double sigma = 0.0;
    double theta0 = 0.0;
    Vector pi_a;             // true participation probabilities
    double c = 0.0;
    Vector pi_b;             // sample B inclusion probabilities
    double mu_y = 0.0;
};

/// Population of `spec.population_size` units from the x1..x4 recursions with
/// noise scaled so corr(y, eta) hits `spec.rho` on the realized eta. Also
/// solves theta0 and c and attaches both inclusion probability vectors.
SimPopulation gen_population(const ScenarioSpec& spec);

/// Draws only the frame (x1..x4, y) plus eta and sigma.
SimPopulation gen_frame(const ScenarioSpec& spec, SplitMix64& rng);

/// Intercept with sum_i logistic(theta0 + slopes'x_i) = n_a, by bisection on [-50, 50].
double solve_theta0(const FinitePopulation& pop, Eigen::Index n_a);

/// c such that max(c + w) / min(c + w) = ratio for w = x3 + 0.03 y.
double solve_c(const FinitePopulation& pop, double ratio = 50.0);
double solve_c(const Eigen::Ref<const Vector>& w, double ratio = 50.0);

/// Probabilities proportional to `size`, summing to `n`, capped at 1.
Vector pps_probabilities(const Eigen::Ref<const Vector>& size, double n);

/// Independent Bernoulli(pi_i) selection.
std::vector<bool> poisson_draw(const Eigen::Ref<const Vector>& inclusion_probs, SplitMix64& rng);

struct ScenarioColumns {
    ColumnList propensity;
    ColumnList outcome;
};

ScenarioColumns scenario_columns(Scenario s);

struct SampledPair {
    NonProbSample a;
    ProbSample b;
    ScenarioColumns columns;
};

/// Draws sample A and sample B (Poisson design) from a generated population.
SampledPair build_samples(const SimPopulation& pop, Scenario scenario, SplitMix64& rng);
/// Generates the population and draws one replicate with the spec seed.
SampledPair build_samples(const ScenarioSpec& spec);

}  // namespace nonprob
