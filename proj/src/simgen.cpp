#include "nonprob/simgen.hpp"

#include <cmath>
#include <random>
#include <string>

#include "nonprob/errors.hpp"
#include "nonprob/link.hpp"

namespace nonprob {

namespace {
constexpr std::uint64_t kPopulationStream = ~std::uint64_t{0};
const ColumnList kAllColumns{"x1", "x2", "x3", "x4"};
const ColumnList kReducedColumns{"x1", "x2", "x3"};
constexpr double kSlopes[4] = {0.1, 0.2, 0.1, 0.2};
}  // namespace

std::string_view to_string(Scenario s) {
    switch (s) {
        case Scenario::TT: return "TT";
        case Scenario::FT: return "FT";
        case Scenario::TF: return "TF";
    }
    return "?";
}

Scenario parse_scenario(std::string_view s) {
    if (s == "TT") return Scenario::TT;
    if (s == "FT") return Scenario::FT;
    if (s == "TF") return Scenario::TF;
    throw DomainError("unknown scenario '" + std::string(s) + "' (expected TT, FT or TF)");
}

void ScenarioSpec::validate() const {
    if (!(rho > 0.0 && rho < 1.0)) throw DomainError("scenario: rho must lie in (0,1)");
    if (population_size < 2) throw DomainError("scenario: population size must be at least 2");
    if (n_a < 1 || n_a >= population_size) throw DomainError("scenario: n_a must lie in [1, N)");
    if (n_b < 1 || n_b > population_size) throw DomainError("scenario: n_b must lie in [1, N]");
}

SimPopulation gen_frame(const ScenarioSpec& spec, SplitMix64& rng) {
    spec.validate();
    const Eigen::Index n = spec.population_size;
    std::bernoulli_distribution z1(0.5);
    std::uniform_real_distribution<double> z2(0.0, 2.0);
    std::exponential_distribution<double> z3(1.0);
    std::chi_squared_distribution<double> z4(4.0);
    std::normal_distribution<double> noise(0.0, 1.0);

    Matrix x(n, 5);
    x.col(0).setOnes();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double x1 = z1(rng) ? 1.0 : 0.0;
        const double x2 = z2(rng) + 0.3 * x1;
        const double x3 = z3(rng) + 0.2 * (x1 + x2);
        const double x4 = z4(rng) + 0.1 * (x1 + x2 + x3);
        x.row(i) << 1.0, x1, x2, x3, x4;
    }
    SimPopulation pop;
    pop.eta = (2.0 + x.rightCols(4).rowwise().sum().array()).matrix();
    const double sd_eta = std::sqrt((pop.eta.array() - pop.eta.mean()).square().mean());
    pop.sigma = sd_eta * std::sqrt(1.0 / (spec.rho * spec.rho) - 1.0);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = pop.eta(i) + pop.sigma * noise(rng);
    pop.frame = FinitePopulation(Covariates(kAllColumns, std::move(x)), std::move(y));
    pop.mu_y = pop.frame.mean();
    return pop;
}

SimPopulation gen_population(const ScenarioSpec& spec) {
    auto rng = SplitMix64::stream(spec.seed, kPopulationStream);
    SimPopulation pop = gen_frame(spec, rng);
    pop.theta0 = solve_theta0(pop.frame, spec.n_a);
    const Matrix& x = pop.frame.covariates.matrix();
    Vector eta_a = (x.rightCols(4) * Eigen::Map<const Vector>(kSlopes, 4)).array() + pop.theta0;
    pop.pi_a = eta_a.unaryExpr([](double e) { return logistic(e); });
    pop.c = solve_c(pop.frame);
    const Vector z = (pop.c + x.col(3).array() + 0.03 * pop.frame.responses.array()).matrix();
    pop.pi_b = pps_probabilities(z, static_cast<double>(spec.n_b));
    return pop;
}

double solve_theta0(const FinitePopulation& pop, Eigen::Index n_a) {
    const Eigen::Index n = pop.size();
    if (n_a <= 0 || n_a >= n) throw DomainError("solve_theta0: need 0 < n_a < N");
    const Matrix& x = pop.covariates.matrix();
    if (x.cols() < 5) throw DimensionError("solve_theta0: population needs columns x1..x4");
    const Vector lin = x.middleCols(1, 4) * Eigen::Map<const Vector>(kSlopes, 4);
    const double target = static_cast<double>(n_a);
    auto excess = [&](double t0) {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) s += logistic(t0 + lin(i));
        return s - target;
    };
    double lo = -50.0;
    double hi = 50.0;
    if (excess(lo) > 0.0 || excess(hi) < 0.0) throw DomainError("solve_theta0: no root bracketed in [-50, 50]");
    // Bisect to the resolution of the bracket; the 0.1 acceptance band is checked after.
    for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        (excess(mid) < 0.0 ? lo : hi) = mid;
    }
    const double t0 = 0.5 * (lo + hi);
    if (std::abs(excess(t0)) > 0.1) throw DomainError("solve_theta0: root not located within 0.1");
    return t0;
}

double solve_c(const Eigen::Ref<const Vector>& w, double ratio) {
    if (!(ratio > 1.0)) throw DomainError("solve_c: ratio must exceed 1");
    const double lo = w.minCoeff();
    const double hi = w.maxCoeff();
    if (!(hi > lo)) throw DomainError("solve_c: size variable is constant");
    const double c = (hi - ratio * lo) / (ratio - 1.0);
    if (!(c + lo > 0.0)) throw DomainError("solve_c: non-positive minimum size");
    return c;
}

double solve_c(const FinitePopulation& pop, double ratio) {
    const Covariates& x = pop.covariates;
    const Vector w = (x.matrix().col(x.index_of("x3")).array() + 0.03 * pop.responses.array()).matrix();
    return solve_c(w, ratio);
}

Vector pps_probabilities(const Eigen::Ref<const Vector>& size, double n) {
    if ((size.array() <= 0.0).any()) throw DomainError("pps_probabilities: sizes must be positive");
    if (!(n > 0.0) || n > static_cast<double>(size.size())) throw DomainError("pps_probabilities: invalid target size");
    Vector pi = size * (n / size.sum());
    // Cap at 1 and spread the excess over the uncapped units until nothing exceeds 1.
    for (int it = 0; it < 1000 && (pi.array() > 1.0).any(); ++it) {
        const auto capped = (pi.array() >= 1.0);
        const double n_capped = capped.cast<double>().sum();
        double rest = 0.0;
        for (Eigen::Index i = 0; i < pi.size(); ++i) {
            if (!capped(i)) rest += size(i);
        }
        for (Eigen::Index i = 0; i < pi.size(); ++i) pi(i) = capped(i) ? 1.0 : size(i) * (n - n_capped) / rest;
    }
    return pi;
}

std::vector<bool> poisson_draw(const Eigen::Ref<const Vector>& inclusion_probs, SplitMix64& rng) {
    std::vector<bool> sel(static_cast<std::size_t>(inclusion_probs.size()));
    for (Eigen::Index i = 0; i < inclusion_probs.size(); ++i) {
        const double p = inclusion_probs(i);
        if (!(p > 0.0 && p <= 1.0)) throw DomainError("poisson_draw: probability outside (0,1]");
        sel[static_cast<std::size_t>(i)] = rng.uniform() < p;
    }
    return sel;
}

ScenarioColumns scenario_columns(Scenario s) {
    switch (s) {
        case Scenario::TT: return {kAllColumns, kAllColumns};
        case Scenario::FT: return {kAllColumns, kReducedColumns};
        case Scenario::TF: return {kReducedColumns, kAllColumns};
    }
    return {kAllColumns, kAllColumns};
}

namespace {

std::vector<Eigen::Index> selected_rows(const std::vector<bool>& sel) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < sel.size(); ++i) {
        if (sel[i]) rows.push_back(static_cast<Eigen::Index>(i));
    }
    return rows;
}

}  // namespace

SampledPair build_samples(const SimPopulation& pop, Scenario scenario, SplitMix64& rng) {
    const auto rows_a = selected_rows(poisson_draw(pop.pi_a, rng));
    const auto rows_b = selected_rows(poisson_draw(pop.pi_b, rng));
    if (rows_a.empty() || rows_b.empty()) throw DomainError("build_samples: an empty sample was drawn");

    const Matrix& x = pop.frame.covariates.matrix();
    const ColumnList& names = pop.frame.covariates.names();
    Matrix xa = x(rows_a, Eigen::all);
    Vector ya = pop.frame.responses(rows_a);
    Matrix xb = x(rows_b, Eigen::all);
    Vector pib = pop.pi_b(rows_b);
    Vector db = pib.cwiseInverse();

    return SampledPair{NonProbSample(Covariates(names, std::move(xa)), std::move(ya)),
                       ProbSample(Covariates(names, std::move(xb)), std::move(db), std::move(pib),
                                  Design{DesignKind::Poisson, std::nullopt}),
                       scenario_columns(scenario)};
}

SampledPair build_samples(const ScenarioSpec& spec) {
    const SimPopulation pop = gen_population(spec);
    auto rng = SplitMix64::stream(spec.seed, 0);
    return build_samples(pop, spec.scenario, rng);
}

}  // namespace nonprob
