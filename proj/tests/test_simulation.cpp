#include <doctest.h>

#include <json.hpp>

#include "nonprob/errors.hpp"
#include "nonprob/metrics.hpp"
#include "nonprob/simulation.hpp"

using namespace nonprob;

namespace {

SimulationOptions small_run(unsigned threads) {
    SimulationOptions o;
    o.spec.rho = 0.5;
    o.spec.n_a = 200;
    o.spec.n_b = 400;
    o.spec.population_size = 5000;
    o.spec.seed = 3;
    o.replicates = 40;
    o.threads = threads;
    return o;
}

}  // namespace

TEST_CASE("metrics on hand values") {
    Eigen::VectorXd est(4);
    est << 9.0, 11.0, 10.0, 12.0;
    CHECK(metric_rb(est, 10.0) == doctest::Approx(5.0));
    CHECK(metric_mse(est, 10.0) == doctest::Approx((1.0 + 1.0 + 0.0 + 4.0) / 4.0));
    CHECK(empirical_variance(est) == doctest::Approx(1.25));
    Eigen::VectorXd v(2);
    v << 1.0, 1.4;
    CHECK(metric_var_rb(v, 1.0) == doctest::Approx(20.0));
    CHECK(metric_cp({{0.0, 2.0}, {1.5, 3.0}, {-1.0, 1.0}, {1.0, 1.0}}, 1.0) == doctest::Approx(75.0));
    CHECK_THROWS_AS(metric_rb(est, 0.0), DomainError);
    CHECK_THROWS_AS(metric_cp({}, 1.0), DomainError);
}

TEST_CASE("simulation output does not depend on the worker count") {
    const auto r1 = run_simulation(small_run(1));
    const auto r3 = run_simulation(small_run(3));
    CHECK(point_table_csv(r1) == point_table_csv(r3));
    CHECK(variance_table_csv(r1) == variance_table_csv(r3));
    CHECK(summary_json(r1) == summary_json(r3));
}

TEST_CASE("simulation tables have the documented layout") {
    const auto r = run_simulation(small_run(2));
    const auto pt = point_table_csv(r);
    CHECK(pt.rfind(std::string(kPointTableHeader) + "\n", 0) == 0);
    CHECK(pt.find("TT,0.5,200,400,dr2,") != std::string::npos);
    const auto vt = variance_table_csv(r);
    CHECK(vt.rfind(std::string(kVarianceTableHeader) + "\n", 0) == 0);
    CHECK(vt.find(",v_kh,") != std::string::npos);
    const auto j = nlohmann::json::parse(summary_json(r));
    CHECK(j["replicates"] == 40);
    CHECK(j["estimators"].size() == 7);
    CHECK(j["variance_estimators"].size() == 4);
}

TEST_CASE("regenerating the population per replicate still yields finite summaries") {
    auto o = small_run(2);
    o.regenerate_population = true;
    o.estimators = {Method::IPW2, Method::DR2};
    o.variances = {VarianceEstimator::PLUG};
    const auto r = run_simulation(o);
    REQUIRE(r.estimators.size() == 2);
    CHECK(std::isfinite(r.estimators[1].mse));
    CHECK(std::abs(r.estimators[1].rb_pct) < 5.0);
    CHECK(nlohmann::json::parse(summary_json(r)).count("mu_y") == 0);
}

TEST_CASE("too many failed replicates abort the run") {
    auto o = small_run(1);
    // Samples A of about two units cannot support a five-column propensity model.
    o.spec.n_a = 2;
    o.variances.clear();
    CHECK_THROWS_AS(run_simulation(o), SimulationAborted);
}

TEST_CASE("variance estimator names round trip") {
    for (auto v : {VarianceEstimator::IPW1, VarianceEstimator::IPW2, VarianceEstimator::PLUG, VarianceEstimator::KH}) {
        CHECK(parse_variance_estimator(to_string(v)) == v);
    }
    CHECK(parse_variance_estimator("plug") == VarianceEstimator::PLUG);
    CHECK_FALSE(parse_variance_estimator("v_nope").has_value());
}

TEST_CASE("plug-in variances track the Monte Carlo variance over 2000 replicates") {
    SimulationOptions o;
    o.spec.rho = 0.5;
    o.spec.n_a = 500;
    o.spec.n_b = 1000;
    o.spec.seed = 515;
    o.replicates = 2000;
    o.estimators = {Method::IPW2, Method::DR2};
    o.variances = {VarianceEstimator::IPW2, VarianceEstimator::PLUG};
    const auto r = run_simulation(o);
    for (const auto& v : r.variances) {
        const double ratio = v.mean_estimate / v.reference_variance;
        CAPTURE(to_string(v.estimator));
        CHECK(ratio >= 0.9);
        CHECK(ratio <= 1.1);
    }
}
