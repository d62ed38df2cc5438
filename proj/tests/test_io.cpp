#include <doctest.h>

#include <filesystem>
#include <string>

#include <json.hpp>

#include "nonprob/csv_io.hpp"
#include "nonprob/errors.hpp"
#include "nonprob/estimate.hpp"
#include "nonprob/estimators.hpp"
#include "nonprob/outcome.hpp"
#include "nonprob/propensity.hpp"
#include "nonprob/simgen.hpp"
#include "nonprob/variance.hpp"
#include "support.hpp"

using namespace nonprob;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "nonprob_unit";
    fs::create_directories(dir);
    return dir / name;
}

std::string numeric_csv_with_bad_row(int bad_row) {
    std::string s = "x1,y\n";
    for (int i = 1; i <= 20; ++i) {
        s += std::to_string(i) + ",";
        s += (i == bad_row ? std::string("abc") : std::to_string(i * 2)) + "\n";
    }
    return s;
}

}  // namespace

TEST_CASE("CSV parser handles quotes, BOM, CRLF and blank lines") {
    const auto t = parse_csv("\xEF\xBB\xBF\"a\",b\r\n1,\"2\"\r\n\r\n3,\"x,\"\"y\"\"\"\r\n");
    CHECK(t.header == std::vector<std::string>{"a", "b"});
    REQUIRE(t.rows.size() == 2);
    CHECK(t.rows[1][1] == "x,\"y\"");
    CHECK(t.numeric("a")(1) == 3.0);
}

TEST_CASE("CSV schema errors name the offending row") {
    const auto t = parse_csv(numeric_csv_with_bad_row(17));
    try {
        t.numeric("y");
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("row 17") != std::string::npos);
        CHECK(e.row() == 17);
    }
    CHECK_THROWS_AS(t.column("zz"), SchemaError);
    CHECK_THROWS_AS(parse_csv("a,b\n1,2\n3\n"), SchemaError);
    CHECK_THROWS_AS(parse_csv("a,a\n1,2\n"), SchemaError);
    CHECK_THROWS_AS(parse_csv(""), SchemaError);
    CHECK_THROWS_AS(parse_csv("a\nnan\n").numeric("a"), SchemaError);
}

TEST_CASE("nonpositive weights are rejected with a row number") {
    const auto t = parse_csv("x1,weight\n1,2\n2,0\n");
    try {
        load_sample_b(t, {"x1"}, "weight");
        FAIL("expected a schema error");
    } catch (const SchemaError& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("samples round-trip through CSV and estimates match the library to 1e-12") {
    ScenarioSpec spec;
    spec.rho = 0.5;
    spec.n_a = 300;
    spec.n_b = 600;
    spec.population_size = 8000;
    spec.seed = 21;
    const auto pair = build_samples(spec);
    const auto pa = scratch("a.csv"), pb = scratch("b.csv");
    write_sample_a_csv(pa, pair.a);
    write_sample_b_csv(pb, pair.b);

    EstimateConfig cfg;
    cfg.propensity_columns = pair.columns.propensity;
    cfg.outcome_columns = pair.columns.outcome;
    cfg.population_size = 8000.0;
    cfg.design = DesignKind::Poisson;
    cfg.kh_variance = true;
    cfg.estimators = {Method::IPW1, Method::IPW2, Method::REG, Method::DR1, Method::DR2, Method::KH, Method::SM};
    const auto reports = run_estimate(pa, pb, cfg);
    REQUIRE(reports.size() == 7);

    const auto pf = fit_propensity(pair.a, pair.b, cfg.propensity_columns);
    const auto of = fit_linear(pair.a, cfg.outcome_columns);
    const auto kh = fit_kh_joint(pair.a, pair.b, 8000.0, cfg.propensity_columns, cfg.outcome_columns);
    const double direct[] = {mu_ipw1(pair.a, pf.pi_A_hat, 8000.0), mu_ipw2(pair.a, pf.pi_A_hat),
                             mu_reg(pair.b, of),
                             mu_dr1(pair.a, pair.b, pf.pi_A_hat, of, 8000.0),
                             mu_dr2(pair.a, pair.b, pf.pi_A_hat, of),
                             mu_kh(pair.a, pair.b, kh, 8000.0),
                             mu_sm_nn(pair.a, pair.b, cfg.outcome_columns)};
    for (std::size_t i = 0; i < 7; ++i) CHECK(std::abs(reports[i].point - direct[i]) <= 1e-12 * std::abs(direct[i]));
    CHECK(std::abs(*reports[1].variance - var_ipw2_plugin(pair.a, pair.b, pf, direct[1])) <= 1e-12 * *reports[1].variance);
    CHECK(std::abs(*reports[5].variance - var_kh(pair.a, pair.b, kh, 8000.0).value) <= 1e-12 * *reports[5].variance);
    CHECK_FALSE(reports[2].variance.has_value());

    const auto j = nlohmann::json::parse(reports_json(reports));
    CHECK(j["reports"].size() == 7);
    CHECK(j["reports"][1]["method"] == "ipw2");
    CHECK(j["reports"][2]["se"].is_null());
    CHECK(j["reports"][1]["point"].get<double>() == reports[1].point);
}

TEST_CASE("equal weights and an intercept-only propensity reduce IPW2 to the sample mean") {
    auto inst = testing::random_instance(4, 30, 60, 2);
    ProbSample b(inst.b.covariates(), Vector::Constant(60, 10.0));
    EstimateConfig cfg;
    cfg.outcome_columns = {"x1"};
    cfg.population_size = 600.0;
    cfg.estimators = {Method::IPW2, Method::IPW1};
    const auto r = run_estimate(inst.a, b, cfg);
    CHECK(r[0].point == doctest::Approx(inst.a.responses().mean()).epsilon(1e-12));
    CHECK(r[1].point == doctest::Approx(inst.a.responses().mean()).epsilon(1e-10));
}

TEST_CASE("estimators needing N fail without it") {
    auto inst = testing::random_instance(4, 30, 60, 2);
    EstimateConfig cfg;
    cfg.propensity_columns = {"x1"};
    cfg.outcome_columns = {"x1"};
    for (Method m : {Method::IPW1, Method::DR1, Method::KH, Method::C1}) {
        cfg.estimators = {m};
        CHECK_THROWS_AS(run_estimate(inst.a, inst.b, cfg), UsageError);
    }
    cfg.estimators = {Method::IPW2, Method::C2, Method::Naive, Method::REG, Method::SM, Method::DR2};
    CHECK(run_estimate(inst.a, inst.b, cfg).size() == 6);
}

TEST_CASE("method names round trip") {
    for (Method m : {Method::Naive, Method::C1, Method::C2, Method::IPW1, Method::IPW2, Method::REG, Method::SM,
                     Method::DR1, Method::DR2, Method::KH}) {
        CHECK(parse_method(to_string(m)) == m);
    }
    CHECK(parse_method("DR2") == Method::DR2);
    CHECK_FALSE(parse_method("ipw3").has_value());
}

TEST_CASE("covariate and sample validation") {
    CHECK_THROWS_AS(Covariates({"x1"}, Matrix::Ones(3, 3)), DimensionError);
    Matrix x = Matrix::Ones(3, 2);
    x(1, 0) = 2.0;
    CHECK_THROWS(Covariates({"x1"}, x));
    CHECK_THROWS(Covariates({"x1", "x1"}, Matrix::Ones(3, 3)));
    const Covariates c({"x1"}, Matrix::Ones(3, 2));
    CHECK_THROWS_AS(ProbSample(c, Vector::Constant(3, -1.0)), DomainError);
    CHECK_THROWS_AS(ProbSample(c, Vector::Constant(3, 2.0), Vector::Constant(3, 0.4)), DomainError);
    CHECK_THROWS_AS(NonProbSample(c, Vector::Ones(2)), DimensionError);
    CHECK(ProbSample(c, Vector::Constant(3, 4.0)).first_order_probs()(0) == doctest::Approx(0.25));
}
