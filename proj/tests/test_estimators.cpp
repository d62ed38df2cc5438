#include <doctest.h>

#include "nonprob/errors.hpp"
#include "nonprob/estimators.hpp"
#include "nonprob/outcome.hpp"
#include "nonprob/propensity.hpp"
#include "support.hpp"

using namespace nonprob;
using testing::random_instance;

TEST_CASE("closed-form estimators on a hand-sized example") {
    Vector y(3), pi(3);
    y << 1.0, 2.0, 4.0;
    pi << 0.5, 0.25, 0.1;
    CHECK(mu_ipw1(y, pi, 100.0) == doctest::Approx((2.0 + 8.0 + 40.0) / 100.0));
    CHECK(mu_ipw2(y, pi) == doctest::Approx(50.0 / 16.0));
    Vector d(2), m(2);
    d << 10.0, 30.0;
    m << 1.0, 3.0;
    CHECK(mu_reg(d, m) == doctest::Approx(100.0 / 40.0));
    CHECK_THROWS_AS(mu_ipw1(y, Vector::Constant(3, 1.0), 10.0), DomainError);
    CHECK_THROWS_AS(mu_ipw1(y, pi, 0.0), DomainError);
    CHECK_THROWS_AS(mu_ipw2(y, Vector::Constant(2, 0.5)), DimensionError);
}

TEST_CASE("DR2 reduces to REG when residuals vanish and to IPW2 when m is zero") {
    for (std::uint64_t s = 1; s <= 25; ++s) {
        const auto inst = random_instance(s, 50, 120, 3);
        const auto pfit = fit_propensity(inst.a, inst.b);
        const auto ofit = fit_linear(inst.a, inst.a.covariates().names());
        const Vector ma = ofit.predict(inst.a.covariates());
        const Vector mb = ofit.predict(inst.b.covariates());
        const Vector& pi = pfit.pi_A_hat;
        const Vector& d = inst.b.weights();

        CHECK(mu_dr2(ma, ma, pi, d, mb) == doctest::Approx(mu_reg(d, mb)).epsilon(1e-12));
        NonProbSample exact(inst.a.covariates(), ma);
        CHECK(mu_dr2(exact, inst.b, pi, ofit) == doctest::Approx(mu_reg(inst.b, ofit)).epsilon(1e-12));

        const Vector za = Vector::Zero(50), zb = Vector::Zero(120);
        CHECK(mu_dr2(inst.a.responses(), za, pi, d, zb) == doctest::Approx(mu_ipw2(inst.a, pi)).epsilon(1e-12));
        CHECK(mu_dr1(inst.a.responses(), za, pi, d, zb, inst.n_pop) ==
              doctest::Approx(mu_ipw1(inst.a, pi, inst.n_pop)).epsilon(1e-12));
    }
}

TEST_CASE("DR2 minus REG is the Hajek-weighted mean residual") {
    const auto inst = random_instance(8, 70, 140, 2);
    const auto pfit = fit_propensity(inst.a, inst.b);
    const auto ofit = fit_linear(inst.a, {"x1"});
    const Vector r = inst.a.responses() - ofit.predict(inst.a.covariates());
    const Vector da = pfit.pi_A_hat.cwiseInverse();
    const double diff = mu_dr2(inst.a, inst.b, pfit.pi_A_hat, ofit) - mu_reg(inst.b, ofit);
    CHECK(diff == doctest::Approx(da.dot(r) / da.sum()).epsilon(1e-12));
}

TEST_CASE("estimators are invariant to row order") {
    const auto inst = random_instance(12, 40, 90, 2);
    const auto pfit = fit_propensity(inst.a, inst.b);
    const auto ofit = fit_linear(inst.a, inst.a.covariates().names());
    const double dr2 = mu_dr2(inst.a, inst.b, pfit.pi_A_hat, ofit);
    const double ipw2 = mu_ipw2(inst.a, pfit.pi_A_hat);

    NonProbSample a2(Covariates(inst.a.covariates().names(), inst.a.covariates().matrix().colwise().reverse()),
                     inst.a.responses().reverse());
    ProbSample b2(Covariates(inst.b.covariates().names(), inst.b.covariates().matrix().colwise().reverse()),
                  inst.b.weights().reverse());
    const auto pfit2 = fit_propensity(a2, b2);
    const auto ofit2 = fit_linear(a2, a2.covariates().names());
    CHECK(mu_dr2(a2, b2, pfit2.pi_A_hat, ofit2) == doctest::Approx(dr2).epsilon(1e-11));
    CHECK(mu_ipw2(a2, pfit2.pi_A_hat) == doctest::Approx(ipw2).epsilon(1e-11));
}

TEST_CASE("Hajek estimators are invariant to a common rescaling of B weights") {
    const auto inst = random_instance(13, 40, 90, 2);
    const auto ofit = fit_linear(inst.a, inst.a.covariates().names());
    ProbSample b2(inst.b.covariates(), 3.0 * inst.b.weights());
    CHECK(mu_reg(b2, ofit) == doctest::Approx(mu_reg(inst.b, ofit)).epsilon(1e-13));
    CHECK(mu_sm_nn(inst.a, b2, {"x1", "x2"}) == doctest::Approx(mu_sm_nn(inst.a, inst.b, {"x1", "x2"})));
}

TEST_CASE("nearest-neighbour matching breaks ties by the lowest donor index") {
    Matrix xa(4, 2), xb(2, 2);
    xa << 1, 0.0, 1, 2.0, 1, 2.0, 1, 5.0;
    xb << 1, 1.0, 1, 2.1;
    Vector ya(4);
    ya << 10, 20, 30, 40;
    NonProbSample a(Covariates({"x1"}, xa), ya);
    ProbSample b(Covariates({"x1"}, xb), Vector::Constant(2, 5.0));
    // Unit 0 is equidistant from donors 0 and 1 (and 2); unit 1 ties donors 1 and 2.
    const auto donors = nearest_donors(a, b, {"x1"});
    CHECK(donors[0] == 0);
    CHECK(donors[1] == 1);
    CHECK(mu_sm_nn(a, b, {"x1"}) == doctest::Approx(15.0));
}

TEST_CASE("standardized matching rescales by the pooled standard deviation") {
    Matrix xa(2, 3), xb(1, 3);
    // Column x2 has a huge spread; unstandardized it dominates the distance.
    xa << 1, 0.0, 0.0, 1, 1.0, 100.0;
    xb << 1, 0.9, 40.0;
    NonProbSample a(Covariates({"x1", "x2"}, xa), Vector::LinSpaced(2, 1.0, 2.0));
    ProbSample b(Covariates({"x1", "x2"}, xb), Vector::Ones(1));
    CHECK(nearest_donors(a, b, {"x1", "x2"})[0] == 0);
    MatchOptions opt;
    opt.standardize = true;
    CHECK(nearest_donors(a, b, {"x1", "x2"}, opt)[0] == 1);
    CHECK_THROWS_AS(nearest_donors(a, b, {}), DimensionError);
}

TEST_CASE("pooled-fit estimators reuse the IPW forms") {
    const auto inst = random_instance(17, 40, 80, 2);
    const auto naive = fit_naive_pooled(inst.a, inst.b);
    CHECK(mu_c1(inst.a, inst.b, inst.n_pop, inst.a.covariates().names()) ==
          doctest::Approx(mu_ipw1(inst.a, naive.pi_A_hat, inst.n_pop)));
    CHECK(mu_c2(inst.a, inst.b, inst.a.covariates().names()) == doctest::Approx(mu_ipw2(inst.a, naive.pi_A_hat)));
    CHECK(mu_naive(inst.a) == doctest::Approx(inst.a.responses().mean()));
}

TEST_CASE("two-unit IPW example and Hajek scale invariance") {
    Vector y(2), pi(2);
    y << 1.0, 3.0;
    pi << 0.5, 0.25;
    CHECK(mu_ipw1(y, pi, 8.0) == doctest::Approx(1.75));
    CHECK(mu_ipw2(y, pi) == doctest::Approx(14.0 / 6.0));
    const double c = 1.7;
    CHECK(std::abs(mu_ipw2(y, c * pi) - mu_ipw2(y, pi)) < 1e-12);
    CHECK(mu_ipw1(y, c * pi, 8.0) == doctest::Approx(1.75 / c));
    const Vector flat = Vector::Constant(2, 2.0 / 8.0);
    CHECK(mu_ipw1(y, flat, 8.0) == doctest::Approx(2.0));
    CHECK(mu_ipw2(y, flat) == doctest::Approx(2.0));
}

TEST_CASE("IPW2 stays within the range of y") {
    for (std::uint64_t s = 1; s <= 20; ++s) {
        const auto inst = random_instance(s, 40, 90, 2);
        const auto fit = fit_propensity(inst.a, inst.b);
        const double m = mu_ipw2(inst.a, fit.pi_A_hat);
        CHECK(m >= inst.a.responses().minCoeff());
        CHECK(m <= inst.a.responses().maxCoeff());
    }
}
