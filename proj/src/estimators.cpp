#include "nonprob/estimators.hpp"

#include <cmath>
#include <limits>

#include "nonprob/errors.hpp"
#include "nonprob/propensity.hpp"

namespace nonprob {

namespace {

void check_propensities(const Eigen::Ref<const Vector>& pi_hat, Eigen::Index n) {
    if (pi_hat.size() != n) throw DimensionError("estimator: propensity length differs from sample A size");
    for (Eigen::Index i = 0; i < n; ++i) {
        const double p = pi_hat(i);
        if (!(p > 0.0 && p < 1.0)) throw DomainError("estimator: estimated propensity outside (0,1)");
    }
}

void check_population_size(double n) {
    if (!(n >= 1.0) || !std::isfinite(n)) throw DomainError("estimator: population size must be at least 1");
}

}  // namespace

double mu_naive(const NonProbSample& a) {
    if (a.size() < 1) throw DimensionError("mu_naive: empty sample");
    return a.responses().mean();
}

double mu_ipw1(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& pi_hat, double population_size) {
    check_propensities(pi_hat, y.size());
    check_population_size(population_size);
    return y.cwiseQuotient(pi_hat).sum() / population_size;
}

double mu_ipw2(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& pi_hat) {
    check_propensities(pi_hat, y.size());
    const Vector d = pi_hat.cwiseInverse();
    return y.dot(d) / d.sum();
}

double mu_ipw1(const NonProbSample& a, const Eigen::Ref<const Vector>& pi_hat, double population_size) {
    return mu_ipw1(a.responses(), pi_hat, population_size);
}

double mu_ipw2(const NonProbSample& a, const Eigen::Ref<const Vector>& pi_hat) {
    return mu_ipw2(a.responses(), pi_hat);
}

double mu_reg(const Eigen::Ref<const Vector>& db, const Eigen::Ref<const Vector>& m_b) {
    if (db.size() != m_b.size() || db.size() == 0) throw DimensionError("mu_reg: weight and prediction lengths differ");
    return db.dot(m_b) / db.sum();
}

double mu_reg(const ProbSample& b, const OutcomeFit& fit) {
    return mu_reg(b.weights(), fit.predict(b.covariates()));
}

std::vector<Eigen::Index> nearest_donors(const NonProbSample& a, const ProbSample& b, const ColumnList& columns,
                                         const MatchOptions& opts) {
    if (columns.empty()) throw DimensionError("mu_sm_nn: no matching columns");
    // Drop the intercept column; it never changes a distance.
    Matrix xa = a.covariates().design(columns).rightCols(static_cast<Eigen::Index>(columns.size()));
    Matrix xb = b.covariates().design(columns).rightCols(static_cast<Eigen::Index>(columns.size()));
    if (opts.standardize) {
        Matrix pooled(xa.rows() + xb.rows(), xa.cols());
        pooled << xa, xb;
        const Eigen::RowVectorXd mean = pooled.colwise().mean();
        const Eigen::RowVectorXd sd =
            ((pooled.rowwise() - mean).array().square().colwise().sum() / std::max<double>(1.0, pooled.rows() - 1.0))
                .sqrt();
        for (Eigen::Index j = 0; j < xa.cols(); ++j) {
            if (sd(j) > 0.0) {
                xa.col(j) /= sd(j);
                xb.col(j) /= sd(j);
            }
        }
    }
    std::vector<Eigen::Index> donors(static_cast<std::size_t>(xb.rows()));
    for (Eigen::Index i = 0; i < xb.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        Eigen::Index arg = 0;
        for (Eigen::Index k = 0; k < xa.rows(); ++k) {
            const double dist = (xa.row(k) - xb.row(i)).squaredNorm();
            if (dist < best) {
                best = dist;
                arg = k;
            }
        }
        donors[static_cast<std::size_t>(i)] = arg;
    }
    return donors;
}

double mu_sm_nn(const NonProbSample& a, const ProbSample& b, const ColumnList& columns, const MatchOptions& opts) {
    const auto donors = nearest_donors(a, b, columns, opts);
    Vector imputed(b.size());
    for (Eigen::Index i = 0; i < b.size(); ++i) imputed(i) = a.responses()(donors[static_cast<std::size_t>(i)]);
    return b.weights().dot(imputed) / b.weights().sum();
}

double mu_dr1(const Eigen::Ref<const Vector>& y_a, const Eigen::Ref<const Vector>& m_a,
              const Eigen::Ref<const Vector>& pi_hat, const Eigen::Ref<const Vector>& db,
              const Eigen::Ref<const Vector>& m_b, double population_size) {
    check_propensities(pi_hat, y_a.size());
    check_population_size(population_size);
    if (m_a.size() != y_a.size() || m_b.size() != db.size()) throw DimensionError("mu_dr1: length mismatch");
    return ((y_a - m_a).cwiseQuotient(pi_hat).sum() + db.dot(m_b)) / population_size;
}

double mu_dr2(const Eigen::Ref<const Vector>& y_a, const Eigen::Ref<const Vector>& m_a,
              const Eigen::Ref<const Vector>& pi_hat, const Eigen::Ref<const Vector>& db,
              const Eigen::Ref<const Vector>& m_b) {
    check_propensities(pi_hat, y_a.size());
    if (m_a.size() != y_a.size() || m_b.size() != db.size()) throw DimensionError("mu_dr2: length mismatch");
    const Vector da = pi_hat.cwiseInverse();
    return da.dot(y_a - m_a) / da.sum() + db.dot(m_b) / db.sum();
}

double mu_dr1(const NonProbSample& a, const ProbSample& b, const Eigen::Ref<const Vector>& pi_hat,
              const OutcomeFit& fit, double population_size) {
    return mu_dr1(a.responses(), fit.predict(a.covariates()), pi_hat, b.weights(), fit.predict(b.covariates()),
                  population_size);
}

double mu_dr2(const NonProbSample& a, const ProbSample& b, const Eigen::Ref<const Vector>& pi_hat,
              const OutcomeFit& fit) {
    return mu_dr2(a.responses(), fit.predict(a.covariates()), pi_hat, b.weights(), fit.predict(b.covariates()));
}

double mu_kh(const NonProbSample& a, const ProbSample& b, const KhFit& fit, double population_size) {
    const OutcomeFit out = fit.outcome_fit();
    return mu_dr1(a, b, fit.propensity_fit(a).pi_A_hat, out, population_size);
}

double mu_c1(const NonProbSample& a, const ProbSample& b, double population_size, const ColumnList& columns) {
    return mu_ipw1(a, fit_naive_pooled(a, b, columns).pi_A_hat, population_size);
}

double mu_c2(const NonProbSample& a, const ProbSample& b, const ColumnList& columns) {
    return mu_ipw2(a, fit_naive_pooled(a, b, columns).pi_A_hat);
}

}  // namespace nonprob
