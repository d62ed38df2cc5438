#include "nonprob/propensity.hpp"

#include <string>

#include "nonprob/errors.hpp"
#include "nonprob/link.hpp"
#include "nonprob/newton.hpp"

namespace nonprob {

void NewtonOptions::validate() const {
    if (max_iterations < 1) throw DomainError("NewtonOptions: max_iterations must be positive");
    if (!(tolerance > 0.0)) throw DomainError("NewtonOptions: tolerance must be positive");
    if (step_halving_max < 0) throw DomainError("NewtonOptions: step_halving_max must be non-negative");
}

namespace {

void check_dims(Eigen::Index p, const Eigen::Ref<const Matrix>& xa, const Eigen::Ref<const Matrix>& xb,
                const Eigen::Ref<const Vector>& db) {
    if (xa.cols() != p || xb.cols() != p) throw DimensionError("propensity: theta length differs from covariate count");
    if (xb.rows() != db.size()) throw DimensionError("propensity: sample B weight length differs from row count");
}

Vector logistic_rows(const Vector& eta) {
    return eta.unaryExpr([](double e) { return logistic(e); });
}

}  // namespace

double pseudo_loglik(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Matrix>& xa,
                     const Eigen::Ref<const Matrix>& xb, const Eigen::Ref<const Vector>& db) {
    check_dims(theta.size(), xa, xb, db);
    const Vector eta_b = xb * theta;
    const double value = (xa * theta).sum() - db.dot(eta_b.unaryExpr([](double e) { return log1p_exp(e); }));
    if (!std::isfinite(value)) throw DomainError("pseudo_loglik: non-finite value");
    return value;
}

Vector pseudo_score(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Matrix>& xa,
                    const Eigen::Ref<const Matrix>& xb, const Eigen::Ref<const Vector>& db) {
    check_dims(theta.size(), xa, xb, db);
    const Vector w = db.cwiseProduct(logistic_rows(xb * theta));
    return xa.colwise().sum().transpose() - xb.transpose() * w;
}

Matrix pseudo_information(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Matrix>& xb,
                          const Eigen::Ref<const Vector>& db) {
    if (xb.cols() != theta.size()) throw DimensionError("propensity: theta length differs from covariate count");
    if (xb.rows() != db.size()) throw DimensionError("propensity: sample B weight length differs from row count");
    const Vector eta = xb * theta;
    const Vector w = db.cwiseProduct(eta.unaryExpr([](double e) { return logistic_variance(e); }));
    Matrix h = xb.transpose() * w.asDiagonal() * xb;
    return 0.5 * (h + h.transpose());
}

double pseudo_loglik(const Vector& theta, const NonProbSample& a, const ProbSample& b, const ColumnList& columns) {
    return pseudo_loglik(theta, a.covariates().design(columns), b.covariates().design(columns), b.weights());
}

Vector pseudo_score(const Vector& theta, const NonProbSample& a, const ProbSample& b, const ColumnList& columns) {
    return pseudo_score(theta, a.covariates().design(columns), b.covariates().design(columns), b.weights());
}

Matrix pseudo_information(const Vector& theta, const ProbSample& b, const ColumnList& columns) {
    return pseudo_information(theta, b.covariates().design(columns), b.weights());
}

PropensityFit fit_propensity(const NonProbSample& a, const ProbSample& b, const ColumnList& columns,
                             const NewtonOptions& opts) {
    const Matrix xa = a.covariates().design(columns);
    const Matrix xb = b.covariates().design(columns);
    const Vector& db = b.weights();

    ConcaveObjective f{
        [&](const Vector& t) { return pseudo_loglik(t, xa, xb, db); },
        [&](const Vector& t) { return pseudo_score(t, xa, xb, db); },
        [&](const Vector& t) { return pseudo_information(t, xb, db); },
    };
    const auto res = maximize_concave(f, Vector::Zero(xa.cols()), opts, static_cast<double>(xa.rows()),
                                      "fit_propensity");

    PropensityFit fit;
    fit.columns = columns;
    fit.theta = res.x;
    fit.converged = true;
    fit.iterations = res.iterations;
    fit.final_score_norm = res.gradient_norm;
    fit.pi_A_hat = logistic_rows(xa * res.x);
    return fit;
}

PropensityFit fit_propensity(const NonProbSample& a, const ProbSample& b, const NewtonOptions& opts) {
    return fit_propensity(a, b, a.covariates().names(), opts);
}

Vector bernoulli_score(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Matrix>& x,
                       const Eigen::Ref<const Vector>& y) {
    if (x.cols() != theta.size()) throw DimensionError("bernoulli_score: theta length differs from covariate count");
    if (x.rows() != y.size()) throw DimensionError("bernoulli_score: response length differs from row count");
    return x.transpose() * (y - logistic_rows(x * theta));
}

PropensityFit fit_naive_pooled(const NonProbSample& a, const ProbSample& b, const ColumnList& columns,
                               const NewtonOptions& opts) {
    const Eigen::Index na = a.size();
    const Eigen::Index nb = b.size();
    Matrix x(na + nb, static_cast<Eigen::Index>(columns.size()) + 1);
    x.topRows(na) = a.covariates().design(columns);
    x.bottomRows(nb) = b.covariates().design(columns);
    Vector label = Vector::Zero(na + nb);
    label.head(na).setOnes();

    ConcaveObjective f{
        [&](const Vector& t) {
            const Vector eta = x * t;
            return label.dot(eta) - eta.unaryExpr([](double e) { return log1p_exp(e); }).sum();
        },
        [&](const Vector& t) { return bernoulli_score(t, x, label); },
        [&](const Vector& t) {
            const Vector w = (x * t).unaryExpr([](double e) { return logistic_variance(e); });
            Matrix h = x.transpose() * w.asDiagonal() * x;
            return Matrix(0.5 * (h + h.transpose()));
        },
    };
    const auto res = maximize_concave(f, Vector::Zero(x.cols()), opts, static_cast<double>(na), "fit_naive_pooled");

    PropensityFit fit;
    fit.columns = columns;
    fit.theta = res.x;
    fit.converged = true;
    fit.iterations = res.iterations;
    fit.final_score_norm = res.gradient_norm;
    fit.pi_A_hat = logistic_rows(x.topRows(na) * res.x);
    return fit;
}

PropensityFit fit_naive_pooled(const NonProbSample& a, const ProbSample& b, const NewtonOptions& opts) {
    return fit_naive_pooled(a, b, a.covariates().names(), opts);
}

}  // namespace nonprob
