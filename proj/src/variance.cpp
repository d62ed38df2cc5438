#include "nonprob/variance.hpp"

#include <array>
#include <cmath>
#include <iostream>

#include "nonprob/errors.hpp"
#include "nonprob/link.hpp"

namespace nonprob {

DesignVariancePlan DesignVariancePlan::for_sample(const ProbSample& b) {
    switch (b.design().kind) {
        case DesignKind::Poisson:
            return {VarianceMode::PoissonExact};
        case DesignKind::SRS:
            return {VarianceMode::SRSApprox};
        case DesignKind::GeneralWithJointProbs:
            return {VarianceMode::JointProbHT};
        case DesignKind::Unspecified:
            break;
    }
    return {VarianceMode::WithReplacementApprox};
}

Matrix design_var_total(const ProbSample& b, const Eigen::Ref<const Matrix>& values, const DesignVariancePlan& plan,
                        double population_size) {
    const Eigen::Index n = b.size();
    if (values.rows() != n) throw DimensionError("design_var_total: one row of values per sample B unit required");
    if (!(population_size > 0.0)) throw DomainError("design_var_total: population size must be positive");
    const Vector& d = b.weights();
    const double scale = 1.0 / (population_size * population_size);
    const Matrix dv = d.asDiagonal() * values;  // d_i v_i'
    Matrix out;

    switch (plan.mode) {
        case VarianceMode::PoissonExact: {
            const Vector pi = b.first_order_probs();
            const Vector w = Vector::Ones(n) - pi;
            out = dv.transpose() * w.asDiagonal() * dv;
            break;
        }
        case VarianceMode::JointProbHT: {
            if (!b.design().joint_probs) throw DomainError("design_var_total: joint inclusion probabilities required");
            const Matrix& pij = *b.design().joint_probs;
            const Vector pi = b.first_order_probs();
            const Matrix delta = (pij - pi * pi.transpose()).cwiseQuotient(pij);
            out = dv.transpose() * delta * dv;
            break;
        }
        case VarianceMode::WithReplacementApprox: {
            if (n < 2) throw DomainError("design_var_total: with-replacement approximation needs n_B >= 2");
            const Matrix centered = dv.rowwise() - dv.colwise().mean();
            out = static_cast<double>(n) / static_cast<double>(n - 1) * (centered.transpose() * centered);
            break;
        }
        case VarianceMode::SRSApprox: {
            if (n < 2) throw DomainError("design_var_total: SRS variance needs n_B >= 2");
            const double frame = d.sum();
            const double f = static_cast<double>(n) / frame;
            const Matrix centered = values.rowwise() - values.colwise().mean();
            const Matrix s2 = centered.transpose() * centered / static_cast<double>(n - 1);
            out = frame * frame * std::max(0.0, 1.0 - f) / static_cast<double>(n) * s2;
            break;
        }
    }
    out = 0.5 * (out + out.transpose());
    return scale * out;
}

double design_var_scalar(const ProbSample& b, const Eigen::Ref<const Vector>& values, const DesignVariancePlan& plan,
                        double population_size) {
    return design_var_total(b, Eigen::Ref<const Matrix>(values), plan, population_size)(0, 0);
}

namespace {

struct PropensityView {
    Matrix xa;
    Matrix xb;
    Vector pa;  // pi_hat on A
    Vector pb;  // pi_hat on B
};

PropensityView propensity_view(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit) {
    PropensityView v;
    v.xa = a.covariates().design(fit.columns);
    v.xb = b.covariates().design(fit.columns);
    if (fit.theta.size() != v.xa.cols()) throw DimensionError("variance: theta length differs from column count");
    v.pa = (v.xa * fit.theta).unaryExpr([](double e) { return logistic(e); });
    v.pb = (v.xb * fit.theta).unaryExpr([](double e) { return logistic(e); });
    return v;
}

// b' = {sum_A (1/pi - 1) r x'} {sum_B d pi (1 - pi) x x'}^-1, returned as a column.
Vector plugin_b(const PropensityView& v, const Vector& r, const Vector& db) {
    const Vector wa = (v.pa.cwiseInverse().array() - 1.0).matrix().cwiseProduct(r);
    const Vector num = v.xa.transpose() * wa;
    const Vector wb = db.cwiseProduct(v.pb.cwiseProduct((1.0 - v.pb.array()).matrix()));
    const Matrix den = v.xb.transpose() * wb.asDiagonal() * v.xb;
    Eigen::LDLT<Matrix> ldlt(den);
    if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().array() > 0.0).all()) {
        throw SingularMatrixError("plug-in variance: singular sample B information matrix");
    }
    return ldlt.solve(num);
}

// N^-2 sum_A (1 - pi)(r/pi - b'x)^2 + b' D b with D over pi_B x on sample B.
double plugin_variance(const PropensityView& v, const ProbSample& b, const Vector& r, double n_first,
                       double n_design, const DesignVariancePlan& plan) {
    const Vector bhat = plugin_b(v, r, b.weights());
    const Vector resid = r.cwiseQuotient(v.pa) - v.xa * bhat;
    const double first =
        (1.0 - v.pa.array()).matrix().dot(resid.cwiseAbs2()) / (n_first * n_first);
    const Matrix d = design_var_total(b, Matrix(v.pb.asDiagonal() * v.xb), plan, n_design);
    return first + bhat.dot(d * bhat);
}

}  // namespace

double var_ipw1_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit, double mu_hat,
                       double population_size, const DesignVariancePlan& plan) {
    (void)mu_hat;  // IPW1 linearizes y itself rather than y - mu
    if (!(population_size >= 1.0)) throw DomainError("var_ipw1_plugin: population size must be at least 1");
    const auto v = propensity_view(a, b, fit);
    return plugin_variance(v, b, a.responses(), population_size, population_size, plan);
}

double var_ipw2_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit, double mu_hat,
                       const DesignVariancePlan& plan) {
    const auto v = propensity_view(a, b, fit);
    const double n_hat = v.pa.cwiseInverse().sum();
    const Vector r = (a.responses().array() - mu_hat).matrix();
    return plugin_variance(v, b, r, n_hat, n_hat, plan);
}

double var_ipw1_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit, double mu_hat,
                       double population_size) {
    return var_ipw1_plugin(a, b, fit, mu_hat, population_size, DesignVariancePlan::for_sample(b));
}

double var_ipw2_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit, double mu_hat) {
    return var_ipw2_plugin(a, b, fit, mu_hat, DesignVariancePlan::for_sample(b));
}

double var_dr2_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit,
                      const OutcomeFit& outcome, const DesignVariancePlan& plan) {
    const auto v = propensity_view(a, b, fit);
    const Vector& db = b.weights();
    const Vector da = v.pa.cwiseInverse();
    const double n_hat_a = da.sum();
    const double n_hat_b = db.sum();

    const Vector m_a = outcome.predict(a.covariates());
    const Vector m_b = outcome.predict(b.covariates());
    const Vector e = a.responses() - m_a;
    const double h = da.dot(e) / n_hat_a;
    const Vector r = (e.array() - h).matrix();

    const Vector bhat = plugin_b(v, r, db);
    const Vector resid = r.cwiseQuotient(v.pa) - v.xa * bhat;
    const double first = (1.0 - v.pa.array()).matrix().dot(resid.cwiseAbs2()) / (n_hat_a * n_hat_a);

    const double m_bar = db.dot(m_b) / n_hat_b;
    const Vector t = v.pb.cwiseProduct(v.xb * bhat) + (m_b.array() - m_bar).matrix();
    return first + design_var_scalar(b, t, plan, n_hat_b);
}

double var_dr2_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit,
                      const OutcomeFit& outcome) {
    return var_dr2_plugin(a, b, fit, outcome, DesignVariancePlan::for_sample(b));
}

UnitVariances homogeneous_unit_variances(const NonProbSample& a, const ProbSample& b, const OutcomeFit& outcome) {
    const Eigen::Index p = outcome.beta.size();
    if (a.size() <= p) throw DomainError("homogeneous_unit_variances: need more sample A rows than coefficients");
    const double rss = (a.responses() - outcome.predict(a.covariates())).squaredNorm();
    const double s2 = rss / static_cast<double>(a.size() - p);
    return {Vector::Constant(a.size(), s2), Vector::Constant(b.size(), s2)};
}

KhVariance var_kh(const NonProbSample& a, const ProbSample& b, const KhFit& fit, double population_size,
                  const std::optional<UnitVariances>& sigma2, const DesignVariancePlan& plan) {
    if (!(population_size >= 1.0)) throw DomainError("var_kh: population size must be at least 1");
    const OutcomeFit outcome = fit.outcome_fit();
    const Vector pa = fit.propensity_fit(a).pi_A_hat;
    const Vector m_a = outcome.predict(a.covariates());
    const Vector m_b = outcome.predict(b.covariates());
    const Vector e = a.responses() - m_a;
    const double n2 = population_size * population_size;

    const UnitVariances s2 = sigma2 ? *sigma2 : homogeneous_unit_variances(a, b, outcome);
    if (s2.a.size() != a.size() || s2.b.size() != b.size()) throw DimensionError("var_kh: unit variance lengths");

    KhVariance out;
    out.w1 = ((1.0 - pa.array()) / pa.array().square() * e.array().square()).sum() / n2;
    out.w2 = design_var_scalar(b, m_b, plan, population_size);
    out.correction = (s2.a.cwiseQuotient(pa).sum() - b.weights().dot(s2.b)) / n2;
    const double v = out.w1 + out.w2 - out.correction;
    if (v < 0.0) {
        out.floored = true;
        std::cerr << "warning: KH variance estimate negative (" << v << "); floored at 0\n";
        out.value = 0.0;
    } else {
        out.value = v;
    }
    return out;
}

KhVariance var_kh(const NonProbSample& a, const ProbSample& b, const KhFit& fit, double population_size) {
    return var_kh(a, b, fit, population_size, std::nullopt, DesignVariancePlan::for_sample(b));
}

double normal_quantile_two_sided(double level) {
    constexpr std::array<std::pair<double, double>, 3> table{{
        {0.90, 1.6448536269514722},
        {0.95, 1.959963984540054},
        {0.99, 2.5758293035489004},
    }};
    for (const auto& [lv, z] : table) {
        if (std::abs(level - lv) < 1e-12) return z;
    }
    throw DomainError("confidence_interval: supported levels are 0.90, 0.95 and 0.99");
}

std::pair<double, double> confidence_interval(double point, double variance, double level) {
    if (!(variance >= 0.0)) throw DomainError("confidence_interval: negative variance");
    const double half = normal_quantile_two_sided(level) * std::sqrt(variance);
    return {point - half, point + half};
}

}  // namespace nonprob
