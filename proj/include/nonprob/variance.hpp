#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "nonprob/outcome.hpp"
#include "nonprob/types.hpp"

namespace nonprob {

enum class VarianceMode { PoissonExact, SRSApprox, JointProbHT, WithReplacementApprox };

struct DesignVariancePlan {
    VarianceMode mode = VarianceMode::WithReplacementApprox;

    /// Joint probabilities when present, Poisson and SRS formulas for those
    /// designs, otherwise the with-replacement approximation.
    static DesignVariancePlan for_sample(const ProbSample& b);
};

/// N^-2 times the estimated design variance of the total sum_B d_i v_i.
///
/// `values` has one row per sample B unit; the result is k x k for k columns.
Matrix design_var_total(const ProbSample& b, const Eigen::Ref<const Matrix>& values, const DesignVariancePlan& plan,
                        double population_size);
double design_var_scalar(const ProbSample& b, const Eigen::Ref<const Vector>& values, const DesignVariancePlan& plan,
                        double population_size);

/// Plug-in variance of IPW1 (known N).
double var_ipw1_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit, double mu_hat,
                       double population_size, const DesignVariancePlan& plan);
/// Plug-in variance of IPW2; N is replaced by sum_A 1/pi_hat throughout.
double var_ipw2_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit, double mu_hat,
                       const DesignVariancePlan& plan);
double var_ipw1_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit, double mu_hat,
                       double population_size);
double var_ipw2_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit, double mu_hat);

/// Plug-in variance of DR2 under a correct propensity model.
double var_dr2_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit,
                      const OutcomeFit& outcome, const DesignVariancePlan& plan);
double var_dr2_plugin(const NonProbSample& a, const ProbSample& b, const PropensityFit& fit,
                      const OutcomeFit& outcome);

/// Per-unit outcome variances sigma_i^2 on the A and B rows.
struct UnitVariances {
    Vector a;
    Vector b;
};

/// RSS / (n_A - p) from the residuals of `outcome` on sample A, applied to every unit.
UnitVariances homogeneous_unit_variances(const NonProbSample& a, const ProbSample& b, const OutcomeFit& outcome);

struct KhVariance {
    double value = 0.0;
    double w1 = 0.0;
    double w2 = 0.0;
    double correction = 0.0;
    // Set when w1 + w2 - correction was negative and the result was floored at 0.
    bool floored = false;
};

/// Doubly robust variance for the KH (jointly estimated, calibrated) estimator.
KhVariance var_kh(const NonProbSample& a, const ProbSample& b, const KhFit& fit, double population_size,
                  const std::optional<UnitVariances>& sigma2, const DesignVariancePlan& plan);
KhVariance var_kh(const NonProbSample& a, const ProbSample& b, const KhFit& fit, double population_size);

/// Normal-approximation interval point +/- z sqrt(variance); level is 0.90, 0.95 or 0.99.
std::pair<double, double> confidence_interval(double point, double variance, double level = 0.95);
double normal_quantile_two_sided(double level);

}  // namespace nonprob
