#pragma once

#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace nonprob {

/// Percent relative bias: mean((est - mu) / mu) * 100.
double metric_rb(const Eigen::Ref<const Eigen::VectorXd>& estimates, double mu_true);
/// Mean squared error around mu.
double metric_mse(const Eigen::Ref<const Eigen::VectorXd>& estimates, double mu_true);
/// Percent of intervals (lo, hi) that contain mu.
double metric_cp(const std::vector<std::pair<double, double>>& intervals, double mu_true);
/// Percent relative bias of variance estimates against a reference variance.
double metric_var_rb(const Eigen::Ref<const Eigen::VectorXd>& variances, double v_reference);
/// Monte Carlo variance (divisor B) of a set of estimates.
double empirical_variance(const Eigen::Ref<const Eigen::VectorXd>& estimates);

}  // namespace nonprob
