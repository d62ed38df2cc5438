#include "nonprob/metrics.hpp"

#include "nonprob/errors.hpp"

namespace nonprob {

double metric_rb(const Eigen::Ref<const Eigen::VectorXd>& estimates, double mu_true) {
    if (estimates.size() == 0) throw DomainError("metric_rb: no estimates");
    if (mu_true == 0.0) throw DomainError("metric_rb: relative bias undefined for a zero mean");
    return (estimates.array() - mu_true).mean() / mu_true * 100.0;
}

double metric_mse(const Eigen::Ref<const Eigen::VectorXd>& estimates, double mu_true) {
    if (estimates.size() == 0) throw DomainError("metric_mse: no estimates");
    return (estimates.array() - mu_true).square().mean();
}

double metric_cp(const std::vector<std::pair<double, double>>& intervals, double mu_true) {
    if (intervals.empty()) throw DomainError("metric_cp: no intervals");
    std::size_t hits = 0;
    for (const auto& [lo, hi] : intervals) {
        if (lo <= mu_true && mu_true <= hi) ++hits;
    }
    return 100.0 * static_cast<double>(hits) / static_cast<double>(intervals.size());
}

double metric_var_rb(const Eigen::Ref<const Eigen::VectorXd>& variances, double v_reference) {
    if (variances.size() == 0) throw DomainError("metric_var_rb: no variances");
    if (!(v_reference > 0.0)) throw DomainError("metric_var_rb: reference variance must be positive");
    return (variances.mean() / v_reference - 1.0) * 100.0;
}

double empirical_variance(const Eigen::Ref<const Eigen::VectorXd>& estimates) {
    if (estimates.size() == 0) throw DomainError("empirical_variance: no estimates");
    return (estimates.array() - estimates.mean()).square().mean();
}

}  // namespace nonprob
