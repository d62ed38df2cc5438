#pragma once

#include <cmath>
#include <limits>

#include <Eigen/Core>

#include "nonprob/errors.hpp"

namespace nonprob {

enum class Link { Linear, Logistic };

/// Logistic function exp(eta) / (1 + exp(eta)).
///
/// Each sign of eta uses the branch whose exponential cannot overflow. The
/// result is kept inside the open interval (0, 1): values that would round to
/// 0 or 1 in Scalar saturate at the nearest representable interior value.
template <typename Scalar>
Scalar logistic(Scalar eta) {
    if (!std::isfinite(eta)) throw DomainError("logistic: non-finite linear predictor");
    Scalar p;
    if (eta < Scalar(0)) {
        const Scalar e = std::exp(eta);
        p = e / (Scalar(1) + e);
    } else {
        p = Scalar(1) / (Scalar(1) + std::exp(-eta));
    }
    constexpr Scalar lo = std::numeric_limits<Scalar>::min();
    const Scalar hi = std::nextafter(Scalar(1), Scalar(0));
    return p < lo ? lo : (p > hi ? hi : p);
}

/// log(1 + exp(eta)) without overflow.
template <typename Scalar>
Scalar log1p_exp(Scalar eta) {
    if (!std::isfinite(eta)) throw DomainError("log1p_exp: non-finite argument");
    return eta > Scalar(0) ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

/// p(1-p) for p = logistic(eta), evaluated without cancellation.
template <typename Scalar>
Scalar logistic_variance(Scalar eta) {
    return logistic(eta) * logistic(-eta);
}

template <typename Scalar>
Scalar logit(Scalar p) {
    if (!(p > Scalar(0) && p < Scalar(1))) throw DomainError("logit: probability outside (0,1)");
    return std::log(p / (Scalar(1) - p));
}

/// Outcome mean m(x, beta): x'beta for the linear link, logistic(x'beta) otherwise.
template <typename DerivedX, typename DerivedB>
typename DerivedX::Scalar mean_function(const Eigen::MatrixBase<DerivedX>& x,
                                        const Eigen::MatrixBase<DerivedB>& beta, Link link) {
    if (x.size() != beta.size()) throw DimensionError("mean_function: covariate and coefficient lengths differ");
    const auto eta = x.dot(beta);
    return link == Link::Linear ? eta : logistic(eta);
}

/// Row-wise m(x_i, beta) over a design matrix.
template <typename DerivedX, typename DerivedB>
Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1>
mean_function_rows(const Eigen::MatrixBase<DerivedX>& x, const Eigen::MatrixBase<DerivedB>& beta, Link link) {
    if (x.cols() != beta.size()) throw DimensionError("mean_function: covariate and coefficient lengths differ");
    Eigen::Matrix<typename DerivedX::Scalar, Eigen::Dynamic, 1> eta = x * beta;
    if (link == Link::Logistic) eta = eta.unaryExpr([](auto e) { return logistic(e); });
    return eta;
}

}  // namespace nonprob
