#pragma once

#include <Eigen/Dense>

#include "nonprob/propensity.hpp"
#include "nonprob/types.hpp"

namespace nonprob {

/// Unweighted least squares of y on the listed columns of sample A.
OutcomeFit fit_linear(const NonProbSample& a, const ColumnList& columns);

/// Bernoulli maximum likelihood for a 0/1 response by Newton-Raphson.
OutcomeFit fit_logistic_outcome(const NonProbSample& a, const ColumnList& columns, const NewtonOptions& opts = {});

/// Dispatches on `link`.
OutcomeFit fit_outcome(const NonProbSample& a, const ColumnList& columns, Link link, const NewtonOptions& opts = {});

/// Jointly estimated (theta, beta) for the KH estimator.
struct KhFit {
    Vector theta;
    Vector beta;
    ColumnList propensity_columns;
    ColumnList outcome_columns;
    Link link = Link::Linear;
    int iterations = 0;
    // Sup-norm of the stacked estimating equations divided by N.
    double residual_norm = 0.0;

    PropensityFit propensity_fit(const NonProbSample& a) const;
    OutcomeFit outcome_fit() const;
};

/// Stacked estimating equations (each divided by N) evaluated at (theta, beta).
///
/// With identical column sets the blocks are
///   sum_A (1/pi - 1)(y - m) x            (one row per propensity covariate)
///   sum_A mdot/pi - sum_B d mdot         (one row per outcome coefficient)
/// For a linear outcome over a different column set the first block uses the
/// outcome columns and the second calibrates the propensity columns, which
/// keeps the system square. First block first in the returned vector.
Vector kh_equations(const Vector& theta, const Vector& beta, const NonProbSample& a, const ProbSample& b,
                    double population_size, const ColumnList& propensity_columns,
                    const ColumnList& outcome_columns, Link link);

/// Newton on the stacked system with step halving on the squared residual
/// norm, started from the separate pseudo-likelihood and outcome fits.
KhFit fit_kh_joint(const NonProbSample& a, const ProbSample& b, double population_size,
                   const ColumnList& propensity_columns, const ColumnList& outcome_columns, Link link = Link::Linear,
                   const NewtonOptions& opts = {});

/// Same columns for both models (every non-intercept column of sample A).
KhFit fit_kh_joint(const NonProbSample& a, const ProbSample& b, double population_size,
                   const NewtonOptions& opts = {});

}  // namespace nonprob
