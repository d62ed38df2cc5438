#pragma once

#include <Eigen/Dense>

#include "nonprob/types.hpp"

namespace nonprob {

struct NewtonOptions {
    int max_iterations = 50;
    // Applied to the score sup-norm divided by the number of sample A rows.
    double tolerance = 1e-8;
    int step_halving_max = 20;

    void validate() const;
};

// Matrix-level evaluations. xa and xb share columns; db holds the sample B design weights.

/// l*(theta) = sum_A x'theta - sum_B d log(1 + exp(x'theta)).
double pseudo_loglik(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Matrix>& xa,
                     const Eigen::Ref<const Matrix>& xb, const Eigen::Ref<const Vector>& db);

/// U(theta) = sum_A x - sum_B d pi(x, theta) x.
Vector pseudo_score(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Matrix>& xa,
                    const Eigen::Ref<const Matrix>& xb, const Eigen::Ref<const Vector>& db);

/// H(theta) = sum_B d pi (1 - pi) x x', the negative Hessian of l*.
Matrix pseudo_information(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Matrix>& xb,
                          const Eigen::Ref<const Vector>& db);

// Sample-level forms over the listed propensity columns (intercept implied).
double pseudo_loglik(const Vector& theta, const NonProbSample& a, const ProbSample& b, const ColumnList& columns);
Vector pseudo_score(const Vector& theta, const NonProbSample& a, const ProbSample& b, const ColumnList& columns);
Matrix pseudo_information(const Vector& theta, const ProbSample& b, const ColumnList& columns);

/// Maximum pseudo-likelihood fit by Newton-Raphson from theta = 0.
///
/// A step that fails to increase l* is halved up to `step_halving_max` times.
/// Throws SingularMatrixError when H cannot be factored even after a small
/// ridge, and NotConvergedError when the iteration budget runs out, which is
/// what happens on separable inputs where l* has no finite maximizer.
PropensityFit fit_propensity(const NonProbSample& a, const ProbSample& b, const ColumnList& columns,
                             const NewtonOptions& opts = {});
/// Uses every non-intercept column of sample A.
PropensityFit fit_propensity(const NonProbSample& a, const ProbSample& b, const NewtonOptions& opts = {});

/// Unweighted logistic regression of the sample label (1 = A, 0 = B) on the
/// stacked rows. Its fitted probabilities are not valid propensity scores and
/// serve only as a negative control.
PropensityFit fit_naive_pooled(const NonProbSample& a, const ProbSample& b, const ColumnList& columns,
                               const NewtonOptions& opts = {});
PropensityFit fit_naive_pooled(const NonProbSample& a, const ProbSample& b, const NewtonOptions& opts = {});

/// Bernoulli log-likelihood score sum_i (y_i - pi_i) x_i.
Vector bernoulli_score(const Eigen::Ref<const Vector>& theta, const Eigen::Ref<const Matrix>& x,
                       const Eigen::Ref<const Vector>& y);

}  // namespace nonprob
