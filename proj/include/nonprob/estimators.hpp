#pragma once

#include <Eigen/Dense>

#include "nonprob/outcome.hpp"
#include "nonprob/types.hpp"

namespace nonprob {

/// Sample A mean.
double mu_naive(const NonProbSample& a);

// Inverse probability weighting with estimated propensities pi_hat on the A rows.
double mu_ipw1(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& pi_hat, double population_size);
double mu_ipw2(const Eigen::Ref<const Vector>& y, const Eigen::Ref<const Vector>& pi_hat);
double mu_ipw1(const NonProbSample& a, const Eigen::Ref<const Vector>& pi_hat, double population_size);
double mu_ipw2(const NonProbSample& a, const Eigen::Ref<const Vector>& pi_hat);

/// Hajek-weighted mean of predictions over sample B.
double mu_reg(const Eigen::Ref<const Vector>& db, const Eigen::Ref<const Vector>& m_b);
double mu_reg(const ProbSample& b, const OutcomeFit& fit);

struct MatchOptions {
    // Scale each matching column by its pooled (A and B) standard deviation.
    bool standardize = false;
};

/// For each B row, the index of the nearest A row on `columns` (Euclidean,
/// ties to the lowest index).
std::vector<Eigen::Index> nearest_donors(const NonProbSample& a, const ProbSample& b, const ColumnList& columns,
                                         const MatchOptions& opts = {});
double mu_sm_nn(const NonProbSample& a, const ProbSample& b, const ColumnList& columns, const MatchOptions& opts = {});

// Doubly robust estimators from residuals on A and predictions on B.
double mu_dr1(const Eigen::Ref<const Vector>& y_a, const Eigen::Ref<const Vector>& m_a,
              const Eigen::Ref<const Vector>& pi_hat, const Eigen::Ref<const Vector>& db,
              const Eigen::Ref<const Vector>& m_b, double population_size);
double mu_dr2(const Eigen::Ref<const Vector>& y_a, const Eigen::Ref<const Vector>& m_a,
              const Eigen::Ref<const Vector>& pi_hat, const Eigen::Ref<const Vector>& db,
              const Eigen::Ref<const Vector>& m_b);
double mu_dr1(const NonProbSample& a, const ProbSample& b, const Eigen::Ref<const Vector>& pi_hat,
              const OutcomeFit& fit, double population_size);
double mu_dr2(const NonProbSample& a, const ProbSample& b, const Eigen::Ref<const Vector>& pi_hat,
              const OutcomeFit& fit);

/// DR1 form evaluated at the jointly estimated (theta, beta).
double mu_kh(const NonProbSample& a, const ProbSample& b, const KhFit& fit, double population_size);

// Pooled-propensity negative controls.
double mu_c1(const NonProbSample& a, const ProbSample& b, double population_size, const ColumnList& columns);
double mu_c2(const NonProbSample& a, const ProbSample& b, const ColumnList& columns);

}  // namespace nonprob
