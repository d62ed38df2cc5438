#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "nonprob/link.hpp"

namespace nonprob {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ColumnList = std::vector<std::string>;

inline constexpr std::string_view kInterceptName = "(Intercept)";

/// Named covariate matrix whose first column is the intercept (all ones).
///
/// Column selection is by name. The intercept is always kept, so a selection
/// lists only the non-intercept columns.
class Covariates {
public:
    Covariates() = default;
    /// `names` lists the non-intercept columns; `x` carries the intercept in column 0.
    Covariates(ColumnList names, Matrix x);

    Eigen::Index rows() const noexcept { return x_.rows(); }
    Eigen::Index cols() const noexcept { return x_.cols(); }
    const Matrix& matrix() const noexcept { return x_; }
    const ColumnList& names() const noexcept { return names_; }

    bool has(std::string_view name) const;
    /// Matrix column index of `name` (>= 1); throws DimensionError when absent.
    Eigen::Index index_of(std::string_view name) const;
    /// Intercept followed by the listed columns in the listed order.
    Matrix design(const ColumnList& columns) const;

private:
    ColumnList names_;
    Matrix x_;
};

/// Finite population frame used by the simulator.
struct FinitePopulation {
    Covariates covariates;
    Vector responses;

    FinitePopulation() = default;
    FinitePopulation(Covariates x, Vector y);
    Eigen::Index size() const noexcept { return responses.size(); }
    double mean() const { return responses.mean(); }
};

/// Sample A: covariates and responses, no design weights.
class NonProbSample {
public:
    NonProbSample() = default;
    NonProbSample(Covariates x, Vector y);

    Eigen::Index size() const noexcept { return y_.size(); }
    const Covariates& covariates() const noexcept { return x_; }
    const Vector& responses() const noexcept { return y_; }

private:
    Covariates x_;
    Vector y_;
};

enum class DesignKind {
    Poisson,
    SRS,
    GeneralWithJointProbs,
    // No design descriptor supplied; variance falls back to the with-replacement approximation.
    Unspecified,
};

struct Design {
    DesignKind kind = DesignKind::Unspecified;
    // Symmetric n_B x n_B second-order inclusion probabilities (GeneralWithJointProbs only).
    std::optional<Matrix> joint_probs;
};

/// Sample B: covariates with design weights d = 1/pi.
class ProbSample {
public:
    ProbSample() = default;
    ProbSample(Covariates x, Vector weights, std::optional<Vector> inclusion_probs = std::nullopt,
               Design design = {});

    Eigen::Index size() const noexcept { return d_.size(); }
    const Covariates& covariates() const noexcept { return x_; }
    const Vector& weights() const noexcept { return d_; }
    const std::optional<Vector>& inclusion_probs() const noexcept { return pi_; }
    const Design& design() const noexcept { return design_; }
    /// Supplied inclusion probabilities, or 1/d when absent.
    Vector first_order_probs() const;
    double population_size_estimate() const { return d_.sum(); }

private:
    Covariates x_;
    Vector d_;
    std::optional<Vector> pi_;
    Design design_;
};

struct PropensityFit {
    ColumnList columns;
    Vector theta;
    bool converged = false;
    int iterations = 0;
    // Sup-norm of the score divided by n_A at the returned theta.
    double final_score_norm = 0.0;
    Vector pi_A_hat;

    /// pi(x_i, theta) for every row of `x`, using this fit's columns.
    Vector propensities(const Covariates& x) const;
};

struct OutcomeFit {
    ColumnList columns;
    Vector beta;
    Link link = Link::Linear;

    Vector predict(const Covariates& x) const;
};

enum class Method { Naive, C1, C2, IPW1, IPW2, REG, SM, DR1, DR2, KH };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);

struct EstimateReport {
    Method method = Method::Naive;
    double point = 0.0;
    std::optional<double> variance;
    std::optional<double> ci_lower;
    std::optional<double> ci_upper;
    Eigen::Index n_a = 0;
    Eigen::Index n_b = 0;
};

}  // namespace nonprob
