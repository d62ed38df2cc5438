#include "nonprob/types.hpp"

#include <algorithm>
#include <cctype>
#include <array>
#include <cmath>
#include <string>

#include "nonprob/errors.hpp"

namespace nonprob {

namespace {

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        if (!m.row(i).allFinite()) {
            throw DomainError(std::string(what) + ": non-finite value in row " + std::to_string(i + 1));
        }
    }
}

}  // namespace

Covariates::Covariates(ColumnList names, Matrix x) : names_(std::move(names)), x_(std::move(x)) {
    if (x_.cols() < 1) throw DimensionError("covariates: intercept column required");
    if (static_cast<Eigen::Index>(names_.size()) + 1 != x_.cols()) {
        throw DimensionError("covariates: " + std::to_string(names_.size()) + " names for " +
                             std::to_string(x_.cols() - 1) + " non-intercept columns");
    }
    require_finite(x_, "covariates");
    if ((x_.col(0).array() != 1.0).any()) throw DomainError("covariates: first column must be identically 1");
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == kInterceptName) throw DimensionError("covariates: intercept named as a regular column");
        if (std::find(names_.begin() + i + 1, names_.end(), names_[i]) != names_.end()) {
            throw DimensionError("covariates: duplicate column '" + names_[i] + "'");
        }
    }
}

bool Covariates::has(std::string_view name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

Eigen::Index Covariates::index_of(std::string_view name) const {
    auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw DimensionError("covariates: no column named '" + std::string(name) + "'");
    return static_cast<Eigen::Index>(it - names_.begin()) + 1;
}

Matrix Covariates::design(const ColumnList& columns) const {
    Matrix out(x_.rows(), static_cast<Eigen::Index>(columns.size()) + 1);
    out.col(0) = x_.col(0);
    for (std::size_t j = 0; j < columns.size(); ++j) {
        out.col(static_cast<Eigen::Index>(j) + 1) = x_.col(index_of(columns[j]));
    }
    return out;
}

FinitePopulation::FinitePopulation(Covariates x, Vector y) : covariates(std::move(x)), responses(std::move(y)) {
    if (responses.size() < 1) throw DimensionError("population: N must be at least 1");
    if (covariates.rows() != responses.size()) throw DimensionError("population: row count differs from response length");
    require_finite(responses, "population responses");
}

NonProbSample::NonProbSample(Covariates x, Vector y) : x_(std::move(x)), y_(std::move(y)) {
    if (y_.size() < 1) throw DimensionError("sample A: empty");
    if (x_.rows() != y_.size()) throw DimensionError("sample A: row count differs from response length");
    require_finite(y_, "sample A responses");
}

ProbSample::ProbSample(Covariates x, Vector weights, std::optional<Vector> inclusion_probs, Design design)
    : x_(std::move(x)), d_(std::move(weights)), pi_(std::move(inclusion_probs)), design_(std::move(design)) {
    const Eigen::Index n = d_.size();
    if (n < 1) throw DimensionError("sample B: empty");
    if (x_.rows() != n) throw DimensionError("sample B: row count differs from weight length");
    require_finite(d_, "sample B weights");
    if ((d_.array() <= 0.0).any()) throw DomainError("sample B: design weights must be positive");
    if (pi_) {
        if (pi_->size() != n) throw DimensionError("sample B: inclusion probability length differs");
        require_finite(*pi_, "sample B inclusion probabilities");
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = (*pi_)(i);
            if (!(p > 0.0 && p <= 1.0)) throw DomainError("sample B: inclusion probability outside (0,1]");
            if (std::abs(d_(i) * p - 1.0) > 1e-9) {
                throw DomainError("sample B: weight and inclusion probability disagree in row " + std::to_string(i + 1));
            }
        }
    }
    if (design_.kind == DesignKind::GeneralWithJointProbs) {
        if (!design_.joint_probs) throw DomainError("sample B: joint-probability design without the matrix");
        const Matrix& j = *design_.joint_probs;
        if (j.rows() != n || j.cols() != n) throw DimensionError("sample B: joint-probability matrix must be n_B x n_B");
        if ((j - j.transpose()).cwiseAbs().maxCoeff() > 1e-12) {
            throw DomainError("sample B: joint-probability matrix not symmetric");
        }
        const Vector p = first_order_probs();
        if ((j.diagonal() - p).cwiseAbs().maxCoeff() > 1e-9) {
            throw DomainError("sample B: joint-probability diagonal differs from first-order probabilities");
        }
    } else if (design_.joint_probs) {
        throw DomainError("sample B: joint probabilities supplied for a design that does not use them");
    }
}

Vector ProbSample::first_order_probs() const {
    if (pi_) return *pi_;
    return d_.cwiseInverse();
}

Vector PropensityFit::propensities(const Covariates& x) const {
    const Vector eta = x.design(columns) * theta;
    return eta.unaryExpr([](double e) { return logistic(e); });
}

Vector OutcomeFit::predict(const Covariates& x) const {
    return mean_function_rows(x.design(columns), beta, link);
}

namespace {
constexpr std::array<std::pair<Method, std::string_view>, 10> kMethodNames{{
    {Method::Naive, "naive"},
    {Method::C1, "c1"},
    {Method::C2, "c2"},
    {Method::IPW1, "ipw1"},
    {Method::IPW2, "ipw2"},
    {Method::REG, "reg"},
    {Method::SM, "sm"},
    {Method::DR1, "dr1"},
    {Method::DR2, "dr2"},
    {Method::KH, "kh"},
}};
}  // namespace

std::string_view to_string(Method m) {
    for (const auto& [k, name] : kMethodNames) {
        if (k == m) return name;
    }
    return "unknown";
}

std::optional<Method> parse_method(std::string_view s) {
    std::string lower(s);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    for (const auto& [k, name] : kMethodNames) {
        if (name == lower) return k;
    }
    return std::nullopt;
}

}  // namespace nonprob
