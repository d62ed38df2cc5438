#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nonprob/estimators.hpp"
#include "nonprob/propensity.hpp"
#include "nonprob/types.hpp"

namespace nonprob {

struct EstimateConfig {
    std::string y = "y";
    ColumnList propensity_columns;
    ColumnList outcome_columns;
    // Matching columns for SM; empty means the outcome columns.
    ColumnList match_columns;
    std::string weight = "weight";
    std::optional<double> population_size;
    std::vector<Method> estimators{Method::IPW2, Method::DR2};
    bool plugin_variance = true;
    bool kh_variance = false;
    Link outcome_link = Link::Linear;
    DesignKind design = DesignKind::Unspecified;
    MatchOptions matching;
    NewtonOptions newton;
    double level = 0.95;

    /// Every covariate either model or the matcher reads, in first-seen order.
    ColumnList all_columns() const;
};

/// One report per requested estimator, in request order. IPW1, IPW2 and DR2
/// carry plug-in variances when `plugin_variance` is set; KH carries the
/// doubly robust variance when `kh_variance` is set.
///
/// Throws UsageError when an estimator needing N (IPW1, DR1, KH, C1) is
/// requested without it.
std::vector<EstimateReport> run_estimate(const NonProbSample& a, const ProbSample& b, const EstimateConfig& cfg);
std::vector<EstimateReport> run_estimate(const std::filesystem::path& sample_a, const std::filesystem::path& sample_b,
                                         const EstimateConfig& cfg);

/// JSON document {"reports": [...]} matching schema/estimate_report.schema.json.
std::string reports_json(const std::vector<EstimateReport>& reports);

}  // namespace nonprob
