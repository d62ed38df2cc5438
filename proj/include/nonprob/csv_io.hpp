#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "nonprob/types.hpp"

namespace nonprob {

/// Header row plus raw cells. Rows are 1-based in error messages and exclude the header.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const;  // throws SchemaError
    Vector numeric(std::string_view name) const;      // throws SchemaError naming the row
};

CsvTable parse_csv(std::string_view text, std::string_view source = "<memory>");
CsvTable read_csv(const std::filesystem::path& path);

/// Sample A from a CSV with a response column and the named covariates.
NonProbSample load_sample_a(const CsvTable& t, std::string_view y, const ColumnList& covariates);
/// Sample B from a CSV with the named covariates and a positive weight column.
ProbSample load_sample_b(const CsvTable& t, const ColumnList& covariates, std::string_view weight,
                         Design design = {});

/// Columns: every covariate name then `y`. Values printed with round-trip precision.
void write_sample_a_csv(const std::filesystem::path& path, const NonProbSample& a, std::string_view y = "y");
/// Columns: every covariate name then `weight`.
void write_sample_b_csv(const std::filesystem::path& path, const ProbSample& b, std::string_view weight = "weight");

}  // namespace nonprob
