#include "nonprob/csv_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

#include "nonprob/errors.hpp"

namespace nonprob {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

// Splits one record; double quotes may wrap a field and "" escapes a quote.
std::vector<std::string> split_record(std::string_view line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            out.emplace_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.emplace_back(trim(cur));
    return out;
}

}  // namespace

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == name) return j;
    }
    throw SchemaError("missing column '" + std::string(name) + "'");
}

Vector CsvTable::numeric(std::string_view name) const {
    const std::size_t j = column(name);
    Vector v(static_cast<Eigen::Index>(rows.size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const std::string& cell = rows[i][j];
        const char* first = cell.data();
        const char* last = cell.data() + cell.size();
        if (!cell.empty() && *first == '+') ++first;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
            throw SchemaError(fmt::format("row {}: column '{}' is not a finite number: '{}'", i + 1, name, cell),
                              static_cast<long>(i + 1));
        }
        v(static_cast<Eigen::Index>(i)) = value;
    }
    return v;
}

CsvTable parse_csv(std::string_view text, std::string_view source) {
    if (text.size() >= 3 && text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    CsvTable t;
    std::size_t pos = 0;
    long line_no = 0;
    bool have_header = false;
    while (pos <= text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (trim(line).empty()) {
            if (pos > text.size()) break;
            continue;
        }
        auto fields = split_record(line);
        if (!have_header) {
            t.header = std::move(fields);
            for (std::size_t j = 0; j < t.header.size(); ++j) {
                if (t.header[j].empty()) throw SchemaError(fmt::format("{}: empty column name in header", source));
                for (std::size_t k = 0; k < j; ++k) {
                    if (t.header[k] == t.header[j]) {
                        throw SchemaError(fmt::format("{}: duplicate column '{}'", source, t.header[j]));
                    }
                }
            }
            have_header = true;
        } else {
            const long row = static_cast<long>(t.rows.size()) + 1;
            if (fields.size() != t.header.size()) {
                throw SchemaError(fmt::format("{}: row {} (line {}) has {} fields, header has {}", source, row, line_no,
                                              fields.size(), t.header.size()),
                                  row);
            }
            t.rows.push_back(std::move(fields));
        }
        if (pos > text.size()) break;
    }
    if (!have_header) throw SchemaError(fmt::format("{}: missing header row", source));
    return t;
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw SchemaError("cannot open " + path.string());
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_csv(ss.str(), path.string());
}

namespace {

Covariates covariates_from(const CsvTable& t, const ColumnList& names) {
    Matrix x(static_cast<Eigen::Index>(t.rows.size()), static_cast<Eigen::Index>(names.size()) + 1);
    x.col(0).setOnes();
    for (std::size_t j = 0; j < names.size(); ++j) x.col(static_cast<Eigen::Index>(j) + 1) = t.numeric(names[j]);
    return Covariates(names, std::move(x));
}

}  // namespace

NonProbSample load_sample_a(const CsvTable& t, std::string_view y, const ColumnList& covariates) {
    if (t.rows.empty()) throw SchemaError("sample A has no data rows");
    return NonProbSample(covariates_from(t, covariates), t.numeric(y));
}

ProbSample load_sample_b(const CsvTable& t, const ColumnList& covariates, std::string_view weight, Design design) {
    if (t.rows.empty()) throw SchemaError("sample B has no data rows");
    Vector d = t.numeric(weight);
    for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (!(d(i) > 0.0)) {
            throw SchemaError(fmt::format("row {}: weight column '{}' must be positive", i + 1, weight),
                              static_cast<long>(i + 1));
        }
    }
    std::optional<Vector> pi;
    if (design.kind == DesignKind::Poisson) pi = d.cwiseInverse();
    return ProbSample(covariates_from(t, covariates), std::move(d), std::move(pi), std::move(design));
}

namespace {

void write_table(const std::filesystem::path& path, const ColumnList& names, const Matrix& x, std::string_view extra,
                 const Vector& last) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    std::string out;
    for (const auto& n : names) out += n + ",";
    out += std::string(extra) + "\n";
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 1; j < x.cols(); ++j) out += fmt::format("{:.17g},", x(i, j));
        out += fmt::format("{:.17g}\n", last(i));
    }
    f << out;
}

}  // namespace

void write_sample_a_csv(const std::filesystem::path& path, const NonProbSample& a, std::string_view y) {
    write_table(path, a.covariates().names(), a.covariates().matrix(), y, a.responses());
}

void write_sample_b_csv(const std::filesystem::path& path, const ProbSample& b, std::string_view weight) {
    write_table(path, b.covariates().names(), b.covariates().matrix(), weight, b.weights());
}

}  // namespace nonprob
