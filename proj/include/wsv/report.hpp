#pragma once

#include <string>
#include <vector>

#include "wsv/cases.hpp"
#include "wsv/check.hpp"
#include "wsv/gronwall.hpp"
#include "wsv/volterra.hpp"

namespace wsv {

/// Round-trip formatting (%.17g); inf and nan spelled as such.
std::string format_double(double v);

/// Numeric table; lines starting with '#' are comments and not part of it.
struct CsvTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Column by name; throws Structural when absent.
    std::vector<double> column(const std::string& name) const;
};

/// `preamble` lines are written first, each prefixed with "# ".
void write_csv(const std::string& path, const CsvTable& table,
               const std::vector<std::string>& preamble = {});
CsvTable read_csv(const std::string& path);

/// t, theta, theta_n, bound, majorant, margin on [0, T].
CsvTable bound_table(const BoundReport& report);
/// key = value lines: K, K0, K1, nu1, C, n, the step constants and the verdict.
std::vector<std::string> bound_constants(const Certification& cert);

/// t, xi_1 .. xi_n on [0, T].
CsvTable solution_table(const VectorGridFunction& xi);
/// Inverse of solution_table on a matching grid.
VectorGridFunction solution_from_table(const CsvTable& table, const GridSpec& spec);

/// epsilon, lower_bound, xi_near_1, resolution.
CsvTable blowup_table(const BlowupReport& report);

/// One block per record: name, lhs, rhs, constants, verdict.
std::string check_report(const std::vector<CheckRecord>& records);

void write_text(const std::string& path, const std::string& text);

}  // namespace wsv
