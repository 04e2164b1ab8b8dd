#include "wsv/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "wsv/error.hpp"

namespace wsv {

std::string format_double(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> CsvTable::column(const std::string& name) const {
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c] == name) {
            std::vector<double> out;
            out.reserve(rows.size());
            for (const auto& row : rows) {
                out.push_back(row[c]);
            }
            return out;
        }
    }
    fail(ErrorKind::Structural, "csv: no column '" + name + "'");
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        fail(ErrorKind::Domain, "cannot open '" + path + "' for writing");
    }
    out << text;
    if (!out) {
        fail(ErrorKind::Domain, "write to '" + path + "' failed");
    }
}

void write_csv(const std::string& path, const CsvTable& table,
               const std::vector<std::string>& preamble) {
    std::ostringstream out;
    for (const auto& line : preamble) {
        out << "# " << line << '\n';
    }
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        out << (c ? "," : "") << table.columns[c];
    }
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            out << (c ? "," : "") << format_double(row[c]);
        }
        out << '\n';
    }
    write_text(path, out.str());
}

CsvTable read_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorKind::Domain, "cannot open '" + path + "'");
    }
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty() || line[0] == '#') {
            continue;
        }
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            cells.push_back(cell);
        }
        if (!have_header) {
            table.columns = std::move(cells);
            have_header = true;
            continue;
        }
        if (cells.size() != table.columns.size()) {
            fail(ErrorKind::Structural, "csv '" + path + "': ragged row");
        }
        std::vector<double> row;
        for (const auto& c : cells) {
            char* end = nullptr;
            const double v = std::strtod(c.c_str(), &end);
            if (end == c.c_str() || *end != '\0') {
                fail(ErrorKind::Structural, "csv '" + path + "': bad number '" + c + "'");
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) {
        fail(ErrorKind::Structural, "csv '" + path + "': missing header");
    }
    return table;
}

CsvTable bound_table(const BoundReport& report) {
    CsvTable t{{"t", "theta", "theta_n", "bound", "majorant", "margin"}, {}};
    const GridSpec& spec = report.theta.spec();
    for (std::size_t i = 0; i <= spec.n_points(); ++i) {
        t.rows.push_back({spec.horizon_time(i), report.theta.at(i), report.theta_n.at(i),
                          report.bound.at(i), report.majorant.at(i), report.margin.at(i)});
    }
    return t;
}

std::vector<std::string> bound_constants(const Certification& cert) {
    const BoundReport& r = cert.report;
    std::vector<std::string> lines = {
        "K = " + format_double(r.k),
        "K0 = " + format_double(r.k0),
        "K1 = " + format_double(r.k1),
        "nu1 = " + format_double(r.nu1),
        "C = " + format_double(r.c),
        "n = " + std::to_string(r.n),
        "min_margin = " + format_double(r.min_margin()),
        "tolerance = " + format_double(cert.tolerance),
    };
    for (std::size_t k = 0; k < r.k_steps.size(); ++k) {
        lines.push_back("k_steps[" + std::to_string(k) + "] = " + format_double(r.k_steps[k]));
    }
    lines.push_back(std::string("verdict = ") + (cert.pass ? "pass" : "fail"));
    return lines;
}

CsvTable solution_table(const VectorGridFunction& xi) {
    CsvTable t{{"t"}, {}};
    for (std::size_t c = 0; c < xi.dim(); ++c) {
        t.columns.push_back("xi_" + std::to_string(c + 1));
    }
    const GridSpec& spec = xi.spec();
    for (std::size_t i = 0; i <= spec.n_points(); ++i) {
        std::vector<double> row = {spec.horizon_time(i)};
        for (double v : xi.at(i)) {
            row.push_back(v);
        }
        t.rows.push_back(std::move(row));
    }
    return t;
}

VectorGridFunction solution_from_table(const CsvTable& table, const GridSpec& spec) {
    if (table.columns.size() < 2 || table.columns[0] != "t") {
        fail(ErrorKind::Structural, "solution table: expected columns t, xi_1, ...");
    }
    if (table.rows.size() != spec.n_points() + 1) {
        fail(ErrorKind::Structural, "solution table: row count does not match the grid");
    }
    const std::size_t d = table.columns.size() - 1;
    std::vector<double> v;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        if (std::abs(row[0] - spec.horizon_time(i)) > 1e-12 * (1.0 + spec.t_end())) {
            fail(ErrorKind::Structural, "solution table: times do not match the grid");
        }
        v.insert(v.end(), row.begin() + 1, row.end());
    }
    return VectorGridFunction(spec, d, std::move(v));
}

CsvTable blowup_table(const BlowupReport& report) {
    CsvTable t{{"epsilon", "lower_bound", "xi_near_1", "resolution"}, {}};
    for (const auto& row : report.rows) {
        t.rows.push_back({row.epsilon, row.lower_bound, row.xi_near_1, row.resolution});
    }
    return t;
}

std::string check_report(const std::vector<CheckRecord>& records) {
    std::ostringstream out;
    std::size_t passed = 0;
    for (std::size_t k = 0; k < records.size(); ++k) {
        const CheckRecord& r = records[k];
        out << "[" << k << "] " << r.name << '\n';
        out << "  lhs = " << format_double(r.lhs) << '\n';
        out << "  rhs = " << format_double(r.rhs) << '\n';
        for (const auto& [key, value] : r.constants) {
            out << "  " << key << " = " << format_double(value) << '\n';
        }
        out << "  verdict = " << (r.pass ? "pass" : "fail") << '\n';
        passed += r.pass ? 1 : 0;
    }
    out << "summary = " << passed << "/" << records.size() << " passed\n";
    return out.str();
}

}  // namespace wsv
