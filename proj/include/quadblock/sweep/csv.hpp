// csv.hpp: CSV output of sweep results.
//
// Layout: '#'-prefixed provenance lines, one header row, one row per sweep
// point. Numbers use the shortest round-trip representation with '.' as the
// decimal mark; absent values are empty cells. Complex diagnostics are
// written as "re+imi" / "re-imi".

#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "quadblock/error.hpp"
#include "quadblock/sweep/config.hpp"
#include "quadblock/sweep/run.hpp"

namespace quadblock::sweep {

inline std::vector<std::string> csv_columns(Variable v) {
    if (v == Variable::tau) {
        return {"sweep_value", "g2_21_tau", "g2_12_tau", "cutoff_photon", "cutoff_phonon",
                "residual_21", "residual_12", "status"};
    }
    return {"sweep_value", "T21", "T12", "isolation_db", "g2_21_zero", "g2_12_zero", "n_L", "n_R",
            "cutoff_photon", "cutoff_phonon", "residual_21", "residual_12", "mean_a_L", "mean_a_R", "status"};
}

namespace detail {

inline std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

inline std::string complex_cell(const std::optional<Complex>& v) {
    if (!v) return {};
    const double im = v->imag();
    std::string out = format_double(v->real());
    if (std::signbit(im)) out += "-" + format_double(-im) + "i";
    else out += "+" + format_double(im) + "i";
    return out;
}

// Quotes fields containing separators (error messages in `status`).
inline std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += "\"\"";
        else if (ch == '\n') out += ' ';
        else out += ch;
    }
    return out + "\"";
}

} // namespace detail

inline void write_data_rows(std::ostream& out, const SweepResult& r) {
    using detail::cell;
    const auto cols = csv_columns(r.variable);
    for (std::size_t k = 0; k < cols.size(); ++k) out << (k ? "," : "") << cols[k];
    out << '\n';
    for (const auto& row : r.rows) {
        std::vector<std::string> f;
        f.push_back(detail::format_double(row.sweep_value));
        if (r.variable == Variable::tau) {
            f.push_back(cell(row.g2_21_tau));
            f.push_back(cell(row.g2_12_tau));
        } else {
            f.push_back(cell(row.T21));
            f.push_back(cell(row.T12));
            f.push_back(cell(row.isolation_db));
            f.push_back(cell(row.g2_21_zero));
            f.push_back(cell(row.g2_12_zero));
            f.push_back(cell(row.n_L));
            f.push_back(cell(row.n_R));
        }
        f.push_back(std::to_string(row.cutoff_photon));
        f.push_back(std::to_string(row.cutoff_phonon));
        f.push_back(cell(row.residual_21));
        f.push_back(cell(row.residual_12));
        if (r.variable != Variable::tau) {
            f.push_back(detail::complex_cell(row.mean_a_L));
            f.push_back(detail::complex_cell(row.mean_a_R));
        }
        f.push_back(detail::quote(row.status));
        for (std::size_t k = 0; k < f.size(); ++k) out << (k ? "," : "") << f[k];
        out << '\n';
    }
}

inline void write_csv(std::ostream& out, const SweepResult& r) {
    out << "# quadblock " << r.provenance.version << '\n';
    out << "# config_hash " << r.provenance.config_hash << '\n';
    out << "# timestamp " << r.provenance.timestamp << '\n';
    out << "# sweep_variable " << to_string(r.variable) << '\n';
    write_data_rows(out, r);
}

inline void write_csv_file(const std::string& path, const SweepResult& r) {
    std::ofstream out(path);
    if (!out) throw Error(ErrorCode::configuration, "cannot write '" + path + "'");
    write_csv(out, r);
}

// Minimal reader for the files written above: header names plus string cells
// of each data row, provenance lines skipped.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(const std::string& name) const {
        for (std::size_t k = 0; k < header.size(); ++k) {
            if (header[k] == name) return k;
        }
        throw Error(ErrorCode::config_parse, "no column '" + name + "'");
    }
};

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (quoted) {
            if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

inline CsvTable read_csv(std::istream& in) {
    CsvTable t;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (t.header.empty()) t.header = split_csv_line(line);
        else t.rows.push_back(split_csv_line(line));
    }
    return t;
}

} // namespace quadblock::sweep
