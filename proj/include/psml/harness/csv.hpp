#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "psml/harness/runner.hpp"

namespace psml {

inline constexpr const char* kCsvHeader =
    "sweep_var,sweep_value,estimator,psi_bias,psi_bias_se,psmse,psmse_se,runtime_ms,"
    "fail_rate,crb";

namespace csv_detail {

inline std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace csv_detail

/// One row per (sweep point, estimator), '.' decimal, stable column order.
/// The runtime and crb cells are empty when not computed.
inline std::string report_to_csv(const ExperimentReport& report) {
    using csv_detail::num;
    std::ostringstream out;
    out << kCsvHeader << "\n";
    const std::string var = sweep_name(report.config.sweep_var);
    for (const auto& cell : report.cells) {
        out << var << ',' << num(cell.sweep_value) << ',' << cell.estimator << ','
            << num(cell.psi_bias) << ',' << num(cell.psi_bias_se) << ',' << num(cell.psmse)
            << ',' << num(cell.psmse_se) << ',';
        if (cell.has_runtime) out << num(cell.runtime_ms);
        out << ',' << num(cell.fail_rate) << ',';
        if (cell.has_crb) out << num(cell.crb);
        out << "\n";
    }
    return out.str();
}

inline void emit_csv(const ExperimentReport& report, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path);
    f << report_to_csv(report);
    if (!f) throw std::runtime_error("emit_csv: write failed for " + path);
}

struct CsvRow {
    std::string sweep_var;
    double sweep_value = 0.0;
    std::string estimator;
    double psi_bias = 0.0;
    double psi_bias_se = 0.0;
    double psmse = 0.0;
    double psmse_se = 0.0;
    double runtime_ms = 0.0;
    bool has_runtime = false;
    double fail_rate = 0.0;
    double crb = 0.0;
    bool has_crb = false;
};

/// Strict parser for the emitted schema (used by the round-trip tests and
/// any downstream tooling that prefers typed access).
inline std::vector<CsvRow> parse_csv(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != kCsvHeader) {
        throw std::runtime_error("parse_csv: unexpected header");
    }
    std::vector<CsvRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::string field;
        std::istringstream ls(line);
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (line.back() == ',') fields.push_back("");
        if (fields.size() != 10) throw std::runtime_error("parse_csv: bad row: " + line);
        CsvRow r;
        r.sweep_var = fields[0];
        r.sweep_value = std::stod(fields[1]);
        r.estimator = fields[2];
        r.psi_bias = std::stod(fields[3]);
        r.psi_bias_se = std::stod(fields[4]);
        r.psmse = std::stod(fields[5]);
        r.psmse_se = std::stod(fields[6]);
        r.has_runtime = !fields[7].empty();
        if (r.has_runtime) r.runtime_ms = std::stod(fields[7]);
        r.fail_rate = std::stod(fields[8]);
        r.has_crb = !fields[9].empty();
        if (r.has_crb) r.crb = std::stod(fields[9]);
        rows.push_back(std::move(r));
    }
    return rows;
}

}  // namespace psml
