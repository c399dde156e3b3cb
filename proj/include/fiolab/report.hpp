#pragma once

// Report emission and parsing for experiment results.
//
// CSV layout (fixed contract):
//   n,fl_in,fl_out,mp_in,mp_out,ratio
//   <data rows, ratio = fl_out / fl_in>
//   fitted_exponent,<v>
//   theory_exponent,<v>
//   residual,<v>
//   grid,d=<d> N=<N> L=<L>
//   p,<v>
//   m,<v>
//
// JSON mirrors the same fields. Numbers carry 12 significant digits in both
// formats, and the output is byte-identical for identical inputs (no locale,
// clock or pointer dependence).

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "fiolab/sharpness.hpp"

namespace fiolab {

enum class ReportFormat { csv, json };

namespace detail {

inline std::string num12(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace detail

inline std::string grid_descriptor(const GridSpec& g) {
    return "d=" + std::to_string(g.dim) + " N=" + std::to_string(g.samples) +
           " L=" + detail::num12(g.half_width);
}

inline std::string render_report(const ExperimentResult& r, ReportFormat format) {
    if (r.rows.empty()) throw std::invalid_argument("render_report: empty result rows");
    std::ostringstream out;
    if (format == ReportFormat::csv) {
        out << "n,fl_in,fl_out,mp_in,mp_out,ratio\n";
        for (const ExperimentRow& row : r.rows) {
            out << row.n << ',' << detail::num12(row.fl_in) << ',' << detail::num12(row.fl_out)
                << ',' << detail::num12(row.mp_in) << ',' << detail::num12(row.mp_out) << ','
                << detail::num12(row.fl_out / row.fl_in) << '\n';
        }
        out << "fitted_exponent," << detail::num12(r.fitted_exponent) << '\n';
        out << "theory_exponent," << detail::num12(r.theory_exponent) << '\n';
        out << "residual," << detail::num12(r.fit_residual) << '\n';
        out << "grid," << grid_descriptor(r.grid) << '\n';
        out << "p," << detail::num12(r.p) << '\n';
        out << "m," << detail::num12(r.m) << '\n';
        return out.str();
    }
    out << "{\n  \"rows\": [\n";
    for (std::size_t i = 0; i < r.rows.size(); ++i) {
        const ExperimentRow& row = r.rows[i];
        out << "    {\"n\": " << row.n << ", \"fl_in\": " << detail::num12(row.fl_in)
            << ", \"fl_out\": " << detail::num12(row.fl_out)
            << ", \"mp_in\": " << detail::num12(row.mp_in)
            << ", \"mp_out\": " << detail::num12(row.mp_out)
            << ", \"ratio\": " << detail::num12(row.fl_out / row.fl_in) << '}'
            << (i + 1 < r.rows.size() ? "," : "") << '\n';
    }
    out << "  ],\n";
    out << "  \"fitted_exponent\": " << detail::num12(r.fitted_exponent) << ",\n";
    out << "  \"theory_exponent\": " << detail::num12(r.theory_exponent) << ",\n";
    out << "  \"residual\": " << detail::num12(r.fit_residual) << ",\n";
    out << "  \"grid\": {\"d\": " << r.grid.dim << ", \"N\": " << r.grid.samples
        << ", \"L\": " << detail::num12(r.grid.half_width) << "},\n";
    out << "  \"p\": " << detail::num12(r.p) << ",\n";
    out << "  \"m\": " << detail::num12(r.m) << "\n}\n";
    return out.str();
}

inline void write_report(const ExperimentResult& r, const std::string& path,
                         ReportFormat format) {
    const std::string body = render_report(r, format);  // validate before touching the file
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("write_report: cannot open " + path);
    f << body;
    if (!f) throw std::runtime_error("write_report: failed writing " + path);
}

inline ExperimentResult parse_report(const std::string& text, ReportFormat format) {
    ExperimentResult r;
    if (format == ReportFormat::json) {
        const nlohmann::json j = nlohmann::json::parse(text);
        for (const auto& jr : j.at("rows")) {
            ExperimentRow row;
            row.n = jr.at("n").get<int>();
            row.fl_in = jr.at("fl_in").get<double>();
            row.fl_out = jr.at("fl_out").get<double>();
            row.mp_in = jr.at("mp_in").get<double>();
            row.mp_out = jr.at("mp_out").get<double>();
            r.rows.push_back(row);
        }
        r.fitted_exponent = j.at("fitted_exponent").get<double>();
        r.theory_exponent = j.at("theory_exponent").get<double>();
        r.fit_residual = j.at("residual").get<double>();
        r.grid = GridSpec(j.at("grid").at("d").get<int>(), j.at("grid").at("N").get<int>(),
                          j.at("grid").at("L").get<double>());
        r.dim = r.grid.dim;
        r.p = j.at("p").get<double>();
        r.m = j.at("m").get<double>();
        return r;
    }

    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "n,fl_in,fl_out,mp_in,mp_out,ratio")
        throw std::invalid_argument("parse_report: bad CSV header");
    int d = 1, n_samples = 8;
    double half_width = 1.0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos) throw std::invalid_argument("parse_report: bad CSV line");
        const std::string key = line.substr(0, comma);
        const std::string rest = line.substr(comma + 1);
        if (key == "fitted_exponent") {
            r.fitted_exponent = std::stod(rest);
        } else if (key == "theory_exponent") {
            r.theory_exponent = std::stod(rest);
        } else if (key == "residual") {
            r.fit_residual = std::stod(rest);
        } else if (key == "grid") {
            if (std::sscanf(rest.c_str(), "d=%d N=%d L=%lf", &d, &n_samples, &half_width) != 3)
                throw std::invalid_argument("parse_report: bad grid descriptor");
        } else if (key == "p") {
            r.p = std::stod(rest);
        } else if (key == "m") {
            r.m = std::stod(rest);
        } else {
            ExperimentRow row;
            double ratio;
            if (std::sscanf(line.c_str(), "%d,%lf,%lf,%lf,%lf,%lf", &row.n, &row.fl_in,
                            &row.fl_out, &row.mp_in, &row.mp_out, &ratio) != 6)
                throw std::invalid_argument("parse_report: bad CSV data row: " + line);
            r.rows.push_back(row);
        }
    }
    if (r.rows.empty()) throw std::invalid_argument("parse_report: no data rows");
    r.grid = GridSpec(d, n_samples, half_width);
    r.dim = d;
    return r;
}

}  // namespace fiolab
