#include "grating/trace_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace grating {

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_traces_csv(std::ostream& out,
                      const std::vector<PulseTrace>& traces) {
    bool first = true;
    for (const auto& trace : traces) {
        if (!first) out << "\n";
        first = false;
        out << "# time_us,signal\n";
        for (std::size_t i = 0; i < trace.times.size(); ++i)
            out << format_double(trace.times[i]) << ','
                << format_double(trace.values[i]) << '\n';
    }
}

std::vector<PulseTrace> ingest_traces_stream(std::istream& in) {
    std::vector<PulseTrace> traces;
    PulseTrace current;
    bool in_block = false;
    std::string line;
    std::size_t line_no = 0;

    auto flush = [&] {
        if (in_block) {
            if (current.times.size() < 1)
                throw DataFormatError("trace block without samples near line " +
                                      std::to_string(line_no));
            traces.push_back(std::move(current));
            current = PulseTrace{};
            in_block = false;
        }
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            flush();
            continue;
        }
        if (line[0] == '#') {
            flush();
            in_block = true;
            current.metadata["time_unit"] = "us";
            continue;
        }
        if (!in_block)
            throw DataFormatError("line " + std::to_string(line_no) +
                                  ": sample before '# time_us,signal' header");
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw DataFormatError("line " + std::to_string(line_no) +
                                  ": expected 'time,value'");
        std::size_t pos_t = 0, pos_v = 0;
        double t, v;
        try {
            t = std::stod(line.substr(0, comma), &pos_t);
            v = std::stod(line.substr(comma + 1), &pos_v);
        } catch (const std::exception&) {
            throw DataFormatError("line " + std::to_string(line_no) +
                                  ": malformed number");
        }
        if (pos_t != comma || pos_v != line.size() - comma - 1)
            throw DataFormatError("line " + std::to_string(line_no) +
                                  ": trailing characters");
        if (!std::isfinite(t) || !std::isfinite(v))
            throw DataFormatError("line " + std::to_string(line_no) +
                                  ": non-finite sample");
        if (!current.times.empty() && t <= current.times.back())
            throw DataFormatError("line " + std::to_string(line_no) +
                                  ": time column must be strictly increasing");
        current.times.push_back(t);
        current.values.push_back(v);
    }
    flush();
    if (traces.empty()) throw DataFormatError("no trace blocks found");
    return traces;
}

std::vector<PulseTrace> ingest_traces(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataFormatError("cannot open trace file: " + path);
    return ingest_traces_stream(in);
}

void write_sweep_csv(std::ostream& out, const SweepTable& table) {
    out << "# sweep parameter: " << table.parameter << "\n";
    for (const auto& [key, value] : table.fixed)
        out << "# fixed " << key << " = " << value << "\n";
    out << "# param,fwhm_us,peak,energy,energy_numeric\n";
    for (const auto& row : table.rows)
        out << format_double(row.param) << ',' << format_double(row.fwhm_us)
            << ',' << format_double(row.peak) << ','
            << format_double(row.energy) << ','
            << format_double(row.energy_numeric) << '\n';
}

void read_sweep_columns(const std::string& path, const std::string& column,
                        std::vector<double>& params,
                        std::vector<double>& values) {
    static const std::vector<std::string> columns = {"fwhm_us", "peak",
                                                     "energy",
                                                     "energy_numeric"};
    const auto it = std::find(columns.begin(), columns.end(), column);
    if (it == columns.end())
        throw DataFormatError("unknown sweep column: " + column);
    const std::size_t col = 1 + (it - columns.begin());

    std::ifstream in(path);
    if (!in) throw DataFormatError("cannot open sweep file: " + path);
    params.clear();
    values.clear();
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw DataFormatError("line " + std::to_string(line_no) +
                                      ": malformed number");
            }
        }
        if (row.size() <= col)
            throw DataFormatError("line " + std::to_string(line_no) +
                                  ": too few columns");
        params.push_back(row[0]);
        values.push_back(row[col]);
    }
    if (params.empty()) throw DataFormatError("no data rows in " + path);
}

void write_polyline_svg(std::ostream& out, const std::vector<double>& x,
                        const std::vector<double>& y,
                        const std::string& x_label,
                        const std::string& y_label) {
    if (x.size() != y.size() || x.size() < 2)
        throw DataFormatError("svg plot needs >= 2 matching samples");
    const double width = 640, height = 480, margin = 60;
    const auto [xmin_it, xmax_it] = std::minmax_element(x.begin(), x.end());
    const auto [ymin_it, ymax_it] = std::minmax_element(y.begin(), y.end());
    const double xmin = *xmin_it, xmax = *xmax_it;
    const double ymin = std::min(*ymin_it, 0.0), ymax = *ymax_it;
    const double xspan = xmax > xmin ? xmax - xmin : 1.0;
    const double yspan = ymax > ymin ? ymax - ymin : 1.0;
    auto px = [&](double v) {
        return margin + (v - xmin) / xspan * (width - 2 * margin);
    };
    auto py = [&](double v) {
        return height - margin - (v - ymin) / yspan * (height - 2 * margin);
    };

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
        << "\" height=\"" << height << "\">\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << height - margin
        << "\" x2=\"" << width - margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << margin << "\" y1=\"" << margin << "\" x2=\""
        << margin << "\" y2=\"" << height - margin
        << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << width / 2 << "\" y=\"" << height - margin / 4
        << "\" text-anchor=\"middle\">" << x_label << "</text>\n";
    out << "<text x=\"" << margin / 4 << "\" y=\"" << height / 2
        << "\" text-anchor=\"middle\" transform=\"rotate(-90 " << margin / 4
        << ' ' << height / 2 << ")\">" << y_label << "</text>\n";
    for (int tick = 0; tick <= 4; ++tick) {
        const double xv = xmin + xspan * tick / 4.0;
        const double yv = ymin + yspan * tick / 4.0;
        out << "<text x=\"" << px(xv) << "\" y=\"" << height - margin + 16
            << "\" text-anchor=\"middle\" font-size=\"10\">"
            << format_double(xv) << "</text>\n";
        out << "<text x=\"" << margin - 6 << "\" y=\"" << py(yv)
            << "\" text-anchor=\"end\" font-size=\"10\">" << format_double(yv)
            << "</text>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"blue\" points=\"";
    for (std::size_t i = 0; i < x.size(); ++i)
        out << px(x[i]) << ',' << py(y[i]) << ' ';
    out << "\"/>\n</svg>\n";
}

}  // namespace grating
