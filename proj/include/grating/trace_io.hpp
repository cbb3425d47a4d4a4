#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "grating/signal.hpp"
#include "grating/sweeps.hpp"

namespace grating {

/// "%.17g" formatting used for every float written to disk, so that
/// identical inputs give byte-identical files.
std::string format_double(double v);

/// Trace CSV: header line "# time_us,signal", one "t,v" sample per line,
/// LF endings; multiple traces separated by a blank line and a new
/// header.
void write_traces_csv(std::ostream& out, const std::vector<PulseTrace>& traces);

/// Parse the trace CSV format.  Throws DataFormatError with the
/// offending line number on malformed rows or non-monotonic time.
std::vector<PulseTrace> ingest_traces(const std::string& path);
std::vector<PulseTrace> ingest_traces_stream(std::istream& in);

/// Sweep CSV: a comment block with the fixed parameters, then
/// "# param,fwhm_us,peak,energy,energy_numeric" and one row per line.
void write_sweep_csv(std::ostream& out, const SweepTable& table);

/// Parse a sweep CSV back into (param, column) pairs; column is one of
/// "fwhm_us", "peak", "energy", "energy_numeric".
void read_sweep_columns(const std::string& path, const std::string& column,
                        std::vector<double>& params,
                        std::vector<double>& values);

/// Minimal SVG: one polyline with axes and tick labels, for desk checks.
void write_polyline_svg(std::ostream& out, const std::vector<double>& x,
                        const std::vector<double>& y,
                        const std::string& x_label,
                        const std::string& y_label);

}  // namespace grating
