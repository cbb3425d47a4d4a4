#pragma once

#include <string>
#include <utility>
#include <vector>

#include "grating/fit.hpp"
#include "grating/signal.hpp"

namespace grating {

/// One fully specified run: atom, beams, timing, output scale.
struct ScenarioParams {
    AtomParams atom = AtomParams::defaults();
    BeamSet beams;
    TimeSequence seq;
    SignalNormalization norm;

    void validate() const {
        atom.validate();
        beams.validate();
        seq.validate();
        norm.validate();
    }
};

/// One row of a figure-regeneration table.  fwhm is in microseconds,
/// peak in detector units, energies in detector units * microseconds.
/// energy is the closed form, energy_numeric the trapezoidal integral of
/// the sampled trace.
struct SweepRow {
    double param = 0.0;
    double fwhm_us = 0.0;
    double peak = 0.0;
    double energy = 0.0;
    double energy_numeric = 0.0;
};

struct SweepTable {
    std::string parameter;
    std::vector<SweepRow> rows;
    std::vector<std::pair<std::string, std::string>> fixed;
};

/// Read-intensity sweep (grid in mW/cm^2); regenerates the FWHM and
/// energy saturation curves.  Rows are evaluated by a worker pool sized
/// by the GRATING_WORKERS environment variable (default: hardware
/// concurrency); results are ordered by grid index.
SweepTable sweep_read_intensity(const std::vector<double>& i_r_grid,
                                const ScenarioParams& fixed);

/// Write-intensity sweep (grid in mW/cm^2, applied to beam W).
SweepTable sweep_write_intensity(const std::vector<double>& i_w_grid,
                                 const ScenarioParams& fixed);

/// Storage-time sweep (grid in microseconds).
SweepTable sweep_storage_time(const std::vector<double>& t_s_grid_us,
                              const ScenarioParams& fixed);

enum class ScaleTarget { read_rescale, write_ratio };
enum class Observable { fwhm, peak, energy };

/// One-dimensional least-squares calibration of a rescale factor (the
/// read-intensity factor a or the write-ratio factor a') against
/// observed data, by golden-section search; the overall amplitude of
/// peak/energy observables is profiled out analytically per candidate.
FitResult fit_scale_parameter(const std::vector<double>& param_values,
                              const std::vector<double>& observed,
                              ScaleTarget which, Observable observable,
                              double lo, double hi,
                              const ScenarioParams& fixed);

/// Worker count honored by the sweep pool.
unsigned sweep_worker_count();

}  // namespace grating
