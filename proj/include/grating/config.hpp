#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "grating/sweeps.hpp"

namespace grating {

/// Run configuration in explicit physical units (keys carry the unit in
/// their name).  Internally everything runs in units of 1/gamma12; the
/// conversion happens once, in scenario()/cloud().
struct RunConfig {
    struct Atom {
        double gamma22_over_2pi_mhz = 5.2;
        double gamma12_over_2pi_mhz = 2.6;   // default: gamma22/2
        double gamma_g_over_gamma12 = 0.02;
        double branch_a_fraction = 0.5;      // branch_a = fraction * gamma22
        double i_sat_b_mw_per_cm2 = 1.67;
        double i_sat_a_mw_per_cm2 = 25.05;   // default: 15 * i_sat_b
    } atom;

    struct Beams {
        double i_w_mw_per_cm2 = 7.0;
        double i_wp_mw_per_cm2 = 1.0;
        double i_r_mw_per_cm2 = 8.0;
        double theta_mrad = 60.0;
        double wavelength_nm = 852.347;
        double rescale_read = 1.0;
        double rescale_write_ratio = 1.0;
    } beams;

    struct Sequence {
        double t_write_us = 3.1;
        double t_store_us = 1.0;
        double t_read_us = 20.0;
        double dt_us = 0.001;
    } sequence;

    struct Cloud {
        double n_atoms = 1e8;
        double rms_width_um = 1000.0;
    };
    std::optional<Cloud> cloud;

    struct Normalization {
        double amp_const = 1.0;
        double dipole_scale = 1.0;
    } normalization;

    struct Detector {
        bool enabled = false;
        double tau_us = 0.5;
    } detector;

    struct Output {
        std::string format = "csv";  // csv | json | svg
        std::string path;            // empty: stdout
    } output;

    AtomParams atom_params() const;
    BeamSet beam_set() const;
    ScenarioParams scenario() const;
    CloudGeometry cloud_geometry() const;  ///< throws ConfigError if absent

    /// Full invariant check; throws ConfigError naming field + constraint.
    void validate() const;
};

/// Parse the INI-style key=value format.  Unknown sections or keys are
/// errors; unspecified keys take the documented defaults.
RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);

/// Serialize with every field written explicitly; parse(serialize(c))
/// reproduces c exactly.
void serialize_config(std::ostream& out, const RunConfig& config);

}  // namespace grating
