#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "grating/dynamics.hpp"
#include "grating/params.hpp"

namespace grating {

/// Gaussian atomic cloud: N atoms, isotropic rms width L, and the W'
/// wavevector that sets the phase-matched emission direction -k_W'.
struct CloudGeometry {
    double n_atoms = 1e8;
    double rms_width = 1e-3;           ///< [m]
    Eigen::Vector3d k_wprime{0, 0, 0}; ///< [rad/m]

    void validate(double wavelength) const {
        if (n_atoms <= 0.0) throw InvalidParameter("cloud.n_atoms must be > 0");
        if (rms_width <= 0.0)
            throw InvalidParameter("cloud.rms_width must be > 0");
        const double k_expected = kTwoPi / wavelength;
        if (std::abs(k_wprime.norm() - k_expected) > 1e-6 * k_expected)
            throw InvalidParameter(
                "cloud.k_wprime magnitude must equal 2 pi / wavelength");
    }
};

/// Sampled detected signal.  Times are in the unit named by
/// metadata["time_unit"] ("us" or "1/gamma12"); values are detector
/// units (>= 0).
struct PulseTrace {
    std::vector<double> times;
    std::vector<double> values;
    std::map<std::string, std::string> metadata;
};

/// |rho_ab^s| from the write intensities:
/// sqrt(I_W I_W') e^(-gamma t_s) / (I_W sqrt(I_sb/I_sa) + I_W' sqrt(I_sa/I_sb)).
/// gamma_g and t_store are in internal units (their product is what
/// matters).
double stored_coherence_modulus(double i_w, double i_wp, double i_sat_a,
                                double i_sat_b, double gamma_g, double t_store);

/// Temporal profile of the retrieved pulse,
///   f_R(t) = sqrt(I_R/2 I_sb) e^(-gamma1 t) g(gamma2^2, t)
/// in units of gamma12 (t in 1/gamma12).
double f_read_profile(double t, double i_r, double i_sat_b,
                      const AtomParams& params);

/// Detected signal S_fast(t) = amp_const |rho^s|^2 |f_R(t)|^2.
double signal_fast(double t, const StoredGrating& grating, double i_r,
                   const AtomParams& params, const SignalNormalization& norm);

/// Sample S_fast on a uniform internal-time grid [0, t_read].
PulseTrace sample_signal_closed(const StoredGrating& grating, double i_r,
                                const AtomParams& params,
                                const SignalNormalization& norm,
                                const TimeSequence& seq,
                                std::size_t max_samples = 1 << 22);

/// Same signal through the numerical-ODE path: S = amp_const |sigma_a2|^2
/// with sigma_a2 from integrate_read.  |sigma_a2| = |rho^s| |f_R| exactly,
/// so this is the independent route to the same trace.
PulseTrace sample_signal_numeric(const StoredGrating& grating, double i_r,
                                 const AtomParams& params,
                                 const SignalNormalization& norm,
                                 const TimeSequence& seq,
                                 std::size_t max_samples = 1 << 22);

/// Total retrieved energy: the time integral of S_fast,
///   U_D = amp_const |rho^s|^2 x / (2 (1 + gamma)(x + gamma)),
/// x = I_R/2 I_sb, gamma = gamma_g/gamma12, time in 1/gamma12.
double pulse_energy_closed(const StoredGrating& grating, double i_r,
                           const AtomParams& params,
                           const SignalNormalization& norm);

/// Trapezoidal integral of a sampled trace (in the trace's time unit).
double pulse_energy_numeric(const PulseTrace& trace);

/// Full width at half maximum by linear interpolation of the two
/// half-maximum crossings adjacent to the global peak.  Throws
/// TruncatedPulse when a crossing is missing on either side.
double pulse_fwhm(const PulseTrace& trace);

/// Maximum sample value.
double pulse_peak(const PulseTrace& trace);

/// First-order low-pass (detector response) with time constant tau in
/// the trace's own time unit.
PulseTrace apply_detector_lowpass(const PulseTrace& trace, double tau);

/// Far-field amplitude of the diffracted mode at wavevector k:
///   i dipole_scale N |rho^s| f_R(t) exp(-|k + k_W'|^2 L^2 / 2).
Complex farfield_amplitude(const Eigen::Vector3d& k, double t,
                           const StoredGrating& grating,
                           const CloudGeometry& cloud, double i_r,
                           const AtomParams& params,
                           const SignalNormalization& norm);

/// Grating spatial period Lambda = lambda / (2 sin(theta/2)).
double grating_period(double wavelength, double theta);

}  // namespace grating
