#pragma once

#include <cmath>
#include <complex>

#include <Eigen/Dense>

#include "grating/errors.hpp"

namespace grating {

using Complex = std::complex<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Cs D2 wavelength [m], used as the default beam wavelength.
inline constexpr double kCesiumD2Wavelength = 852.347e-9;

/// Relaxation and saturation parameters of the degenerate three-level
/// atom.  Rates are angular frequencies [rad/s]; saturation intensities
/// are in mW/cm^2.  All dynamical operations work in internal units
/// where time is measured in 1/gamma12 and rates in gamma12; the
/// *_norm() accessors provide those dimensionless ratios.
struct AtomParams {
    double gamma12;   ///< optical-coherence decay rate
    double gamma22;   ///< excited-population decay rate
    double gamma_g;   ///< ground-coherence decay rate
    double branch_a;  ///< decay rate of rho22 into rho_aa
    double branch_b;  ///< decay rate of rho22 into rho_bb
    double i_sat_a;   ///< saturation intensity of the 1a->2 transition
    double i_sat_b;   ///< saturation intensity of the 1b->2 transition

    /// Cold-cesium defaults: gamma22/2pi = 5.2 MHz, gamma12 = gamma22/2,
    /// gamma_g = 0.02 gamma12, symmetric branching, i_sat_a = 15 i_sat_b.
    static AtomParams defaults() {
        AtomParams p;
        p.gamma22 = kTwoPi * 5.2e6;
        p.gamma12 = p.gamma22 / 2.0;
        p.gamma_g = 0.02 * p.gamma12;
        p.branch_a = p.gamma22 / 2.0;
        p.branch_b = p.gamma22 / 2.0;
        p.i_sat_b = 1.67;
        p.i_sat_a = 15.0 * p.i_sat_b;
        return p;
    }

    void validate() const {
        if (gamma12 <= 0.0) throw InvalidParameter("atom.gamma12 must be > 0");
        if (gamma22 < 0.0) throw InvalidParameter("atom.gamma22 must be >= 0");
        if (gamma_g < 0.0) throw InvalidParameter("atom.gamma_g must be >= 0");
        if (branch_a < 0.0 || branch_b < 0.0)
            throw InvalidParameter("atom branching rates must be >= 0");
        const double sum = branch_a + branch_b;
        if (std::abs(sum - gamma22) > 1e-9 * std::max(gamma22, 1.0))
            throw InvalidParameter(
                "atom branching rates must sum to gamma22 (closed system)");
        if (i_sat_a <= 0.0 || i_sat_b <= 0.0)
            throw InvalidParameter("atom saturation intensities must be > 0");
    }

    // Dimensionless rates in units of gamma12.
    double gamma22_norm() const { return gamma22 / gamma12; }
    double gamma_g_norm() const { return gamma_g / gamma12; }
    double branch_a_norm() const { return branch_a / gamma12; }
    double branch_b_norm() const { return branch_b / gamma12; }

    // Time-unit conversions (internal unit is 1/gamma12).
    double us_to_internal(double t_us) const { return t_us * 1e-6 * gamma12; }
    double internal_to_us(double t) const { return t / gamma12 * 1e6; }
};

/// Incident beam intensities and geometry.  The rescale factors absorb
/// the experimental uncertainty in the intensity-to-Rabi conversion:
/// rescale_read multiplies the read intensity, rescale_write_ratio
/// multiplies the write-intensity ratio I_W/I_W' (applied to I_W).
struct BeamSet {
    double i_w = 0.0;    ///< write beam W intensity [mW/cm^2]
    double i_wp = 0.0;   ///< write beam W' intensity [mW/cm^2]
    double i_r = 0.0;    ///< read beam R intensity [mW/cm^2]
    double theta = 60e-3;                       ///< W-W' angle [rad]
    double wavelength = kCesiumD2Wavelength;    ///< [m]
    double rescale_read = 1.0;
    double rescale_write_ratio = 1.0;

    void validate() const {
        if (i_w < 0.0 || i_wp < 0.0 || i_r < 0.0)
            throw InvalidParameter("beam intensities must be >= 0");
        if (!(theta > 0.0 && theta < 1.5707963267948966))
            throw InvalidParameter("beams.theta must lie in (0, pi/2)");
        if (wavelength <= 0.0) throw InvalidParameter("beams.wavelength must be > 0");
        if (rescale_read <= 0.0 || rescale_write_ratio <= 0.0)
            throw InvalidParameter("beam rescale factors must be > 0");
    }

    double i_r_effective() const { return rescale_read * i_r; }
    double i_w_effective() const { return rescale_write_ratio * i_w; }
};

/// The six independent elements of the three-level density matrix in the
/// rotating frame.  Populations are real; sigma_a2, sigma_b2 are the
/// optical coherences and rho_ab the ground-state coherence.
struct DensityMatrix3 {
    double rho22 = 0.0;
    double rho_aa = 0.0;
    double rho_bb = 0.0;
    Complex sigma_a2{0.0, 0.0};
    Complex sigma_b2{0.0, 0.0};
    Complex rho_ab{0.0, 0.0};

    /// Unpolarized ground manifold, the default pre-write state.
    static DensityMatrix3 ground_mixture() {
        DensityMatrix3 s;
        s.rho_aa = 0.5;
        s.rho_bb = 0.5;
        return s;
    }

    double trace() const { return rho22 + rho_aa + rho_bb; }

    Eigen::Matrix<double, 9, 1> to_vector() const {
        Eigen::Matrix<double, 9, 1> v;
        v << rho22, rho_aa, rho_bb, sigma_a2.real(), sigma_a2.imag(),
            sigma_b2.real(), sigma_b2.imag(), rho_ab.real(), rho_ab.imag();
        return v;
    }

    static DensityMatrix3 from_vector(const Eigen::Matrix<double, 9, 1>& v) {
        DensityMatrix3 s;
        s.rho22 = v[0];
        s.rho_aa = v[1];
        s.rho_bb = v[2];
        s.sigma_a2 = {v[3], v[4]};
        s.sigma_b2 = {v[5], v[6]};
        s.rho_ab = {v[7], v[8]};
        return s;
    }

    /// True when trace, population range, and the 2x2 positivity minors
    /// hold within tol.
    bool is_physical(double tol) const {
        if (std::abs(trace() - 1.0) > tol) return false;
        for (double p : {rho22, rho_aa, rho_bb})
            if (p < -tol || p > 1.0 + tol) return false;
        if (std::norm(rho_ab) > rho_aa * rho_bb + tol) return false;
        if (std::norm(sigma_a2) > rho_aa * rho22 + tol) return false;
        if (std::norm(sigma_b2) > rho_bb * rho22 + tol) return false;
        return true;
    }
};

/// Arbitrary-unit output scaling: amp_const is the detected-signal
/// proportionality constant, dipole_scale absorbs the dipole-moment and
/// vacuum-permittivity prefactors of the far-field amplitude.  Neither
/// is predicted by the model.
struct SignalNormalization {
    double amp_const = 1.0;
    double dipole_scale = 1.0;

    void validate() const {
        if (amp_const <= 0.0)
            throw InvalidParameter("normalization.amp_const must be > 0");
        if (dipole_scale <= 0.0)
            throw InvalidParameter("normalization.dipole_scale must be > 0");
    }
};

}  // namespace grating
