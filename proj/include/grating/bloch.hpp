#pragma once

#include <complex>
#include <utility>

#include "grating/params.hpp"

namespace grating {

/// |Omega|/Gamma12 = sqrt(I / 2 I_sat) for a resonant plane wave.
double rabi_ratio_from_intensity(double intensity, double i_sat);

/// Right-hand side of the write-phase Bloch equations in the rotating
/// frame at resonance.  Rabi frequencies and the returned derivatives
/// are in units of gamma12 (time in 1/gamma12).
DensityMatrix3 bloch_rhs_write(const DensityMatrix3& state, Complex omega_w,
                               Complex omega_wp, const AtomParams& params);

/// Right-hand side of the decoupled read-phase pair
///   d sigma_a2/dt = conj(Omega_R) rho_ab - sigma_a2
///   d rho_ab/dt   = -Omega_R sigma_a2 - gamma rho_ab
/// in units of gamma12.  Returns (d sigma_a2, d rho_ab).
std::pair<Complex, Complex> bloch_rhs_read(Complex sigma_a2, Complex rho_ab,
                                           Complex omega_r,
                                           const AtomParams& params);

/// Stationary solution of the write-phase Bloch system, obtained from an
/// 8x8 real linear solve (rho_bb eliminated through the trace).  Throws
/// DegenerateSteadyState when the stationary family is not unique.
DensityMatrix3 steady_state_write(const AtomParams& params, Complex omega_w,
                                  Complex omega_wp);

/// Closed-form steady ground-state coherence
///   rho_ab^e = -(B / A) conj(Omega_W) Omega_W'
/// with B = branch_a |Omega_W'|^2 + branch_b |Omega_W|^2 and
///      A = B (gamma + |Omega_W|^2 + |Omega_W'|^2) + 6 gamma |Omega_W'|^2 |Omega_W|^2
/// (rates and Rabi frequencies in units of gamma12).  Throws
/// UndefinedValue when both fields vanish.
Complex coherence_steady_closed(const AtomParams& params, Complex omega_w,
                                Complex omega_wp);

/// Small-gamma limit of the steady coherence,
///   -conj(Omega_W) Omega_W' / (|Omega_W|^2 + |Omega_W'|^2).
Complex coherence_steady_small_gamma(Complex omega_w, Complex omega_wp);

}  // namespace grating
