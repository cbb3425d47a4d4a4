#pragma once

#include <utility>
#include <vector>

#include "grating/bloch.hpp"
#include "grating/params.hpp"

namespace grating {

/// Pulse-sequence timing, all in units of 1/gamma12.
struct TimeSequence {
    double t_write = 50.0;
    double t_store = 10.0;
    double t_read = 200.0;
    double dt = 1e-2;

    void validate() const {
        if (t_write <= 0.0 || t_store <= 0.0 || t_read <= 0.0 || dt <= 0.0)
            throw InvalidParameter("sequence durations and dt must be > 0");
        if (dt > t_read / 100.0 || dt > 0.1)
            throw InvalidParameter(
                "sequence.dt must satisfy dt <= t_read/100 and dt <= 0.1");
    }
};

/// Ground-state coherence surviving the dark storage interval.
struct StoredGrating {
    Complex rho_ab_s{0.0, 0.0};
    double t_store_applied = 0.0;
};

/// Sampled write-phase evolution.
struct Trajectory {
    std::vector<double> times;
    std::vector<DensityMatrix3> states;
};

/// Sampled read-phase evolution of the decoupled (sigma_a2, rho_ab) pair.
struct ReadTrajectory {
    std::vector<double> times;
    std::vector<std::pair<Complex, Complex>> states;
};

/// Decay rates of the read transient, in units of gamma12:
/// gamma1 = (1 + gamma)/2 and gamma2^2 = ((1 - gamma)^2 - 4|Omega_R|^2)/4
/// stored signed, so gamma2_sq < 0 marks the oscillatory regime.
struct ReadRates {
    double gamma1;
    double gamma2_sq;
};

ReadRates read_rates(const AtomParams& params, Complex omega_r);

/// g(z, t) = sinh(sqrt(z) t)/sqrt(z), continued through z = 0 (where it
/// equals t) into sin(sqrt(-z) t)/sqrt(-z) for z < 0.  Entire in z; a
/// series fallback covers |z| t^2 < 1e-6.
double growth_kernel(double z, double t);

/// e^(-gamma1 t) g(gamma2_sq, t), evaluated overflow-free for large t.
double decayed_growth_kernel(const ReadRates& r, double t);

/// Closed-form read transient
///   sigma_a2(t) = conj(Omega_R) rho_ab^s e^(-gamma1 t) g(gamma2^2, t).
Complex sigma_read_closed(const StoredGrating& grating, Complex omega_r,
                          const AtomParams& params, double t);

/// Classical fixed-step RK4 over [0, t_write].  The recorded grid is
/// thinned to at most max_samples points (final state always included).
Trajectory integrate_write(const AtomParams& params, Complex omega_w,
                           Complex omega_wp, const TimeSequence& seq,
                           const DensityMatrix3& init,
                           std::size_t max_samples = 4096);

/// Fixed-step RK4 of the read pair with sigma_a2(0) = 0,
/// rho_ab(0) = rho_ab^s.
ReadTrajectory integrate_read(const StoredGrating& grating, Complex omega_r,
                              const AtomParams& params,
                              const TimeSequence& seq,
                              std::size_t max_samples = 1 << 22);

/// Dark-interval decay: rho^s = rho_ab^e e^(-gamma t_store), optical
/// coherences dropped.  Valid for t_store >> 1 (see
/// storage_regime_valid).
StoredGrating apply_storage(const DensityMatrix3& steady, double t_store,
                            const AtomParams& params);

/// The stored-state approximation assumes the optical coherences have
/// fully relaxed; short dark intervals violate that.
inline bool storage_regime_valid(double t_store) { return t_store >= 5.0; }

}  // namespace grating
