#include "grating/signal.hpp"

#include <algorithm>
#include <cmath>

namespace grating {

double stored_coherence_modulus(double i_w, double i_wp, double i_sat_a,
                                double i_sat_b, double gamma_g,
                                double t_store) {
    if (i_sat_a <= 0.0 || i_sat_b <= 0.0)
        throw InvalidParameter("saturation intensities must be > 0");
    if (i_w < 0.0 || i_wp < 0.0)
        throw InvalidParameter("intensities must be >= 0");
    if (i_w == 0.0 && i_wp == 0.0)
        throw UndefinedValue(
            "stored coherence undefined: both write intensities are zero");
    const double denom = i_w * std::sqrt(i_sat_b / i_sat_a) +
                         i_wp * std::sqrt(i_sat_a / i_sat_b);
    return std::sqrt(i_w * i_wp) * std::exp(-gamma_g * t_store) / denom;
}

double f_read_profile(double t, double i_r, double i_sat_b,
                      const AtomParams& params) {
    if (t < 0.0) throw InvalidParameter("f_read_profile: t must be >= 0");
    const double omega_r = rabi_ratio_from_intensity(i_r, i_sat_b);
    const ReadRates r = read_rates(params, Complex{0.0, omega_r});
    return omega_r * decayed_growth_kernel(r, t);
}

double signal_fast(double t, const StoredGrating& grating, double i_r,
                   const AtomParams& params, const SignalNormalization& norm) {
    const double f = f_read_profile(t, i_r, params.i_sat_b, params);
    return norm.amp_const * std::norm(grating.rho_ab_s) * f * f;
}

namespace {

PulseTrace trace_shell(const StoredGrating& grating, double i_r,
                       const AtomParams& params, const char* path) {
    PulseTrace trace;
    trace.metadata["time_unit"] = "1/gamma12";
    trace.metadata["path"] = path;
    trace.metadata["i_r_mw_per_cm2"] = std::to_string(i_r);
    trace.metadata["t_store_internal"] = std::to_string(grating.t_store_applied);
    (void)params;
    return trace;
}

}  // namespace

PulseTrace sample_signal_closed(const StoredGrating& grating, double i_r,
                                const AtomParams& params,
                                const SignalNormalization& norm,
                                const TimeSequence& seq,
                                std::size_t max_samples) {
    seq.validate();
    std::size_t n = static_cast<std::size_t>(std::llround(seq.t_read / seq.dt));
    n = std::max<std::size_t>(n, 1);
    const std::size_t stride =
        std::max<std::size_t>(1, (n + max_samples - 1) / max_samples);
    const double h = seq.t_read / static_cast<double>(n);

    PulseTrace trace = trace_shell(grating, i_r, params, "closed-form");
    for (std::size_t i = 0; i <= n; i += stride) {
        const double t = static_cast<double>(i) * h;
        trace.times.push_back(t);
        trace.values.push_back(signal_fast(t, grating, i_r, params, norm));
    }
    if ((n % stride) != 0) {
        trace.times.push_back(seq.t_read);
        trace.values.push_back(
            signal_fast(seq.t_read, grating, i_r, params, norm));
    }
    return trace;
}

PulseTrace sample_signal_numeric(const StoredGrating& grating, double i_r,
                                 const AtomParams& params,
                                 const SignalNormalization& norm,
                                 const TimeSequence& seq,
                                 std::size_t max_samples) {
    const double omega_r = rabi_ratio_from_intensity(i_r, params.i_sat_b);
    const ReadTrajectory traj = integrate_read(
        grating, Complex{0.0, omega_r}, params, seq, max_samples);
    PulseTrace trace = trace_shell(grating, i_r, params, "numeric");
    trace.times = traj.times;
    trace.values.reserve(traj.states.size());
    for (const auto& [sigma, rho] : traj.states)
        trace.values.push_back(norm.amp_const * std::norm(sigma));
    return trace;
}

double pulse_energy_closed(const StoredGrating& grating, double i_r,
                           const AtomParams& params,
                           const SignalNormalization& norm) {
    const double x = i_r / (2.0 * params.i_sat_b);
    const double gg = params.gamma_g_norm();
    const double denom = 2.0 * (1.0 + gg) * (x + gg);
    if (denom == 0.0)
        throw UndefinedValue(
            "pulse energy undefined: gamma_g and I_R both vanish");
    return norm.amp_const * std::norm(grating.rho_ab_s) * x / denom;
}

double pulse_energy_numeric(const PulseTrace& trace) {
    if (trace.times.size() < 2)
        throw DataFormatError("pulse_energy_numeric needs >= 2 samples");
    double sum = 0.0;
    for (std::size_t i = 1; i < trace.times.size(); ++i)
        sum += 0.5 * (trace.values[i] + trace.values[i - 1]) *
               (trace.times[i] - trace.times[i - 1]);
    return sum;
}

double pulse_fwhm(const PulseTrace& trace) {
    const auto& t = trace.times;
    const auto& y = trace.values;
    if (t.size() < 3) throw DataFormatError("pulse_fwhm needs >= 3 samples");
    const std::size_t peak =
        std::max_element(y.begin(), y.end()) - y.begin();
    const double ymax = y[peak];
    if (!(ymax > 0.0))
        throw DataFormatError("pulse_fwhm needs a positive peak");
    const double half = 0.5 * ymax;

    // Crossings nearest the global peak, linearly interpolated.
    double t_left = 0.0, t_right = 0.0;
    bool found = false;
    for (std::size_t i = peak; i-- > 0;) {
        if (y[i] <= half) {
            const double frac = (half - y[i]) / (y[i + 1] - y[i]);
            t_left = t[i] + frac * (t[i + 1] - t[i]);
            found = true;
            break;
        }
    }
    if (!found)
        throw TruncatedPulse("no half-maximum crossing left of the peak",
                             TruncatedPulse::Side::left);
    found = false;
    for (std::size_t i = peak + 1; i < y.size(); ++i) {
        if (y[i] <= half) {
            const double frac = (y[i - 1] - half) / (y[i - 1] - y[i]);
            t_right = t[i - 1] + frac * (t[i] - t[i - 1]);
            found = true;
            break;
        }
    }
    if (!found)
        throw TruncatedPulse("no half-maximum crossing right of the peak",
                             TruncatedPulse::Side::right);
    return t_right - t_left;
}

double pulse_peak(const PulseTrace& trace) {
    if (trace.values.empty())
        throw DataFormatError("pulse_peak needs a non-empty trace");
    return *std::max_element(trace.values.begin(), trace.values.end());
}

PulseTrace apply_detector_lowpass(const PulseTrace& trace, double tau) {
    if (tau <= 0.0) throw InvalidParameter("detector tau must be > 0");
    PulseTrace out = trace;
    out.metadata["detector_tau"] = std::to_string(tau);
    if (trace.values.empty()) return out;
    double y = 0.0;  // detector at rest before the pulse
    out.values[0] = y;
    for (std::size_t i = 1; i < trace.values.size(); ++i) {
        const double dt = trace.times[i] - trace.times[i - 1];
        const double alpha = 1.0 - std::exp(-dt / tau);
        y += alpha * (trace.values[i] - y);
        out.values[i] = y;
    }
    return out;
}

Complex farfield_amplitude(const Eigen::Vector3d& k, double t,
                           const StoredGrating& grating,
                           const CloudGeometry& cloud, double i_r,
                           const AtomParams& params,
                           const SignalNormalization& norm) {
    const double q2 = (k + cloud.k_wprime).squaredNorm();
    const double l2 = cloud.rms_width * cloud.rms_width;
    const double f = f_read_profile(t, i_r, params.i_sat_b, params);
    const double mag = norm.dipole_scale * cloud.n_atoms *
                       std::abs(grating.rho_ab_s) * f *
                       std::exp(-0.5 * q2 * l2);
    return Complex{0.0, mag};
}

double grating_period(double wavelength, double theta) {
    if (wavelength <= 0.0) throw InvalidParameter("wavelength must be > 0");
    if (!(theta > 0.0 && theta <= 3.14159265358979323846))
        throw InvalidParameter("grating_period: theta must lie in (0, pi]");
    return wavelength / (2.0 * std::sin(0.5 * theta));
}

}  // namespace grating
