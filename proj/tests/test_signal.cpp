#include <cmath>
#include <complex>
#include <random>

#include <doctest.h>

#include "grating/bloch.hpp"
#include "grating/signal.hpp"
#include "test_util.hpp"

using namespace grating;
using namespace grating::testing;

namespace {

StoredGrating make_grating(Complex rho_s) {
    StoredGrating g;
    g.rho_ab_s = rho_s;
    g.t_store_applied = 0.0;
    return g;
}

// Simpson-rule integral of |S_fast| on [0, t_end]; independent of the
// closed-form energy and of the trapezoidal trace integral.
double simpson_energy(const StoredGrating& g, double i_r,
                      const AtomParams& atom, const SignalNormalization& norm,
                      double t_end, int n) {
    if (n % 2 == 1) ++n;
    const double h = t_end / n;
    double sum = signal_fast(0.0, g, i_r, atom, norm) +
                 signal_fast(t_end, g, i_r, atom, norm);
    for (int i = 1; i < n; ++i)
        sum += signal_fast(i * h, g, i_r, atom, norm) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

}  // namespace

TEST_CASE("stored coherence modulus formula") {
    const double i_sat_a = 25.05, i_sat_b = 1.67;
    SUBCASE("balanced saturation gives exactly one half") {
        // I_W / I_sat_a = I_W' / I_sat_b makes the two Rabi frequencies
        // equal, the optimum of the write stage.
        const double i_wp = 1.3;
        const double i_w = i_wp * i_sat_a / i_sat_b;
        CHECK(stored_coherence_modulus(i_w, i_wp, i_sat_a, i_sat_b, 0.02,
                                       0.0) == doctest::Approx(0.5)
                                                   .epsilon(1e-15));
    }
    SUBCASE("agrees with the small-gamma steady coherence") {
        std::mt19937 rng(5);
        AtomParams atom = unit_atom(0.0);
        atom.i_sat_a = i_sat_a;
        for (int i = 0; i < 25; ++i) {
            std::uniform_real_distribution<double> u(0.1, 12.0);
            const double i_w = u(rng), i_wp = u(rng);
            const Complex w{0.0, rabi_ratio_from_intensity(i_w, i_sat_a)};
            const Complex wp{0.0, rabi_ratio_from_intensity(i_wp, i_sat_b)};
            const double expected =
                std::abs(coherence_steady_small_gamma(w, wp));
            CHECK(stored_coherence_modulus(i_w, i_wp, i_sat_a, i_sat_b, 0.02,
                                           0.0) ==
                  doctest::Approx(expected).epsilon(1e-13));
        }
    }
    SUBCASE("dark decay factor") {
        const double base =
            stored_coherence_modulus(7.0, 1.0, i_sat_a, i_sat_b, 0.02, 0.0);
        const double stored =
            stored_coherence_modulus(7.0, 1.0, i_sat_a, i_sat_b, 0.02, 50.0);
        CHECK(stored == doctest::Approx(base * std::exp(-1.0)).epsilon(1e-14));
    }
    SUBCASE("zero either write beam kills the grating") {
        CHECK(stored_coherence_modulus(0.0, 1.0, i_sat_a, i_sat_b, 0.02,
                                       0.0) == 0.0);
        CHECK(stored_coherence_modulus(5.0, 0.0, i_sat_a, i_sat_b, 0.02,
                                       0.0) == 0.0);
    }
    SUBCASE("maximum over I_W sits at the saturation ratio") {
        // Scan on a fine grid; the optimum I_W = (I_sa/I_sb) I_W'.
        const double i_wp = 0.8;
        const double opt = i_wp * i_sat_a / i_sat_b;
        double best_x = 0.0, best = -1.0;
        for (int i = 1; i <= 4000; ++i) {
            const double x = opt * i / 2000.0;
            const double v = stored_coherence_modulus(x, i_wp, i_sat_a,
                                                      i_sat_b, 0.02, 0.0);
            if (v > best) { best = v; best_x = x; }
        }
        CHECK(std::abs(best_x - opt) <= opt / 2000.0 + 1e-12);
        CHECK(best == doctest::Approx(0.5).epsilon(1e-6));
    }
}

TEST_CASE("read profile limits") {
    SUBCASE("weak read, no ground decay: saturating exponential") {
        AtomParams atom = unit_atom(0.0);
        const double i_r = 1e-8, i_sat_b = 1.67;
        const double amp = std::sqrt(i_r / (2.0 * i_sat_b));
        for (double t : {0.2, 1.0, 5.0, 20.0}) {
            const double expected = amp * (1.0 - std::exp(-t));
            CHECK(f_read_profile(t, i_r, i_sat_b, atom) ==
                  doctest::Approx(expected).epsilon(1e-6));
        }
    }
    SUBCASE("oscillatory regime has its first zero at pi over the frequency") {
        AtomParams atom = unit_atom(0.0);
        const double i_sat_b = 1.67;
        const double i_r = 2.0 * i_sat_b;  // |Omega_R| = 1, z = -3/4
        const double t_zero = 3.14159265358979323846 / std::sqrt(0.75);
        CHECK(std::abs(f_read_profile(t_zero, i_r, i_sat_b, atom)) < 1e-14);
        CHECK(f_read_profile(0.5 * t_zero, i_r, i_sat_b, atom) > 0.0);
    }
    SUBCASE("zero at t = 0") {
        const AtomParams atom = unit_atom(0.02);
        CHECK(f_read_profile(0.0, 3.0, 1.67, atom) == 0.0);
    }
}

TEST_CASE("fast signal is quadratic in the stored coherence") {
    const AtomParams atom = unit_atom(0.02);
    SignalNormalization norm;
    norm.amp_const = 2.5;
    const double i_r = 4.0;
    const Complex rho{0.11, -0.06};
    for (double t : {0.3, 1.7, 6.0}) {
        const double s1 = signal_fast(t, make_grating(rho), i_r, atom, norm);
        const double s3 =
            signal_fast(t, make_grating(3.0 * rho), i_r, atom, norm);
        CHECK(s3 == doctest::Approx(9.0 * s1).epsilon(1e-13));
        // Only the modulus of rho^s enters the detected intensity.
        const double rot = signal_fast(
            t, make_grating(rho * std::polar(1.0, 1.234)), i_r, atom, norm);
        CHECK(rot == doctest::Approx(s1).epsilon(1e-13));
    }
}

TEST_CASE("closed and numeric signal routes coincide") {
    const AtomParams atom = unit_atom(0.02);
    SignalNormalization norm;
    const StoredGrating g = make_grating(Complex{0.2, 0.1});
    TimeSequence seq;
    seq.t_read = 30.0;
    seq.dt = 1e-3;
    for (double i_r : {0.4, 3.3, 8.0}) {
        const PulseTrace closed =
            sample_signal_closed(g, i_r, atom, norm, seq);
        const PulseTrace numeric =
            sample_signal_numeric(g, i_r, atom, norm, seq);
        REQUIRE(closed.times.size() == numeric.times.size());
        double worst = 0.0, scale = 0.0;
        for (std::size_t i = 0; i < closed.times.size(); i += 101) {
            worst = std::max(worst,
                             std::abs(closed.values[i] - numeric.values[i]));
            scale = std::max(scale, closed.values[i]);
        }
        CHECK(worst <= 1e-8 * scale);
    }
}

TEST_CASE("closed pulse energy against Simpson quadrature") {
    const AtomParams atom = unit_atom(0.02);
    SignalNormalization norm;
    norm.amp_const = 1.7;
    const StoredGrating g = make_grating(Complex{0.15, -0.2});
    // Integrate far past the slow tail; the closed form is the full
    // [0, infinity) integral.
    for (double i_r : {0.05, 0.8, 5.0, 20.0}) {
        const double closed = pulse_energy_closed(g, i_r, atom, norm);
        const double slow = 2.0 * 0.02;  // slowest tail rate ~ 2 gamma
        const double t_end = 60.0 / slow;
        const double quad = simpson_energy(g, i_r, atom, norm, t_end, 200000);
        CHECK(quad == doctest::Approx(closed).epsilon(1e-7));
    }
}

TEST_CASE("trapezoidal energy on exact traces") {
    PulseTrace ramp;
    for (int i = 0; i <= 10; ++i) {
        ramp.times.push_back(0.5 * i);
        ramp.values.push_back(2.0 * (0.5 * i));  // exact for trapezoid
    }
    CHECK(pulse_energy_numeric(ramp) == doctest::Approx(25.0).epsilon(1e-15));

    PulseTrace flat;
    flat.times = {0.0, 1.0, 4.0};
    flat.values = {3.0, 3.0, 3.0};
    CHECK(pulse_energy_numeric(flat) == doctest::Approx(12.0).epsilon(1e-15));
}

TEST_CASE("fwhm of a triangle pulse") {
    PulseTrace tri;
    for (int i = 0; i <= 200; ++i) {
        const double t = i * 0.01;
        tri.times.push_back(t);
        tri.values.push_back(std::max(0.0, 1.0 - std::abs(t - 1.0)));
    }
    CHECK(pulse_fwhm(tri) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pulse_peak(tri) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("fwhm of the retrieved pulse against a bisection oracle") {
    const AtomParams atom = unit_atom(0.014);
    SignalNormalization norm;
    const StoredGrating g = make_grating(Complex{0.18, 0.0});
    const double i_r = 2.4;
    TimeSequence seq;
    seq.t_read = 300.0;
    seq.dt = 1e-3;
    const PulseTrace trace = sample_signal_closed(g, i_r, atom, norm, seq);
    const double fwhm = pulse_fwhm(trace);

    // Oracle: locate the peak by golden-section on -S, then the two
    // half-maximum crossings by bisection on the continuous closed form.
    auto s = [&](double t) { return signal_fast(t, g, i_r, atom, norm); };
    double lo = 0.0, hi = seq.t_read;
    const double gr = 0.61803398874989485;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    while (b - a > 1e-11) {
        if (s(x1) < s(x2)) { a = x1; x1 = x2; x2 = a + gr * (b - a); }
        else { b = x2; x2 = x1; x1 = b - gr * (b - a); }
    }
    const double t_peak = 0.5 * (a + b);
    const double half = 0.5 * s(t_peak);
    auto bisect = [&](double left, double right) {
        // invariant: s - half changes sign across [left, right]
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (left + right);
            if ((s(left) - half) * (s(mid) - half) <= 0.0) right = mid;
            else left = mid;
        }
        return 0.5 * (left + right);
    };
    const double t_lo = bisect(0.0, t_peak);
    const double t_hi = bisect(t_peak, seq.t_read);
    CHECK(fwhm == doctest::Approx(t_hi - t_lo).epsilon(1e-6));
}

TEST_CASE("fwhm reports which side of the pulse is missing") {
    PulseTrace rising;  // still climbing at the end of the window
    for (int i = 0; i <= 100; ++i) {
        rising.times.push_back(0.1 * i);
        rising.values.push_back(static_cast<double>(i));
    }
    CHECK_THROWS_AS(pulse_fwhm(rising), TruncatedPulse);

    PulseTrace falling;  // peak at the first sample
    for (int i = 0; i <= 100; ++i) {
        falling.times.push_back(0.1 * i);
        falling.values.push_back(std::exp(-0.1 * i));
    }
    CHECK_THROWS_AS(pulse_fwhm(falling), TruncatedPulse);
}

TEST_CASE("peak scales with the stored intensity decay") {
    const AtomParams atom = unit_atom(0.02);
    SignalNormalization norm;
    TimeSequence seq;
    seq.t_read = 60.0;
    seq.dt = 1e-3;
    const double i_r = 3.0;
    const Complex rho{0.2, 0.0};
    const PulseTrace fresh =
        sample_signal_closed(make_grating(rho), i_r, atom, norm, seq);
    const double t_s = 30.0;
    const PulseTrace aged = sample_signal_closed(
        make_grating(rho * std::exp(-0.02 * t_s)), i_r, atom, norm, seq);
    CHECK(pulse_peak(aged) ==
          doctest::Approx(pulse_peak(fresh) * std::exp(-2.0 * 0.02 * t_s))
              .epsilon(1e-12));
    // The pulse shape (and hence its width) is unchanged by storage.
    CHECK(pulse_fwhm(aged) ==
          doctest::Approx(pulse_fwhm(fresh)).epsilon(1e-12));
}

TEST_CASE("detector low-pass") {
    SUBCASE("step response") {
        PulseTrace step;
        const double dt = 1e-4, tau = 0.3;
        for (int i = 0; i <= 50000; ++i) {
            step.times.push_back(i * dt);
            step.values.push_back(1.0);
        }
        const PulseTrace out = apply_detector_lowpass(step, tau);
        REQUIRE(out.times.size() == step.times.size());
        double worst = 0.0;
        for (std::size_t i = 0; i < out.times.size(); i += 503) {
            const double expected = 1.0 - std::exp(-out.times[i] / tau);
            worst = std::max(worst, std::abs(out.values[i] - expected));
        }
        CHECK(worst < 1e-3);  // discrete-input staircase error ~ dt/tau
    }
    SUBCASE("smoothing lowers the peak and delays it") {
        const AtomParams atom = unit_atom(0.02);
        SignalNormalization norm;
        TimeSequence seq;
        seq.t_read = 40.0;
        seq.dt = 1e-3;
        const PulseTrace raw = sample_signal_closed(
            make_grating(Complex{0.2, 0.0}), 3.0, atom, norm, seq);
        const PulseTrace smooth = apply_detector_lowpass(raw, 2.0);
        CHECK(pulse_peak(smooth) < pulse_peak(raw));
        // Total charge is conserved up to the tail left in the filter.
        CHECK(pulse_energy_numeric(smooth) ==
              doctest::Approx(pulse_energy_numeric(raw)).epsilon(0.05));
    }
}

TEST_CASE("far-field amplitude structure") {
    const AtomParams atom = unit_atom(0.02);
    SignalNormalization norm;
    norm.dipole_scale = 0.8;
    CloudGeometry cloud;
    cloud.n_atoms = 5e7;
    const double lambda = kCesiumD2Wavelength;
    const double k0 = kTwoPi / lambda;
    cloud.rms_width = 20.0 * lambda;
    const double theta = 60e-3;
    cloud.k_wprime =
        Eigen::Vector3d{k0 * std::sin(theta), 0.0, k0 * std::cos(theta)};
    cloud.validate(lambda);

    const StoredGrating g = make_grating(Complex{0.15, 0.05});
    const double i_r = 3.0, t = 2.0;
    const Complex peak = farfield_amplitude(-cloud.k_wprime, t, g, cloud, i_r,
                                            atom, norm);
    SUBCASE("phase-matched peak value") {
        const double f = f_read_profile(t, i_r, atom.i_sat_b, atom);
        const double expected =
            norm.dipole_scale * cloud.n_atoms * std::abs(g.rho_ab_s) * f;
        CHECK(std::abs(peak) == doctest::Approx(expected).epsilon(1e-14));
    }
    SUBCASE("falls to exp(-1/2) one inverse cloud width away") {
        Eigen::Vector3d k = -cloud.k_wprime;
        k.y() += 1.0 / cloud.rms_width;
        const Complex off = farfield_amplitude(k, t, g, cloud, i_r, atom, norm);
        CHECK(std::abs(off) ==
              doctest::Approx(std::abs(peak) * std::exp(-0.5)).epsilon(1e-13));
    }
    SUBCASE("matches direct quadrature of the cloud integral") {
        // The envelope is the Fourier transform of the Gaussian density;
        // it factorizes, so 1D Riemann sums over +-8 L are an independent
        // oracle for the 3D integral.
        Eigen::Vector3d k = -cloud.k_wprime;
        k.x() += 0.7 / cloud.rms_width;
        k.z() -= 0.4 / cloud.rms_width;
        const Eigen::Vector3d q = k + cloud.k_wprime;
        const double l = cloud.rms_width;
        auto dim = [&](double qi) {
            const int n = 4000;
            const double half = 8.0 * l, h = 2.0 * half / n;
            Complex acc{0.0, 0.0};
            for (int i = 0; i <= n; ++i) {
                const double x = -half + i * h;
                const double w = (i == 0 || i == n) ? 0.5 : 1.0;
                acc += w * std::exp(-x * x / (2.0 * l * l)) *
                       std::exp(Complex{0.0, -qi * x});
            }
            return acc * h / std::sqrt(kTwoPi * l * l);
        };
        const Complex envelope = dim(q.x()) * dim(q.y()) * dim(q.z());
        const double f = f_read_profile(t, i_r, atom.i_sat_b, atom);
        const double expected = norm.dipole_scale * cloud.n_atoms *
                                std::abs(g.rho_ab_s) * f * std::abs(envelope);
        const Complex direct =
            farfield_amplitude(k, t, g, cloud, i_r, atom, norm);
        CHECK(std::abs(direct) ==
              doctest::Approx(expected).epsilon(1e-6));
    }
    SUBCASE("intensity second moment gives back the cloud width") {
        // Along y the amplitude envelope is exp(-q^2 L^2 / 2), so the
        // intensity is Gaussian with rms 1/(sqrt(2) L); verify by
        // discrete moments.
        double norm0 = 0.0, second = 0.0;
        const int n = 2000;
        const double span = 6.0 / cloud.rms_width;
        for (int i = 0; i <= n; ++i) {
            const double qy = -span + 2.0 * span * i / n;
            Eigen::Vector3d k = -cloud.k_wprime;
            k.y() += qy;
            const double inten =
                std::norm(farfield_amplitude(k, t, g, cloud, i_r, atom, norm));
            norm0 += inten;
            second += qy * qy * inten;
        }
        const double rms = std::sqrt(second / norm0);
        CHECK(rms == doctest::Approx(1.0 / (std::sqrt(2.0) * cloud.rms_width))
                         .epsilon(1e-4));
    }
}

TEST_CASE("grating period") {
    SUBCASE("reference geometry") {
        const double period = grating_period(852.35e-9, 60e-3);
        CHECK(period == doctest::Approx(852.35e-9 /
                                        (2.0 * std::sin(30e-3)))
                            .epsilon(1e-15));
        CHECK(period == doctest::Approx(14.2e-6).epsilon(0.01));
    }
    SUBCASE("counter-propagating limit") {
        CHECK(grating_period(800e-9, 3.14159265358979323846) ==
              doctest::Approx(400e-9).epsilon(1e-12));
    }
    SUBCASE("small angles double the period when halved") {
        const double p1 = grating_period(852e-9, 2e-3);
        const double p2 = grating_period(852e-9, 1e-3);
        CHECK(p2 / p1 == doctest::Approx(2.0).epsilon(1e-6));
    }
}

TEST_CASE("retrieved energy saturates with read intensity") {
    const AtomParams atom = unit_atom(0.02);
    SignalNormalization norm;
    const StoredGrating g = make_grating(Complex{0.2, 0.0});
    double prev = 0.0, prev_gain = 1e300;
    for (int i = 1; i <= 40; ++i) {
        const double i_r = 0.05 * i * i;  // widening steps
        const double u = pulse_energy_closed(g, i_r, atom, norm);
        CHECK(u > prev);  // increasing
        const double gain = u - prev;
        CHECK(gain < prev_gain * (1.0 + 1e-12));  // concave in this ordering
        prev = u;
        prev_gain = gain;
    }
    // Half the asymptote is reached exactly at x = gamma.
    const double x_half = 0.02;
    const double i_half = 2.0 * atom.i_sat_b * x_half;
    const double u_half = pulse_energy_closed(g, i_half, atom, norm);
    const double u_inf = pulse_energy_closed(g, 1e12, atom, norm);
    CHECK(u_half == doctest::Approx(0.5 * u_inf).epsilon(1e-9));
}

TEST_CASE("pulse narrows monotonically with read intensity") {
    const AtomParams atom = unit_atom(0.014);
    SignalNormalization norm;
    const StoredGrating g = make_grating(Complex{0.15, 0.0});
    double prev = 1e300;
    for (double i_r : {0.3, 0.8, 1.5, 3.0, 6.0, 12.0}) {
        TimeSequence seq;
        seq.t_read = 400.0;
        seq.dt = 1e-3;
        const PulseTrace trace = sample_signal_closed(g, i_r, atom, norm, seq);
        const double w = pulse_fwhm(trace);
        CHECK(w < prev);
        prev = w;
    }
}
