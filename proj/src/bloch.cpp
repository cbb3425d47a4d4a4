#include "grating/bloch.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace grating {

double rabi_ratio_from_intensity(double intensity, double i_sat) {
    if (i_sat <= 0.0) throw InvalidParameter("i_sat must be > 0");
    if (intensity < 0.0) throw InvalidParameter("intensity must be >= 0");
    return std::sqrt(intensity / (2.0 * i_sat));
}

DensityMatrix3 bloch_rhs_write(const DensityMatrix3& s, Complex omega_w,
                               Complex omega_wp, const AtomParams& params) {
    const double g22 = params.gamma22_norm();
    const double ga = params.branch_a_norm();
    const double gb = params.branch_b_norm();
    const double gg = params.gamma_g_norm();

    DensityMatrix3 d;
    const double pump_a = 2.0 * std::real(omega_w * s.sigma_a2);
    const double pump_b = 2.0 * std::real(omega_wp * s.sigma_b2);
    d.rho22 = pump_a + pump_b - g22 * s.rho22;
    d.rho_aa = -pump_a + ga * s.rho22;
    d.rho_bb = -pump_b + gb * s.rho22;
    d.sigma_a2 = -std::conj(omega_w) * (s.rho22 - s.rho_aa) +
                 std::conj(omega_wp) * s.rho_ab - s.sigma_a2;
    // rho_{1b,1a} = conj(rho_ab)
    d.sigma_b2 = -std::conj(omega_wp) * (s.rho22 - s.rho_bb) +
                 std::conj(omega_w) * std::conj(s.rho_ab) - s.sigma_b2;
    // sigma_{2,1b} = conj(sigma_b2)
    d.rho_ab = -std::conj(omega_w) * std::conj(s.sigma_b2) -
               omega_wp * s.sigma_a2 - gg * s.rho_ab;
    return d;
}

std::pair<Complex, Complex> bloch_rhs_read(Complex sigma_a2, Complex rho_ab,
                                           Complex omega_r,
                                           const AtomParams& params) {
    const double gg = params.gamma_g_norm();
    return {std::conj(omega_r) * rho_ab - sigma_a2,
            -omega_r * sigma_a2 - gg * rho_ab};
}

namespace {

// Reduced real coordinates with rho_bb = 1 - rho22 - rho_aa eliminated.
using Vec8 = Eigen::Matrix<double, 8, 1>;

Vec8 reduce(const DensityMatrix3& s) {
    Vec8 v;
    v << s.rho22, s.rho_aa, s.sigma_a2.real(), s.sigma_a2.imag(),
        s.sigma_b2.real(), s.sigma_b2.imag(), s.rho_ab.real(),
        s.rho_ab.imag();
    return v;
}

DensityMatrix3 expand(const Vec8& v) {
    DensityMatrix3 s;
    s.rho22 = v[0];
    s.rho_aa = v[1];
    s.rho_bb = 1.0 - v[0] - v[1];
    s.sigma_a2 = {v[2], v[3]};
    s.sigma_b2 = {v[4], v[5]};
    s.rho_ab = {v[6], v[7]};
    return s;
}

// Derivative of the reduced coordinates at reduced point v.
Vec8 reduced_rhs(const Vec8& v, Complex w, Complex wp, const AtomParams& p) {
    return reduce(bloch_rhs_write(expand(v), w, wp, p));
}

}  // namespace

DensityMatrix3 steady_state_write(const AtomParams& params, Complex omega_w,
                                  Complex omega_wp) {
    params.validate();

    // The reduced system is affine: F(v) = M v + c.  Column-probe M and c
    // from the same right-hand side the integrator uses.
    const Vec8 c = reduced_rhs(Vec8::Zero(), omega_w, omega_wp, params);
    Eigen::Matrix<double, 8, 8> M;
    for (int j = 0; j < 8; ++j)
        M.col(j) = reduced_rhs(Vec8::Unit(j), omega_w, omega_wp, params) - c;

    Eigen::FullPivLU<Eigen::Matrix<double, 8, 8>> lu(M);
    lu.setThreshold(1e-13);
    const int rank = static_cast<int>(lu.rank());
    if (rank < 8) {
        throw DegenerateSteadyState(
            "steady state is not unique (dark-state family); null-space "
            "dimension " + std::to_string(8 - rank),
            8 - rank);
    }
    const Vec8 v = lu.solve(-c);
    return expand(v);
}

Complex coherence_steady_closed(const AtomParams& params, Complex omega_w,
                                Complex omega_wp) {
    const double w2 = std::norm(omega_w);
    const double v2 = std::norm(omega_wp);
    const double gg = params.gamma_g_norm();
    const double numerator =
        params.branch_a_norm() * v2 + params.branch_b_norm() * w2;
    const double a = numerator * (gg + w2 + v2) + 6.0 * gg * v2 * w2;
    if (a == 0.0)
        throw UndefinedValue(
            "steady coherence undefined: both write fields vanish");
    return -(numerator / a) * std::conj(omega_w) * omega_wp;
}

Complex coherence_steady_small_gamma(Complex omega_w, Complex omega_wp) {
    const double denom = std::norm(omega_w) + std::norm(omega_wp);
    if (denom == 0.0)
        throw UndefinedValue(
            "steady coherence undefined: both write fields vanish");
    return -std::conj(omega_w) * omega_wp / denom;
}

}  // namespace grating
