#include "grating/dynamics.hpp"

#include <cmath>

#include <Eigen/Dense>

namespace grating {

ReadRates read_rates(const AtomParams& params, Complex omega_r) {
    const double gg = params.gamma_g_norm();
    ReadRates r;
    r.gamma1 = 0.5 * (1.0 + gg);
    const double d = 1.0 - gg;
    r.gamma2_sq = 0.25 * d * d - std::norm(omega_r);
    return r;
}

double growth_kernel(double z, double t) {
    const double zt2 = z * t * t;
    if (std::abs(zt2) < 1e-6) {
        // sinh(st)/s = t (1 + z t^2/6 + z^2 t^4/120 + ...)
        return t * (1.0 + zt2 / 6.0 + zt2 * zt2 / 120.0);
    }
    if (z > 0.0) {
        const double s = std::sqrt(z);
        return std::sinh(s * t) / s;
    }
    const double s = std::sqrt(-z);
    return std::sin(s * t) / s;
}

double decayed_growth_kernel(const ReadRates& r, double t) {
    const double z = r.gamma2_sq;
    const double zt2 = z * t * t;
    if (std::abs(zt2) < 1e-6)
        return std::exp(-r.gamma1 * t) * t *
               (1.0 + zt2 / 6.0 + zt2 * zt2 / 120.0);
    if (z > 0.0) {
        // gamma2 < gamma1 always, so both exponents are negative.
        const double s = std::sqrt(z);
        return (std::exp(-(r.gamma1 - s) * t) - std::exp(-(r.gamma1 + s) * t)) /
               (2.0 * s);
    }
    const double s = std::sqrt(-z);
    return std::exp(-r.gamma1 * t) * std::sin(s * t) / s;
}

Complex sigma_read_closed(const StoredGrating& grating, Complex omega_r,
                          const AtomParams& params, double t) {
    if (t < 0.0) throw InvalidParameter("sigma_read_closed: t must be >= 0");
    const ReadRates r = read_rates(params, omega_r);
    return std::conj(omega_r) * grating.rho_ab_s * decayed_growth_kernel(r, t);
}

namespace {

// One-step RK4 propagator of a linear system x' = M x:
// P = I + hM + (hM)^2/2 + (hM)^3/6 + (hM)^4/24.
template <int N>
Eigen::Matrix<double, N, N> rk4_propagator(const Eigen::Matrix<double, N, N>& m,
                                           double h) {
    using Mat = Eigen::Matrix<double, N, N>;
    const Mat hm = h * m;
    Mat p = Mat::Identity() + hm;
    Mat term = hm;
    for (int k = 2; k <= 4; ++k) {
        term = (term * hm / static_cast<double>(k)).eval();
        p += term;
    }
    return p;
}

struct StepPlan {
    std::size_t n_steps;
    double h;
    std::size_t stride;
};

StepPlan plan_steps(double duration, double dt, std::size_t max_samples) {
    StepPlan plan;
    plan.n_steps = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(duration / dt)));
    plan.h = duration / static_cast<double>(plan.n_steps);
    plan.stride = std::max<std::size_t>(
        1, (plan.n_steps + max_samples - 1) / max_samples);
    return plan;
}

}  // namespace

Trajectory integrate_write(const AtomParams& params, Complex omega_w,
                           Complex omega_wp, const TimeSequence& seq,
                           const DensityMatrix3& init,
                           std::size_t max_samples) {
    params.validate();
    seq.validate();

    // The write-phase Bloch system is linear in the nine real state
    // coordinates; column-probe the generator from the right-hand side.
    using Mat9 = Eigen::Matrix<double, 9, 9>;
    using Vec9 = Eigen::Matrix<double, 9, 1>;
    Mat9 m;
    for (int j = 0; j < 9; ++j) {
        const DensityMatrix3 basis = DensityMatrix3::from_vector(Vec9::Unit(j));
        m.col(j) =
            bloch_rhs_write(basis, omega_w, omega_wp, params).to_vector();
    }

    const StepPlan plan = plan_steps(seq.t_write, seq.dt, max_samples);
    const Mat9 p = rk4_propagator<9>(m, plan.h);

    const double trace0 = init.trace();
    Vec9 x = init.to_vector();
    Trajectory traj;
    traj.times.reserve(plan.n_steps / plan.stride + 2);
    traj.states.reserve(plan.n_steps / plan.stride + 2);

    auto record = [&](std::size_t step) {
        const DensityMatrix3 s = DensityMatrix3::from_vector(x);
        if (std::abs(s.trace() - trace0) > 1e-8)
            throw IntegrationDiverged(
                "trace drift exceeds 1e-8 during write integration; "
                "reduce sequence.dt");
        for (double pop : {s.rho22, s.rho_aa, s.rho_bb})
            if (pop < -1e-8 || pop > 1.0 + 1e-8)
                throw IntegrationDiverged(
                    "population left [0,1] during write integration; "
                    "reduce sequence.dt");
        traj.times.push_back(static_cast<double>(step) * plan.h);
        traj.states.push_back(s);
    };

    record(0);
    for (std::size_t step = 1; step <= plan.n_steps; ++step) {
        x = (p * x).eval();
        if (step % plan.stride == 0 || step == plan.n_steps) record(step);
    }
    return traj;
}

ReadTrajectory integrate_read(const StoredGrating& grating, Complex omega_r,
                              const AtomParams& params,
                              const TimeSequence& seq,
                              std::size_t max_samples) {
    params.validate();
    seq.validate();

    using Mat4 = Eigen::Matrix<double, 4, 4>;
    using Vec4 = Eigen::Matrix<double, 4, 1>;
    Mat4 m;
    for (int j = 0; j < 4; ++j) {
        const Vec4 e = Vec4::Unit(j);
        const auto d = bloch_rhs_read({e[0], e[1]}, {e[2], e[3]}, omega_r,
                                      params);
        m.col(j) << d.first.real(), d.first.imag(), d.second.real(),
            d.second.imag();
    }

    const StepPlan plan = plan_steps(seq.t_read, seq.dt, max_samples);
    const Mat4 p = rk4_propagator<4>(m, plan.h);

    Vec4 x;
    x << 0.0, 0.0, grating.rho_ab_s.real(), grating.rho_ab_s.imag();

    ReadTrajectory traj;
    traj.times.reserve(plan.n_steps / plan.stride + 2);
    traj.states.reserve(plan.n_steps / plan.stride + 2);
    auto record = [&](std::size_t step) {
        traj.times.push_back(static_cast<double>(step) * plan.h);
        traj.states.emplace_back(Complex{x[0], x[1]}, Complex{x[2], x[3]});
    };

    record(0);
    for (std::size_t step = 1; step <= plan.n_steps; ++step) {
        x = (p * x).eval();
        if (step % plan.stride == 0 || step == plan.n_steps) record(step);
    }
    return traj;
}

StoredGrating apply_storage(const DensityMatrix3& steady, double t_store,
                            const AtomParams& params) {
    if (t_store < 0.0) throw InvalidParameter("t_store must be >= 0");
    StoredGrating g;
    g.rho_ab_s = steady.rho_ab * std::exp(-params.gamma_g_norm() * t_store);
    g.t_store_applied = t_store;
    return g;
}

}  // namespace grating
