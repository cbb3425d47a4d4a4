#include "grating/sweeps.hpp"

#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>

namespace grating {

unsigned sweep_worker_count() {
    if (const char* env = std::getenv("GRATING_WORKERS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw >= 1 ? hw : 1;
}

namespace {

void parallel_rows(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers =
        std::min<std::size_t>(sweep_worker_count(), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto work = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

struct RowInputs {
    double i_w_eff;
    double i_wp;
    double i_r_eff;
    double t_store_internal;
};

// Window long enough that the trace integral covers >= 60 decay times of
// |f_R|^2 (slow exponent 2(gamma1 - gamma2) when damped, 2 gamma1 when
// oscillatory).
double read_window(const AtomParams& atom, double i_r_eff, double t_read_min) {
    const double x = i_r_eff / (2.0 * atom.i_sat_b);
    const ReadRates r = read_rates(atom, Complex{0.0, std::sqrt(x)});
    const double slow = r.gamma2_sq > 0.0
                            ? 2.0 * (r.gamma1 - std::sqrt(r.gamma2_sq))
                            : 2.0 * r.gamma1;
    return std::max(t_read_min, 60.0 / slow);
}

SweepRow eval_row(const ScenarioParams& sc, const RowInputs& in,
                  bool need_trace) {
    const AtomParams& atom = sc.atom;
    const double gg = atom.gamma_g_norm();

    double modulus = 0.0;
    if (in.i_w_eff > 0.0 || in.i_wp > 0.0)
        modulus = stored_coherence_modulus(in.i_w_eff, in.i_wp, atom.i_sat_a,
                                           atom.i_sat_b, gg,
                                           in.t_store_internal);
    StoredGrating grating;
    grating.rho_ab_s = modulus;
    grating.t_store_applied = in.t_store_internal;

    const double us_per_internal = atom.internal_to_us(1.0);

    SweepRow row;
    row.energy =
        pulse_energy_closed(grating, in.i_r_eff, atom, sc.norm) *
        us_per_internal;

    if (need_trace && in.i_r_eff > 0.0 && modulus > 0.0) {
        TimeSequence seq = sc.seq;
        seq.t_read = read_window(atom, in.i_r_eff, sc.seq.t_read);
        const PulseTrace trace =
            sample_signal_closed(grating, in.i_r_eff, atom, sc.norm, seq);
        row.fwhm_us = pulse_fwhm(trace) * us_per_internal;
        row.peak = pulse_peak(trace);
        row.energy_numeric = pulse_energy_numeric(trace) * us_per_internal;
    }
    return row;
}

void check_grid(const std::vector<double>& grid) {
    if (grid.empty()) throw InvalidParameter("sweep grid must be non-empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1]))
            throw InvalidParameter("sweep grid must be strictly increasing");
}

std::vector<std::pair<std::string, std::string>> fixed_record(
    const ScenarioParams& sc) {
    auto str = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.17g", v);
        return std::string(buf);
    };
    const AtomParams& a = sc.atom;
    return {
        {"gamma12_rad_per_s", str(a.gamma12)},
        {"gamma22_rad_per_s", str(a.gamma22)},
        {"gamma_g_over_gamma12", str(a.gamma_g_norm())},
        {"i_sat_a_mw_per_cm2", str(a.i_sat_a)},
        {"i_sat_b_mw_per_cm2", str(a.i_sat_b)},
        {"i_w_mw_per_cm2", str(sc.beams.i_w)},
        {"i_wp_mw_per_cm2", str(sc.beams.i_wp)},
        {"i_r_mw_per_cm2", str(sc.beams.i_r)},
        {"rescale_read", str(sc.beams.rescale_read)},
        {"rescale_write_ratio", str(sc.beams.rescale_write_ratio)},
        {"t_store_us", str(a.internal_to_us(sc.seq.t_store))},
        {"dt_internal", str(sc.seq.dt)},
        {"amp_const", str(sc.norm.amp_const)},
    };
}

}  // namespace

SweepTable sweep_read_intensity(const std::vector<double>& i_r_grid,
                                const ScenarioParams& fixed) {
    check_grid(i_r_grid);
    fixed.validate();
    SweepTable table;
    table.parameter = "i_r_mw_per_cm2";
    table.fixed = fixed_record(fixed);
    table.rows.resize(i_r_grid.size());
    parallel_rows(i_r_grid.size(), [&](std::size_t i) {
        RowInputs in{fixed.beams.i_w_effective(), fixed.beams.i_wp,
                     fixed.beams.rescale_read * i_r_grid[i],
                     fixed.seq.t_store};
        table.rows[i] = eval_row(fixed, in, true);
        table.rows[i].param = i_r_grid[i];
    });
    return table;
}

SweepTable sweep_write_intensity(const std::vector<double>& i_w_grid,
                                 const ScenarioParams& fixed) {
    check_grid(i_w_grid);
    fixed.validate();
    SweepTable table;
    table.parameter = "i_w_mw_per_cm2";
    table.fixed = fixed_record(fixed);
    table.rows.resize(i_w_grid.size());
    parallel_rows(i_w_grid.size(), [&](std::size_t i) {
        RowInputs in{fixed.beams.rescale_write_ratio * i_w_grid[i],
                     fixed.beams.i_wp, fixed.beams.i_r_effective(),
                     fixed.seq.t_store};
        table.rows[i] = eval_row(fixed, in, true);
        table.rows[i].param = i_w_grid[i];
    });
    return table;
}

SweepTable sweep_storage_time(const std::vector<double>& t_s_grid_us,
                              const ScenarioParams& fixed) {
    check_grid(t_s_grid_us);
    if (t_s_grid_us.front() < 0.0)
        throw InvalidParameter("storage times must be >= 0");
    fixed.validate();
    SweepTable table;
    table.parameter = "t_store_us";
    table.fixed = fixed_record(fixed);
    table.rows.resize(t_s_grid_us.size());
    parallel_rows(t_s_grid_us.size(), [&](std::size_t i) {
        RowInputs in{fixed.beams.i_w_effective(), fixed.beams.i_wp,
                     fixed.beams.i_r_effective(),
                     fixed.atom.us_to_internal(t_s_grid_us[i])};
        table.rows[i] = eval_row(fixed, in, true);
        table.rows[i].param = t_s_grid_us[i];
    });
    return table;
}

FitResult fit_scale_parameter(const std::vector<double>& param_values,
                              const std::vector<double>& observed,
                              ScaleTarget which, Observable observable,
                              double lo, double hi,
                              const ScenarioParams& fixed) {
    if (param_values.size() != observed.size() || param_values.empty())
        throw InvalidParameter(
            "fit_scale_parameter: data columns must be non-empty and match");
    if (!(lo > 0.0 && hi > lo))
        throw InvalidParameter("fit_scale_parameter: need 0 < lo < hi");

    const bool need_trace = observable != Observable::energy;

    auto model_column = [&](double scale) {
        std::vector<double> m(param_values.size());
        for (std::size_t i = 0; i < param_values.size(); ++i) {
            RowInputs in{fixed.beams.i_w_effective(), fixed.beams.i_wp,
                         fixed.beams.i_r_effective(), fixed.seq.t_store};
            if (which == ScaleTarget::read_rescale)
                in.i_r_eff = scale * param_values[i];
            else
                in.i_w_eff = scale * param_values[i];
            const SweepRow row = eval_row(fixed, in, need_trace);
            switch (observable) {
                case Observable::fwhm: m[i] = row.fwhm_us; break;
                case Observable::peak: m[i] = row.peak; break;
                case Observable::energy: m[i] = row.energy; break;
            }
        }
        return m;
    };

    FitResult result;
    auto objective = [&](double scale) {
        const std::vector<double> m = model_column(scale);
        double alpha = 1.0;
        if (observable != Observable::fwhm) {
            double mm = 0.0, my = 0.0;
            for (std::size_t i = 0; i < m.size(); ++i) {
                mm += m[i] * m[i];
                my += m[i] * observed[i];
            }
            alpha = mm > 0.0 ? my / mm : 1.0;
        }
        double rss = 0.0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            const double r = observed[i] - alpha * m[i];
            rss += r * r;
        }
        return rss;
    };

    const double tol = (hi - lo) * 1e-7;
    const double best = golden_section_minimize(objective, lo, hi, tol,
                                                &result.evaluations);
    result.estimates["scale"] = best;
    result.residual = objective(best);
    ++result.evaluations;
    if (best - lo < 2.0 * tol || hi - best < 2.0 * tol) {
        result.converged = false;
        result.note = "minimum at bound; widen the search interval";
    } else {
        result.converged = true;
    }
    return result;
}

}  // namespace grating
