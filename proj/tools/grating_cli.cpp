#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "grating/config.hpp"
#include "grating/trace_io.hpp"

namespace {

using namespace grating;
using nlohmann::json;

// Exit codes: 0 success, 2 config/validation, 3 data format / file IO,
// 4 numerical failure.
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumerical = 4;

struct OutputSink {
    std::ofstream file;
    std::ostream* stream = &std::cout;

    explicit OutputSink(const std::string& path) {
        if (!path.empty()) {
            file.open(path);
            if (!file)
                throw DataFormatError("cannot open output file: " + path);
            stream = &file;
        }
    }
    std::ostream& out() { return *stream; }
};

std::pair<Complex, Complex> write_rabi(const RunConfig& cfg) {
    const AtomParams atom = cfg.atom_params();
    const BeamSet beams = cfg.beam_set();
    // Plane-wave convention: Omega/gamma12 = i sqrt(I / 2 I_sat).
    const Complex i{0.0, 1.0};
    return {i * rabi_ratio_from_intensity(beams.i_w_effective(), atom.i_sat_a),
            i * rabi_ratio_from_intensity(beams.i_wp, atom.i_sat_b)};
}

StoredGrating stored_grating_from(const RunConfig& cfg) {
    const AtomParams atom = cfg.atom_params();
    const auto [omega_w, omega_wp] = write_rabi(cfg);
    const DensityMatrix3 steady = steady_state_write(atom, omega_w, omega_wp);
    const double t_store = atom.us_to_internal(cfg.sequence.t_store_us);
    if (!storage_regime_valid(t_store))
        std::cerr << "warning: t_store < 5/gamma12; the stored-state "
                     "approximation assumes the optical coherences have "
                     "relaxed\n";
    return apply_storage(steady, t_store, atom);
}

PulseTrace to_microseconds(const PulseTrace& trace, const AtomParams& atom) {
    PulseTrace out = trace;
    for (double& t : out.times) t = atom.internal_to_us(t);
    out.metadata["time_unit"] = "us";
    return out;
}

int cmd_steady(const RunConfig& cfg) {
    const AtomParams atom = cfg.atom_params();
    const auto [omega_w, omega_wp] = write_rabi(cfg);
    const DensityMatrix3 s = steady_state_write(atom, omega_w, omega_wp);
    const Complex closed = coherence_steady_closed(atom, omega_w, omega_wp);

    OutputSink sink(cfg.output.path);
    auto& out = sink.out();
    out << "steady state (linear solve):\n";
    out << "  rho22    = " << format_double(s.rho22) << "\n";
    out << "  rho_aa   = " << format_double(s.rho_aa) << "\n";
    out << "  rho_bb   = " << format_double(s.rho_bb) << "\n";
    out << "  sigma_a2 = " << format_double(s.sigma_a2.real()) << " + "
        << format_double(s.sigma_a2.imag()) << "i\n";
    out << "  sigma_b2 = " << format_double(s.sigma_b2.real()) << " + "
        << format_double(s.sigma_b2.imag()) << "i\n";
    out << "  rho_ab   = " << format_double(s.rho_ab.real()) << " + "
        << format_double(s.rho_ab.imag()) << "i\n";
    out << "closed-form rho_ab^e = " << format_double(closed.real()) << " + "
        << format_double(closed.imag()) << "i\n";
    out << "difference |linear - closed| = "
        << format_double(std::abs(s.rho_ab - closed)) << "\n";
    return 0;
}

int cmd_pulse(const RunConfig& cfg, bool numeric, bool compare) {
    const ScenarioParams sc = cfg.scenario();
    const StoredGrating grating = stored_grating_from(cfg);
    const double i_r = sc.beams.i_r_effective();

    std::vector<PulseTrace> traces;
    if (compare || !numeric)
        traces.push_back(to_microseconds(
            sample_signal_closed(grating, i_r, sc.atom, sc.norm, sc.seq),
            sc.atom));
    if (compare || numeric)
        traces.push_back(to_microseconds(
            sample_signal_numeric(grating, i_r, sc.atom, sc.norm, sc.seq),
            sc.atom));
    if (cfg.detector.enabled)
        for (auto& trace : traces)
            trace = apply_detector_lowpass(trace, cfg.detector.tau_us);

    OutputSink sink(cfg.output.path);
    if (cfg.output.format == "svg")
        write_polyline_svg(sink.out(), traces.front().times,
                           traces.front().values, "time [us]",
                           "signal [arb]");
    else
        write_traces_csv(sink.out(), traces);
    return 0;
}

std::vector<double> parse_grid(const std::string& spec) {
    double start, stop;
    int n;
    char c1, c2;
    std::istringstream ss(spec);
    if (!(ss >> start >> c1 >> stop >> c2 >> n) || c1 != ':' || c2 != ':' ||
        !ss.eof() || n < 1)
        throw ConfigError("--grid must be start:stop:n with n >= 1");
    std::vector<double> grid(n);
    for (int i = 0; i < n; ++i)
        grid[i] = n == 1 ? start
                         : start + (stop - start) * i / double(n - 1);
    return grid;
}

int cmd_sweep(const RunConfig& cfg, const std::string& param,
              const std::string& grid_spec) {
    const ScenarioParams sc = cfg.scenario();
    const std::vector<double> grid = parse_grid(grid_spec);
    SweepTable table;
    if (param == "read-intensity")
        table = sweep_read_intensity(grid, sc);
    else if (param == "write-intensity")
        table = sweep_write_intensity(grid, sc);
    else if (param == "storage-time")
        table = sweep_storage_time(grid, sc);
    else
        throw ConfigError("--param must be read-intensity, write-intensity, "
                          "or storage-time");

    OutputSink sink(cfg.output.path);
    if (cfg.output.format == "svg") {
        std::vector<double> x, y;
        for (const auto& row : table.rows) {
            x.push_back(row.param);
            y.push_back(row.energy);
        }
        write_polyline_svg(sink.out(), x, y, table.parameter,
                           "energy [arb us]");
    } else {
        write_sweep_csv(sink.out(), table);
    }
    return 0;
}

json fit_to_json(const FitResult& fit) {
    json j;
    j["estimates"] = fit.estimates;
    j["residual"] = fit.residual;
    j["evaluations"] = fit.evaluations;
    j["converged"] = fit.converged;
    if (!fit.note.empty()) j["note"] = fit.note;
    return j;
}

int cmd_fit(const RunConfig& cfg, const std::string& data_path,
            const std::string& target, const std::string& convention,
            const std::string& observable, double lo, double hi) {
    FitResult fit;
    json j;
    if (target == "tau") {
        const auto traces = ingest_traces(data_path);
        std::vector<std::pair<double, double>> points;
        for (std::size_t i = 0; i < traces[0].times.size(); ++i)
            points.emplace_back(traces[0].times[i], traces[0].values[i]);
        const DecayConvention conv = convention == "intensity"
                                         ? DecayConvention::intensity
                                         : DecayConvention::amplitude;
        fit = fit_exponential(points, conv);
        j = fit_to_json(fit);
        j["target"] = "tau";
        j["convention"] = convention;
        j["tau_us"] = fit.estimates.at("tau");
        j["gamma_per_us"] = fit.estimates.at("decay_rate");
    } else if (target == "a" || target == "a-prime") {
        std::vector<double> params, values;
        read_sweep_columns(data_path, observable, params, values);
        const ScaleTarget which = target == "a" ? ScaleTarget::read_rescale
                                                : ScaleTarget::write_ratio;
        Observable obs = Observable::energy;
        if (observable == "fwhm_us") obs = Observable::fwhm;
        if (observable == "peak") obs = Observable::peak;
        if (lo <= 0.0) lo = target == "a" ? 1e-4 : 0.05;
        if (hi <= 0.0) hi = target == "a" ? 1.0 : 20.0;
        fit = fit_scale_parameter(params, values, which, obs, lo, hi,
                                  cfg.scenario());
        j = fit_to_json(fit);
        j["target"] = target;
        j["observable"] = observable;
    } else {
        throw ConfigError("--target must be tau, a, or a-prime");
    }

    OutputSink sink(cfg.output.path);
    sink.out() << j.dump(2) << "\n";
    if (!fit.converged) {
        std::cerr << "fit did not converge"
                  << (fit.note.empty() ? "" : ": " + fit.note) << "\n";
        return kExitNumerical;
    }
    return 0;
}

int cmd_farfield(const RunConfig& cfg, double time_us,
                 const std::string& plane, double extent, int npoints) {
    const ScenarioParams sc = cfg.scenario();
    const CloudGeometry cloud = cfg.cloud_geometry();
    cloud.validate(sc.beams.wavelength);
    const StoredGrating grating = stored_grating_from(cfg);
    const double t = sc.atom.us_to_internal(time_us);
    const double i_r = sc.beams.i_r_effective();

    Eigen::Vector3d e1, e2;
    if (plane == "xy") {
        e1 = Eigen::Vector3d::UnitX();
        e2 = Eigen::Vector3d::UnitY();
    } else if (plane == "xz") {
        e1 = Eigen::Vector3d::UnitX();
        e2 = Eigen::Vector3d::UnitZ();
    } else if (plane == "yz") {
        e1 = Eigen::Vector3d::UnitY();
        e2 = Eigen::Vector3d::UnitZ();
    } else {
        throw ConfigError("--plane must be xy, xz, or yz");
    }
    if (npoints < 2 || extent <= 0.0)
        throw ConfigError("--npoints must be >= 2 and --extent > 0");

    const double qmax = extent / cloud.rms_width;
    OutputSink sink(cfg.output.path);
    auto& out = sink.out();
    out << "# far-field intensity around -k_wprime, plane " << plane << "\n";
    out << "# q1_rad_per_m,q2_rad_per_m,intensity\n";
    for (int i = 0; i < npoints; ++i) {
        const double q1 = -qmax + 2.0 * qmax * i / (npoints - 1);
        for (int k = 0; k < npoints; ++k) {
            const double q2 = -qmax + 2.0 * qmax * k / (npoints - 1);
            const Eigen::Vector3d kvec = -cloud.k_wprime + q1 * e1 + q2 * e2;
            const Complex amp = farfield_amplitude(kvec, t, grating, cloud,
                                                   i_r, sc.atom, sc.norm);
            out << format_double(q1) << ',' << format_double(q2) << ','
                << format_double(std::norm(amp)) << '\n';
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stored light-grating simulator: write/store/read cycle of "
                 "a ground-state coherence grating in cold atoms"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_override;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")
            ->required();
        sub->add_option("--out", out_override,
                        "output path (overrides output.path)");
    };

    auto* steady = app.add_subcommand(
        "steady", "steady-state density matrix: linear solve vs closed form");
    add_common(steady);

    auto* pulse = app.add_subcommand(
        "pulse", "write -> store -> read; emit the retrieved pulse trace");
    add_common(pulse);
    bool flag_closed = false, flag_numeric = false, flag_compare = false;
    pulse->add_flag("--closed-form", flag_closed,
                    "closed-form evaluation path (default)");
    pulse->add_flag("--numeric", flag_numeric, "numerical-ODE path");
    pulse->add_flag("--compare", flag_compare, "emit both paths");

    auto* sweep = app.add_subcommand("sweep", "figure-regeneration tables");
    add_common(sweep);
    std::string sweep_param, grid_spec;
    sweep->add_option("--param", sweep_param,
                      "read-intensity | write-intensity | storage-time")
        ->required();
    sweep->add_option("--grid", grid_spec, "start:stop:n")->required();

    auto* fit = app.add_subcommand("fit", "decay / rescale-parameter fits");
    add_common(fit);
    std::string data_path, fit_target, convention = "amplitude";
    std::string fit_observable = "energy";
    double fit_lo = 0.0, fit_hi = 0.0;
    fit->add_option("--data", data_path, "input data file")->required();
    fit->add_option("--target", fit_target, "tau | a | a-prime")->required();
    fit->add_option("--convention", convention,
                    "decay-time convention: amplitude | intensity");
    fit->add_option("--observable", fit_observable,
                    "sweep column for scale fits: energy | fwhm_us | peak");
    fit->add_option("--lo", fit_lo, "lower bound for scale fits");
    fit->add_option("--hi", fit_hi, "upper bound for scale fits");

    auto* farfield = app.add_subcommand(
        "farfield", "|E_D|^2 on a k-grid around the phase-matched direction");
    add_common(farfield);
    double ff_time_us = 1.0, ff_extent = 3.0;
    int ff_npoints = 41;
    std::string ff_plane = "xy";
    farfield->add_option("--time", ff_time_us, "read time [us]");
    farfield->add_option("--plane", ff_plane, "xy | xz | yz");
    farfield->add_option("--extent", ff_extent, "half-extent in units of 1/L");
    farfield->add_option("--npoints", ff_npoints, "grid points per axis");

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig cfg = load_config(config_path);
        if (!out_override.empty()) cfg.output.path = out_override;
        cfg.validate();

        if (steady->parsed()) return cmd_steady(cfg);
        if (pulse->parsed()) {
            if (flag_closed && flag_numeric && !flag_compare)
                throw ConfigError(
                    "--closed-form and --numeric are exclusive; use --compare");
            return cmd_pulse(cfg, flag_numeric, flag_compare);
        }
        if (sweep->parsed()) return cmd_sweep(cfg, sweep_param, grid_spec);
        if (fit->parsed())
            return cmd_fit(cfg, data_path, fit_target, convention,
                           fit_observable, fit_lo, fit_hi);
        if (farfield->parsed())
            return cmd_farfield(cfg, ff_time_us, ff_plane, ff_extent,
                                ff_npoints);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const InvalidParameter& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const DataFormatError& e) {
        std::cerr << "data error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        std::cerr << "numerical error: " << e.what() << "\n";
        return kExitNumerical;
    }
    return 0;
}
