#include "grating/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "grating/trace_io.hpp"

namespace grating {

AtomParams RunConfig::atom_params() const {
    AtomParams p;
    p.gamma22 = kTwoPi * atom.gamma22_over_2pi_mhz * 1e6;
    p.gamma12 = kTwoPi * atom.gamma12_over_2pi_mhz * 1e6;
    p.gamma_g = atom.gamma_g_over_gamma12 * p.gamma12;
    p.branch_a = atom.branch_a_fraction * p.gamma22;
    p.branch_b = (1.0 - atom.branch_a_fraction) * p.gamma22;
    p.i_sat_a = atom.i_sat_a_mw_per_cm2;
    p.i_sat_b = atom.i_sat_b_mw_per_cm2;
    return p;
}

BeamSet RunConfig::beam_set() const {
    BeamSet b;
    b.i_w = beams.i_w_mw_per_cm2;
    b.i_wp = beams.i_wp_mw_per_cm2;
    b.i_r = beams.i_r_mw_per_cm2;
    b.theta = beams.theta_mrad * 1e-3;
    b.wavelength = beams.wavelength_nm * 1e-9;
    b.rescale_read = beams.rescale_read;
    b.rescale_write_ratio = beams.rescale_write_ratio;
    return b;
}

ScenarioParams RunConfig::scenario() const {
    ScenarioParams sc;
    sc.atom = atom_params();
    sc.beams = beam_set();
    sc.seq.t_write = sc.atom.us_to_internal(sequence.t_write_us);
    sc.seq.t_store = sc.atom.us_to_internal(sequence.t_store_us);
    sc.seq.t_read = sc.atom.us_to_internal(sequence.t_read_us);
    sc.seq.dt = sc.atom.us_to_internal(sequence.dt_us);
    sc.norm.amp_const = normalization.amp_const;
    sc.norm.dipole_scale = normalization.dipole_scale;
    return sc;
}

CloudGeometry RunConfig::cloud_geometry() const {
    if (!cloud)
        throw ConfigError("this command needs a [cloud] section");
    CloudGeometry g;
    g.n_atoms = cloud->n_atoms;
    g.rms_width = cloud->rms_width_um * 1e-6;
    const BeamSet b = beam_set();
    const double k = kTwoPi / b.wavelength;
    g.k_wprime = Eigen::Vector3d{k * std::sin(b.theta), 0.0,
                                 k * std::cos(b.theta)};
    return g;
}

void RunConfig::validate() const {
    try {
        scenario().validate();
        if (cloud) cloud_geometry().validate(beam_set().wavelength);
    } catch (const InvalidParameter& e) {
        throw ConfigError(e.what());
    }
    if (detector.tau_us <= 0.0)
        throw ConfigError("detector.tau_us must be > 0");
    if (output.format != "csv" && output.format != "json" &&
        output.format != "svg")
        throw ConfigError("output.format must be csv, json, or svg");
}

namespace {

struct KeyBinding {
    std::function<void(RunConfig&, const std::string&, std::size_t)> set;
};

double parse_number(const std::string& value, std::size_t line_no) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(value, &pos);
    } catch (const std::exception&) {
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": malformed number '" + value + "'");
    }
    if (pos != value.size())
        throw ConfigError("config line " + std::to_string(line_no) +
                          ": trailing characters in '" + value + "'");
    return v;
}

bool parse_bool(const std::string& value, std::size_t line_no) {
    if (value == "true") return true;
    if (value == "false") return false;
    throw ConfigError("config line " + std::to_string(line_no) +
                      ": expected true/false, got '" + value + "'");
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t");
    return s.substr(begin, end - begin + 1);
}

}  // namespace

RunConfig parse_config(std::istream& in) {
    RunConfig cfg;
    bool have_gamma12 = false, have_i_sat_a = false;

    std::map<std::string, KeyBinding> keys;
    auto bind = [&](const std::string& name, auto setter) {
        keys[name] = KeyBinding{
            [setter](RunConfig& c, const std::string& v, std::size_t ln) {
                setter(c, parse_number(v, ln));
            }};
    };
    bind("atom.gamma22_over_2pi_mhz",
         [](RunConfig& c, double v) { c.atom.gamma22_over_2pi_mhz = v; });
    keys["atom.gamma12_over_2pi_mhz"] = KeyBinding{
        [&have_gamma12](RunConfig& c, const std::string& v, std::size_t ln) {
            c.atom.gamma12_over_2pi_mhz = parse_number(v, ln);
            have_gamma12 = true;
        }};
    bind("atom.gamma_g_over_gamma12",
         [](RunConfig& c, double v) { c.atom.gamma_g_over_gamma12 = v; });
    bind("atom.branch_a_fraction",
         [](RunConfig& c, double v) { c.atom.branch_a_fraction = v; });
    bind("atom.i_sat_b_mw_per_cm2",
         [](RunConfig& c, double v) { c.atom.i_sat_b_mw_per_cm2 = v; });
    keys["atom.i_sat_a_mw_per_cm2"] = KeyBinding{
        [&have_i_sat_a](RunConfig& c, const std::string& v, std::size_t ln) {
            c.atom.i_sat_a_mw_per_cm2 = parse_number(v, ln);
            have_i_sat_a = true;
        }};
    bind("beams.i_w_mw_per_cm2",
         [](RunConfig& c, double v) { c.beams.i_w_mw_per_cm2 = v; });
    bind("beams.i_wp_mw_per_cm2",
         [](RunConfig& c, double v) { c.beams.i_wp_mw_per_cm2 = v; });
    bind("beams.i_r_mw_per_cm2",
         [](RunConfig& c, double v) { c.beams.i_r_mw_per_cm2 = v; });
    bind("beams.theta_mrad",
         [](RunConfig& c, double v) { c.beams.theta_mrad = v; });
    bind("beams.wavelength_nm",
         [](RunConfig& c, double v) { c.beams.wavelength_nm = v; });
    bind("beams.rescale_read",
         [](RunConfig& c, double v) { c.beams.rescale_read = v; });
    bind("beams.rescale_write_ratio",
         [](RunConfig& c, double v) { c.beams.rescale_write_ratio = v; });
    bind("sequence.t_write_us",
         [](RunConfig& c, double v) { c.sequence.t_write_us = v; });
    bind("sequence.t_store_us",
         [](RunConfig& c, double v) { c.sequence.t_store_us = v; });
    bind("sequence.t_read_us",
         [](RunConfig& c, double v) { c.sequence.t_read_us = v; });
    bind("sequence.dt_us",
         [](RunConfig& c, double v) { c.sequence.dt_us = v; });
    bind("cloud.n_atoms", [](RunConfig& c, double v) { c.cloud->n_atoms = v; });
    bind("cloud.rms_width_um",
         [](RunConfig& c, double v) { c.cloud->rms_width_um = v; });
    bind("normalization.amp_const",
         [](RunConfig& c, double v) { c.normalization.amp_const = v; });
    bind("normalization.dipole_scale",
         [](RunConfig& c, double v) { c.normalization.dipole_scale = v; });
    bind("detector.tau_us",
         [](RunConfig& c, double v) { c.detector.tau_us = v; });
    keys["detector.enabled"] = KeyBinding{
        [](RunConfig& c, const std::string& v, std::size_t ln) {
            c.detector.enabled = parse_bool(v, ln);
        }};
    keys["output.format"] = KeyBinding{
        [](RunConfig& c, const std::string& v, std::size_t) {
            c.output.format = v;
        }};
    keys["output.path"] = KeyBinding{
        [](RunConfig& c, const std::string& v, std::size_t) {
            c.output.path = v;
        }};

    std::string line, section;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError("config line " + std::to_string(line_no) +
                                  ": unterminated section header");
            section = trim(line.substr(1, line.size() - 2));
            if (section == "cloud" && !cfg.cloud)
                cfg.cloud = RunConfig::Cloud{};
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": expected key = value");
        const std::string key = section + "." + trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = keys.find(key);
        if (it == keys.end())
            throw ConfigError("config line " + std::to_string(line_no) +
                              ": unknown key '" + key + "'");
        it->second.set(cfg, value, line_no);
    }

    if (!have_gamma12)
        cfg.atom.gamma12_over_2pi_mhz = cfg.atom.gamma22_over_2pi_mhz / 2.0;
    if (!have_i_sat_a)
        cfg.atom.i_sat_a_mw_per_cm2 = 15.0 * cfg.atom.i_sat_b_mw_per_cm2;
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse_config(in);
}

void serialize_config(std::ostream& out, const RunConfig& c) {
    auto kv = [&](const char* key, double v) {
        out << key << " = " << format_double(v) << "\n";
    };
    out << "[atom]\n";
    kv("gamma22_over_2pi_mhz", c.atom.gamma22_over_2pi_mhz);
    kv("gamma12_over_2pi_mhz", c.atom.gamma12_over_2pi_mhz);
    kv("gamma_g_over_gamma12", c.atom.gamma_g_over_gamma12);
    kv("branch_a_fraction", c.atom.branch_a_fraction);
    kv("i_sat_b_mw_per_cm2", c.atom.i_sat_b_mw_per_cm2);
    kv("i_sat_a_mw_per_cm2", c.atom.i_sat_a_mw_per_cm2);
    out << "\n[beams]\n";
    kv("i_w_mw_per_cm2", c.beams.i_w_mw_per_cm2);
    kv("i_wp_mw_per_cm2", c.beams.i_wp_mw_per_cm2);
    kv("i_r_mw_per_cm2", c.beams.i_r_mw_per_cm2);
    kv("theta_mrad", c.beams.theta_mrad);
    kv("wavelength_nm", c.beams.wavelength_nm);
    kv("rescale_read", c.beams.rescale_read);
    kv("rescale_write_ratio", c.beams.rescale_write_ratio);
    out << "\n[sequence]\n";
    kv("t_write_us", c.sequence.t_write_us);
    kv("t_store_us", c.sequence.t_store_us);
    kv("t_read_us", c.sequence.t_read_us);
    kv("dt_us", c.sequence.dt_us);
    if (c.cloud) {
        out << "\n[cloud]\n";
        kv("n_atoms", c.cloud->n_atoms);
        kv("rms_width_um", c.cloud->rms_width_um);
    }
    out << "\n[normalization]\n";
    kv("amp_const", c.normalization.amp_const);
    kv("dipole_scale", c.normalization.dipole_scale);
    out << "\n[detector]\n";
    out << "enabled = " << (c.detector.enabled ? "true" : "false") << "\n";
    kv("tau_us", c.detector.tau_us);
    out << "\n[output]\n";
    out << "format = " << c.output.format << "\n";
    out << "path = " << c.output.path << "\n";
}

}  // namespace grating
