#include "trinopo/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "trinopo/criteria.hpp"

namespace trinopo {

namespace {

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = [] {
        std::set<std::string> k = {
            "analysis.frequency_mhz",
            "pump.s_x",
            "pump.s_y",
            "cascade.available_power_mw",
            "cascade.tap_ratio",
            "cascade.diagnostic",
            "detection.eta_a2",
            "detection.eta_a3",
            "detection.eta_a4",
            "paths.attenuation_table",
            "paths.dispersion_data",
            "tuning.material",
            "tuning.pump_nm",
            "tuning.t_min_c",
            "tuning.t_max_c",
            "tuning.step_c",
            "tuning.anchor_temp_c",
            "tuning.anchor_signal_nm",
            "fiber.v_db",
            "fiber.cutoff_db",
            "fiber.max_km",
            "fiber.step_km",
            "fiber.wavelengths_nm",
            "oracle.system",
            "oracle.n_segments",
            "oracle.segment_length",
            "calibrate.targets",
            "calibrate.weights",
            "calibrate.gain_weights",
            "calibrate.max_iterations",
        };
        for (const char* nopo : {"nopo1", "nopo2"})
            for (const char* f :
                 {"pump_wavelength_nm", "signal_wavelength_nm", "idler_wavelength_nm",
                  "cavity_length_mm", "finesse", "t_out", "l_intra", "t_in_pump",
                  "p_threshold_mw", "p_pump_mw", "eta_pump_coupling"})
                k.insert(std::string(nopo) + "." + f);
        for (const char* p : {"detection_eta_a2", "detection_eta_a3", "detection_eta_a4",
                              "detection_eta_a34", "pump_s_x", "pump_s_y", "tap_ratio"})
            k.insert(std::string("calibrate.param.") + p);
        return k;
    }();
    return keys;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

ConfigFile ConfigFile::load(std::istream& is, const std::string& origin) {
    ConfigFile c;
    c.origin_ = origin;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": unknown key '" + key +
                              "'");
        if (value.empty())
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty value for '" + key +
                              "'");
        if (c.kv_.count(key))
            throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                              "' (first set on line " + std::to_string(c.kv_[key].second) + ")");
        c.kv_[key] = {value, lineno};
    }
    return c;
}

ConfigFile ConfigFile::load_path(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file '" + path + "'");
    return load(is, path);
}

bool ConfigFile::has(const std::string& key) const { return kv_.count(key) > 0; }

int ConfigFile::line_of(const std::string& key) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? 0 : it->second.second;
}

std::string ConfigFile::text(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end())
        throw ConfigError(origin_ + ": missing required key '" + key + "'");
    return it->second.first;
}

std::string ConfigFile::text_or(const std::string& key, const std::string& fallback) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? fallback : it->second.first;
}

double ConfigFile::number(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end())
        throw ConfigError(origin_ + ": missing required key '" + key + "'");
    const std::string& v = it->second.first;
    size_t used = 0;
    double d = 0.0;
    try {
        d = std::stod(v, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used != v.size())
        throw ConfigError(origin_ + ":" + std::to_string(it->second.second) + ": key '" + key +
                          "': not a plain number: '" + v +
                          "' (units are fixed by the key name)");
    return d;
}

double ConfigFile::number_or(const std::string& key, double fallback) const {
    return has(key) ? number(key) : fallback;
}

std::vector<double> ConfigFile::number_list(const std::string& key) const {
    const auto it = kv_.find(key);
    if (it == kv_.end())
        throw ConfigError(origin_ + ": missing required key '" + key + "'");
    std::istringstream ls(it->second.first);
    std::vector<double> out;
    std::string tok;
    while (ls >> tok) {
        try {
            size_t used = 0;
            out.push_back(std::stod(tok, &used));
            if (used != tok.size()) throw std::invalid_argument(tok);
        } catch (const std::exception&) {
            throw ConfigError(origin_ + ":" + std::to_string(it->second.second) + ": key '" + key +
                              "': bad number '" + tok + "'");
        }
    }
    return out;
}

namespace {

NopoParams nopo_from(const ConfigFile& c, const std::string& prefix) {
    NopoParams p;
    p.pump_wavelength_nm = c.number(prefix + ".pump_wavelength_nm");
    p.signal_wavelength_nm = c.number(prefix + ".signal_wavelength_nm");
    p.idler_wavelength_nm = c.number(prefix + ".idler_wavelength_nm");
    p.cavity_length_mm = c.number(prefix + ".cavity_length_mm");
    p.finesse = c.number(prefix + ".finesse");
    p.t_out = c.number(prefix + ".t_out");
    if (c.has(prefix + ".l_intra")) p.l_intra = c.number(prefix + ".l_intra");
    p.t_in_pump = c.number_or(prefix + ".t_in_pump", 0.0);
    p.p_threshold_mw = c.number(prefix + ".p_threshold_mw");
    p.p_pump_mw = c.number(prefix + ".p_pump_mw");
    p.eta_pump_coupling = c.number_or(prefix + ".eta_pump_coupling", 1.0);
    return p;
}

}  // namespace

CascadeConfig cascade_from_config(const ConfigFile& c) {
    CascadeConfig cfg;
    cfg.nopo1 = nopo_from(c, "nopo1");
    cfg.nopo2 = nopo_from(c, "nopo2");
    cfg.omega = 2.0 * std::numbers::pi * c.number("analysis.frequency_mhz") * 1e6;
    cfg.pump0.s_x = c.number_or("pump.s_x", 1.0);
    cfg.pump0.s_y = c.number_or("pump.s_y", 1.0);
    cfg.detection_eta_a2 = c.number_or("detection.eta_a2", 1.0);
    cfg.detection_eta_a3 = c.number_or("detection.eta_a3", 1.0);
    cfg.detection_eta_a4 = c.number_or("detection.eta_a4", 1.0);
    cfg.available_power_mw = c.number_or("cascade.available_power_mw", 0.0);
    if (c.has("cascade.tap_ratio")) cfg.tap_ratio = c.number("cascade.tap_ratio");
    if (c.has("cascade.diagnostic")) {
        const std::string d = c.text("cascade.diagnostic");
        if (d == "vacuum") cfg.diagnostic_vacuum = true;
        else if (d == "nopo2-bypass") cfg.bypass_nopo2 = true;
        else
            throw ConfigError(c.origin() + ":" + std::to_string(c.line_of("cascade.diagnostic")) +
                              ": cascade.diagnostic supports 'vacuum' or 'nopo2-bypass'");
    }
    cfg.validate();
    return cfg;
}

TuningSection tuning_from_config(const ConfigFile& c) {
    TuningSection t;
    t.material = c.text_or("tuning.material", "PPLN");
    t.pump_nm = c.number_or("tuning.pump_nm", 0.0);
    t.t_min_c = c.number_or("tuning.t_min_c", 130.0);
    t.t_max_c = c.number_or("tuning.t_max_c", 160.0);
    t.step_c = c.number_or("tuning.step_c", 1.0);
    if (c.has("tuning.anchor_temp_c")) t.anchor_temp_c = c.number("tuning.anchor_temp_c");
    if (c.has("tuning.anchor_signal_nm")) t.anchor_signal_nm = c.number("tuning.anchor_signal_nm");
    if (t.anchor_temp_c.has_value() != t.anchor_signal_nm.has_value())
        throw ConfigError(c.origin() +
                          ": tuning.anchor_temp_c and tuning.anchor_signal_nm come as a pair");
    return t;
}

FiberSection fiber_from_config(const ConfigFile& c) {
    FiberSection f;
    f.v_db = c.number_or("fiber.v_db", -3.2);
    f.cutoff_db = c.number_or("fiber.cutoff_db", -0.2);
    f.max_km = c.number_or("fiber.max_km", 60.0);
    f.step_km = c.number_or("fiber.step_km", 1.0);
    if (c.has("fiber.wavelengths_nm")) f.wavelengths_nm = c.number_list("fiber.wavelengths_nm");
    return f;
}

OracleSection oracle_from_config(const ConfigFile& c) {
    OracleSection o;
    o.system = c.text_or("oracle.system", "nopo2");
    if (o.system != "nopo2" && o.system != "cascade")
        throw ConfigError(c.origin() + ": oracle.system must be 'nopo2' or 'cascade'");
    o.n_segments = static_cast<int>(c.number_or("oracle.n_segments", 200));
    o.segment_length = static_cast<int>(c.number_or("oracle.segment_length", 0));
    return o;
}

std::string attenuation_path(const ConfigFile& c) { return c.text_or("paths.attenuation_table", ""); }
std::string dispersion_path(const ConfigFile& c) { return c.text_or("paths.dispersion_data", ""); }

CalibrationProblem calibration_from_config(const ConfigFile& c, const std::string& config_dir) {
    CalibrationProblem p;
    p.base = cascade_from_config(c);
    std::string targets = c.text("calibrate.targets");
    if (!targets.empty() && targets.front() != '/' && !config_dir.empty())
        targets = config_dir + "/" + targets;
    std::ifstream ts(targets);
    if (!ts) throw ConfigError("cannot open calibration targets '" + targets + "'");
    p.targets = MeasuredDbTable::from_csv(ts);
    for (const char* name : {"detection_eta_a2", "detection_eta_a3", "detection_eta_a4",
                             "detection_eta_a34", "pump_s_x", "pump_s_y", "tap_ratio"}) {
        const std::string key = std::string("calibrate.param.") + name;
        if (!c.has(key)) continue;
        const auto v = c.number_list(key);
        if (v.size() != 3)
            throw ConfigError(c.origin() + ":" + std::to_string(c.line_of(key)) + ": key '" + key +
                              "' needs three values: start lo hi");
        p.params.push_back({name, v[0], v[1], v[2]});
    }
    if (c.has("calibrate.weights")) {
        const auto w = c.number_list("calibrate.weights");
        if (w.size() != 6) throw ConfigError("calibrate.weights needs six values");
        std::copy(w.begin(), w.end(), p.weights.begin());
    }
    if (c.has("calibrate.gain_weights")) {
        const auto w = c.number_list("calibrate.gain_weights");
        if (w.size() != 3) throw ConfigError("calibrate.gain_weights needs three values");
        std::copy(w.begin(), w.end(), p.gain_weights.begin());
    }
    p.max_iterations = static_cast<int>(c.number_or("calibrate.max_iterations", 10000));
    p.validate();
    return p;
}

}  // namespace trinopo
