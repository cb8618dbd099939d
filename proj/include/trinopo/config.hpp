#pragma once

#include <array>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trinopo/calibrate.hpp"
#include "trinopo/cascade.hpp"

namespace trinopo {

// Flat "key = value" text configuration. '#' starts a comment, blank lines
// are skipped, keys must come from the documented schema (unknown keys are
// rejected with their line number) and units are fixed by the key suffix
// (nm, mm, mW, MHz, dB/km, C).
class ConfigFile {
  public:
    static ConfigFile load(std::istream& is, const std::string& origin = "<config>");
    static ConfigFile load_path(const std::string& path);

    bool has(const std::string& key) const;
    double number(const std::string& key) const;
    double number_or(const std::string& key, double fallback) const;
    std::string text(const std::string& key) const;
    std::string text_or(const std::string& key, const std::string& fallback) const;
    std::vector<double> number_list(const std::string& key) const;  // whitespace separated

    const std::string& origin() const { return origin_; }
    int line_of(const std::string& key) const;

  private:
    std::string origin_;
    std::map<std::string, std::pair<std::string, int>> kv_;
};

// Scenario sections built from a config file. cascade_from_config demands the
// full NOPO parameter set; the others fall back to documented defaults.
CascadeConfig cascade_from_config(const ConfigFile& c);

struct TuningSection {
    std::string material = "PPLN";
    double pump_nm = 0.0;  // 0 = take the NOPO2 pump wavelength
    double t_min_c = 130.0;
    double t_max_c = 160.0;
    double step_c = 1.0;
    std::optional<double> anchor_temp_c;
    std::optional<double> anchor_signal_nm;
};
TuningSection tuning_from_config(const ConfigFile& c);

struct FiberSection {
    double v_db = -3.2;
    double cutoff_db = -0.2;
    double max_km = 60.0;
    double step_km = 1.0;
    std::vector<double> wavelengths_nm;  // empty = every table entry
};
FiberSection fiber_from_config(const ConfigFile& c);

struct OracleSection {
    std::string system = "nopo2";  // or "cascade"
    int n_segments = 200;
    int segment_length = 0;        // 0 = auto
};
OracleSection oracle_from_config(const ConfigFile& c);

std::string attenuation_path(const ConfigFile& c);  // may be empty
std::string dispersion_path(const ConfigFile& c);   // may be empty

CalibrationProblem calibration_from_config(const ConfigFile& c, const std::string& config_dir);

}  // namespace trinopo
