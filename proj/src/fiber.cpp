#include "trinopo/fiber.hpp"

#include <cmath>
#include <istream>
#include <set>
#include <sstream>
#include <string>

namespace trinopo {

AttenuationTable AttenuationTable::defaults() {
    return AttenuationTable{{{1550.0, 0.20}, {1440.0, 0.25}, {1064.0, 0.65}}};
}

AttenuationTable AttenuationTable::load(std::istream& is) {
    AttenuationTable t;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double wl, alpha;
        if (!(ls >> wl)) continue;  // blank
        if (!(ls >> alpha))
            throw ConfigError("attenuation table: expected two columns on line " +
                              std::to_string(lineno));
        t.entries.emplace_back(wl, alpha);
    }
    t.validate();
    return t;
}

void AttenuationTable::validate() const {
    std::set<double> seen;
    for (const auto& [wl, alpha] : entries) {
        if (alpha <= 0.0)
            throw ConfigError("attenuation must be positive (got " + std::to_string(alpha) +
                              " dB/km at " + std::to_string(wl) + " nm)");
        if (!seen.insert(wl).second)
            throw ConfigError("duplicate wavelength " + std::to_string(wl) +
                              " nm in attenuation table");
    }
}

double AttenuationTable::alpha_at(double wavelength_nm, double tol_nm) const {
    for (const auto& [wl, alpha] : entries)
        if (std::abs(wl - wavelength_nm) <= tol_nm) return alpha;
    throw ModelError("no attenuation entry near " + std::to_string(wavelength_nm) + " nm");
}

double transmission(double distance_km, double alpha_db_per_km) {
    if (distance_km < 0.0) throw std::invalid_argument("distance must be non-negative");
    if (alpha_db_per_km <= 0.0) throw std::invalid_argument("attenuation must be positive");
    return std::pow(10.0, -alpha_db_per_km * distance_km / 10.0);
}

double degrade_db(double v_db, double eta) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("transmissivity eta must lie in (0,1], got " +
                                    std::to_string(eta));
    const double v = std::pow(10.0, v_db / 10.0);
    return 10.0 * std::log10(eta * v + (1.0 - eta));
}

double max_distance_km(double v_db, double cutoff_db, double alpha_db_per_km) {
    if (!(cutoff_db < 0.0))
        throw std::invalid_argument("cutoff must be below the QNL (negative dB)");
    if (!(v_db < cutoff_db))
        throw ModelError("initial correlation " + std::to_string(v_db) +
                         " dB is already at or above the cutoff " + std::to_string(cutoff_db) +
                         " dB: zero distance");
    if (alpha_db_per_km <= 0.0) throw std::invalid_argument("attenuation must be positive");
    const double budget_db =
        -10.0 * std::log10((1.0 - std::pow(10.0, cutoff_db / 10.0)) /
                           (1.0 - std::pow(10.0, v_db / 10.0)));
    return budget_db / alpha_db_per_km;
}

std::vector<FiberSweepPoint> fiber_sweep(double v_db, double alpha_db_per_km, double max_km,
                                         double step_km) {
    if (step_km <= 0.0 || max_km < 0.0)
        throw std::invalid_argument("fiber sweep needs positive step and non-negative range");
    std::vector<FiberSweepPoint> out;
    const int n = static_cast<int>(std::floor(max_km / step_km + 1e-9));
    out.reserve(n + 1);
    for (int i = 0; i <= n; ++i) {
        const double d = i * step_km;
        out.push_back({d, degrade_db(v_db, transmission(d, alpha_db_per_km))});
    }
    return out;
}

}  // namespace trinopo
