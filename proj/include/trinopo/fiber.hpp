#pragma once

#include <iosfwd>
#include <utility>
#include <vector>

#include "trinopo/errors.hpp"

namespace trinopo {

// Wavelength -> attenuation lookup. Wavelengths must be unique, attenuations
// positive. Lookup requires a near-exact wavelength match; the table is not
// an interpolator.
struct AttenuationTable {
    std::vector<std::pair<double, double>> entries;  // (wavelength_nm, dB/km)

    // 1550: 0.20, 1440: 0.25, 1064: 0.65 dB/km
    static AttenuationTable defaults();

    // Two-column text file: wavelength_nm attenuation_db_per_km
    static AttenuationTable load(std::istream& is);

    double alpha_at(double wavelength_nm, double tol_nm = 0.5) const;
    void validate() const;
};

// Power transmission of a fiber span: 10^(-alpha d / 10).
double transmission(double distance_km, double alpha_db_per_km);

// QNL-normalized variance after a pure-loss channel of transmissivity eta,
// in and out in dB: v' = eta 10^(v/10) + (1 - eta). Applies when every mode
// of the combination sees the same eta.
double degrade_db(double v_db, double eta);

// Distance at which a squeezed correlation v_db decays to cutoff_db:
// the loss budget -10 log10[(1-10^(cutoff/10)) / (1-10^(v/10))] divided by alpha.
double max_distance_km(double v_db, double cutoff_db, double alpha_db_per_km);

struct FiberSweepPoint {
    double distance_km;
    double v_db;
};

std::vector<FiberSweepPoint> fiber_sweep(double v_db, double alpha_db_per_km,
                                         double max_km, double step_km);

}  // namespace trinopo
