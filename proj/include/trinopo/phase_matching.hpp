#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "trinopo/errors.hpp"

namespace trinopo {

// Temperature-dependent Sellmeier families supported by the dispersion file.
//
// ln_temp (11 coefficients a1..a6, b1..b4, c1), lithium-niobate style:
//   f  = (T - 24.5)(T + 570.82)
//   n^2 = a1 + b1 f + (a2 + b2 f)/(l^2 - (a3 + b3 f)^2)
//         + (a4 + b4 f)/(l^2 - a5^2) - a6 l^2 + c1 (T - T_ref)
//   with l in um and T in Celsius. Published sets use c1 = 0.
//
// ktp_z (12 coefficients A,B,C,D, m0..m3, q0..q3), KTP z-axis style:
//   n25^2 = A + B/(1 - (C/l)^2) - D l^2
//   n(l,T) = n25 + 1e-6 (m0 + m1/l + m2/l^2 + m3/l^3)(T - 25)
//                + 1e-8 (q0 + q1/l + q2/l^2 + q3/l^3)(T - 25)^2
enum class DispersionForm { LnTemp, KtpZ };

struct CrystalDispersion {
    std::string material;  // e.g. "PPLN", "PPKTP"
    DispersionForm form = DispersionForm::LnTemp;
    std::vector<double> coeffs;
    double band_min_nm = 0.0;
    double band_max_nm = 0.0;
    double poling_period_um = 0.0;                // at reference_temp_c
    double thermal_expansion_per_k = 1.5e-5;      // linear expansion of the period
    double reference_temp_c = 24.5;

    void validate() const;
};

// n(lambda, T); throws ModelError when the wavelength leaves the validity band.
double refractive_index(const CrystalDispersion& c, double wavelength_nm, double temp_c);

// First-order quasi-phase-matching mismatch in 1/um:
//   dk = 2 pi [ n_p/l_p - n_s/l_s - n_i/l_i - 1/Lambda(T) ]
// with the idler fixed by energy conservation 1/l_i = 1/l_p - 1/l_s and
// Lambda(T) = poling_period (1 + expansion (T - reference_temp)).
double qpm_mismatch(const CrystalDispersion& c, double pump_nm, double signal_nm, double temp_c);

struct TuningPoint {
    double temp_c = 0.0;
    double signal_nm = 0.0;
    double idler_nm = 0.0;
};

struct SolveBracket {
    double lo_nm = 0.0;
    double hi_nm = 0.0;
};

// Root of the mismatch in the signal wavelength by bracketed bisection to
// |dk| < 1e-10, idler from energy conservation. The default bracket is the
// red side of degeneracy, [2 l_p (1 + 5e-4), 2.2 l_p].
TuningPoint solve_wavelengths(const CrystalDispersion& c, double pump_nm, double temp_c,
                              std::optional<SolveBracket> bracket = std::nullopt);

// Copy of c with the poling period set so the mismatch vanishes at the anchor.
CrystalDispersion calibrate_poling(const CrystalDispersion& c, double pump_nm, double temp_c,
                                   double signal_nm);

std::vector<TuningPoint> tuning_curve(const CrystalDispersion& c, double pump_nm, double t_min_c,
                                      double t_max_c, double step_c);

// Line-oriented data file; '#' starts a comment. Each block:
//   material <name>
//   form <ln_temp|ktp_z>
//   band_nm <min> <max>
//   poling_period_um <value>
//   thermal_expansion_per_k <value>
//   reference_temp_c <value>
//   coeffs <v1> <v2> ...
//   end
std::vector<CrystalDispersion> load_dispersion_file(std::istream& is);
const CrystalDispersion& find_material(const std::vector<CrystalDispersion>& sets,
                                       const std::string& name);

// Least-squares line fit helper for tuning curves: returns slope (nm/K),
// intercept and R^2 of signal wavelength vs temperature.
struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};
LineFit fit_signal_line(const std::vector<TuningPoint>& curve);

}  // namespace trinopo
