#include "trinopo/phase_matching.hpp"

#include <cmath>
#include <istream>
#include <numbers>
#include <sstream>

namespace trinopo {

namespace {

double ln_temp_n(const std::vector<double>& c, double lam_um, double temp_c, double ref_c) {
    const double f = (temp_c - 24.5) * (temp_c + 570.82);
    const double l2 = lam_um * lam_um;
    const double res = c[2] + c[8] * f;  // a3 + b3 f
    double n2 = c[0] + c[6] * f + (c[1] + c[7] * f) / (l2 - res * res) +
                (c[3] + c[9] * f) / (l2 - c[4] * c[4]) - c[5] * l2 + c[10] * (temp_c - ref_c);
    return std::sqrt(n2);
}

double ktp_z_n(const std::vector<double>& c, double lam_um, double temp_c) {
    const double ratio = c[2] / lam_um;
    const double n25 = std::sqrt(c[0] + c[1] / (1.0 - ratio * ratio) - c[3] * lam_um * lam_um);
    const double dt = temp_c - 25.0;
    const double il = 1.0 / lam_um;
    const double n1 = 1e-6 * (c[4] + il * (c[5] + il * (c[6] + il * c[7])));
    const double n2 = 1e-8 * (c[8] + il * (c[9] + il * (c[10] + il * c[11])));
    return n25 + n1 * dt + n2 * dt * dt;
}

}  // namespace

void CrystalDispersion::validate() const {
    const size_t want = form == DispersionForm::LnTemp ? 11 : 12;
    if (coeffs.size() != want)
        throw ConfigError("dispersion set '" + material + "': expected " + std::to_string(want) +
                          " coefficients, got " + std::to_string(coeffs.size()));
    if (band_min_nm <= 0.0 || band_max_nm <= band_min_nm)
        throw ConfigError("dispersion set '" + material + "': bad validity band");
    if (poling_period_um <= 0.0)
        throw ConfigError("dispersion set '" + material + "': poling period must be positive");
}

double refractive_index(const CrystalDispersion& c, double wavelength_nm, double temp_c) {
    if (wavelength_nm < c.band_min_nm || wavelength_nm > c.band_max_nm)
        throw ModelError("wavelength " + std::to_string(wavelength_nm) + " nm outside the [" +
                         std::to_string(c.band_min_nm) + ", " + std::to_string(c.band_max_nm) +
                         "] nm validity band of " + c.material);
    const double lam_um = wavelength_nm * 1e-3;
    const double n = c.form == DispersionForm::LnTemp
                         ? ln_temp_n(c.coeffs, lam_um, temp_c, c.reference_temp_c)
                         : ktp_z_n(c.coeffs, lam_um, temp_c);
    if (!(n > 1.0 && n < 3.0))
        throw ModelError("dispersion set '" + c.material + "' produced index " + std::to_string(n) +
                         " outside (1,3) at " + std::to_string(wavelength_nm) + " nm");
    return n;
}

double qpm_mismatch(const CrystalDispersion& c, double pump_nm, double signal_nm, double temp_c) {
    const double inv_idler = 1.0 / pump_nm - 1.0 / signal_nm;
    if (inv_idler <= 0.0)
        throw ModelError("energy conservation gives a nonphysical idler for pump " +
                         std::to_string(pump_nm) + " nm, signal " + std::to_string(signal_nm) +
                         " nm");
    const double idler_nm = 1.0 / inv_idler;
    const double lp = pump_nm * 1e-3, ls = signal_nm * 1e-3, li = idler_nm * 1e-3;
    const double np = refractive_index(c, pump_nm, temp_c);
    const double ns = refractive_index(c, signal_nm, temp_c);
    const double ni = refractive_index(c, idler_nm, temp_c);
    const double period =
        c.poling_period_um * (1.0 + c.thermal_expansion_per_k * (temp_c - c.reference_temp_c));
    return 2.0 * std::numbers::pi * (np / lp - ns / ls - ni / li - 1.0 / period);
}

TuningPoint solve_wavelengths(const CrystalDispersion& c, double pump_nm, double temp_c,
                              std::optional<SolveBracket> bracket) {
    double lo = bracket ? bracket->lo_nm : 2.0 * pump_nm * (1.0 + 5e-4);
    double hi = bracket ? bracket->hi_nm : 2.2 * pump_nm;
    if (!(lo > pump_nm && hi > lo))
        throw std::invalid_argument("invalid signal search bracket");
    double flo = qpm_mismatch(c, pump_nm, lo, temp_c);
    double fhi = qpm_mismatch(c, pump_nm, hi, temp_c);
    if (flo == 0.0) hi = lo;
    if (flo * fhi > 0.0) {
        std::ostringstream os;
        os << "no phase-matching solution in [" << lo << ", " << hi << "] nm at " << temp_c
           << " C; mismatch samples (nm -> 1/um):";
        for (int i = 0; i <= 8; ++i) {
            const double l = lo + (hi - lo) * i / 8.0;
            os << ' ' << l << "->" << qpm_mismatch(c, pump_nm, l, temp_c);
        }
        throw ModelError(os.str());
    }
    // drive the interval below 1e-7 nm so the root is independent of the
    // starting bracket, then confirm the mismatch tolerance
    double mid = 0.5 * (lo + hi), fmid = flo;
    for (int it = 0; it < 200 && hi - lo > 1e-7; ++it) {
        mid = 0.5 * (lo + hi);
        fmid = qpm_mismatch(c, pump_nm, mid, temp_c);
        if (fmid == 0.0) break;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    fmid = qpm_mismatch(c, pump_nm, mid, temp_c);
    if (std::abs(fmid) > 1e-10)
        throw ModelError("bisection failed to reduce the mismatch below 1e-10 /um");
    TuningPoint p;
    p.temp_c = temp_c;
    p.signal_nm = mid;
    p.idler_nm = 1.0 / (1.0 / pump_nm - 1.0 / mid);
    return p;
}

CrystalDispersion calibrate_poling(const CrystalDispersion& c, double pump_nm, double temp_c,
                                   double signal_nm) {
    const double inv_idler = 1.0 / pump_nm - 1.0 / signal_nm;
    if (inv_idler <= 0.0) throw ModelError("calibration anchor violates energy conservation");
    const double idler_nm = 1.0 / inv_idler;
    const double np = refractive_index(c, pump_nm, temp_c);
    const double ns = refractive_index(c, signal_nm, temp_c);
    const double ni = refractive_index(c, idler_nm, temp_c);
    const double inv_period =
        np / (pump_nm * 1e-3) - ns / (signal_nm * 1e-3) - ni / (idler_nm * 1e-3);
    if (inv_period <= 0.0)
        throw ModelError("calibration would require a non-positive poling period");
    CrystalDispersion out = c;
    const double period_at_anchor = 1.0 / inv_period;
    out.poling_period_um =
        period_at_anchor / (1.0 + c.thermal_expansion_per_k * (temp_c - c.reference_temp_c));
    return out;
}

std::vector<TuningPoint> tuning_curve(const CrystalDispersion& c, double pump_nm, double t_min_c,
                                      double t_max_c, double step_c) {
    if (step_c <= 0.0 || t_max_c < t_min_c)
        throw std::invalid_argument("tuning curve needs positive step and ordered temperatures");
    std::vector<TuningPoint> out;
    const int n = static_cast<int>(std::floor((t_max_c - t_min_c) / step_c + 1e-9));
    out.reserve(n + 1);
    for (int i = 0; i <= n; ++i)
        out.push_back(solve_wavelengths(c, pump_nm, t_min_c + i * step_c));
    return out;
}

std::vector<CrystalDispersion> load_dispersion_file(std::istream& is) {
    std::vector<CrystalDispersion> sets;
    CrystalDispersion cur;
    bool open = false;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        const auto fail = [&](const std::string& what) {
            throw ConfigError("dispersion file line " + std::to_string(lineno) + ": " + what);
        };
        if (key == "material") {
            if (open) fail("previous material block not closed with 'end'");
            cur = CrystalDispersion{};
            if (!(ls >> cur.material)) fail("missing material name");
            open = true;
        } else if (!open) {
            fail("'" + key + "' outside a material block");
        } else if (key == "form") {
            std::string f;
            ls >> f;
            if (f == "ln_temp") cur.form = DispersionForm::LnTemp;
            else if (f == "ktp_z") cur.form = DispersionForm::KtpZ;
            else fail("unknown dispersion form '" + f + "'");
        } else if (key == "band_nm") {
            if (!(ls >> cur.band_min_nm >> cur.band_max_nm)) fail("band_nm needs two values");
        } else if (key == "poling_period_um") {
            if (!(ls >> cur.poling_period_um)) fail("bad poling period");
        } else if (key == "thermal_expansion_per_k") {
            if (!(ls >> cur.thermal_expansion_per_k)) fail("bad thermal expansion");
        } else if (key == "reference_temp_c") {
            if (!(ls >> cur.reference_temp_c)) fail("bad reference temperature");
        } else if (key == "coeffs") {
            double v;
            while (ls >> v) cur.coeffs.push_back(v);
        } else if (key == "end") {
            cur.validate();
            sets.push_back(cur);
            open = false;
        } else {
            fail("unknown key '" + key + "'");
        }
    }
    if (open) throw ConfigError("dispersion file: unterminated material block");
    return sets;
}

const CrystalDispersion& find_material(const std::vector<CrystalDispersion>& sets,
                                       const std::string& name) {
    for (const auto& s : sets)
        if (s.material == name) return s;
    throw ConfigError("no dispersion data for material '" + name + "'");
}

LineFit fit_signal_line(const std::vector<TuningPoint>& curve) {
    if (curve.size() < 2) throw std::invalid_argument("line fit needs at least two points");
    const double n = static_cast<double>(curve.size());
    double st = 0, sy = 0, stt = 0, sty = 0;
    for (const auto& p : curve) {
        st += p.temp_c;
        sy += p.signal_nm;
        stt += p.temp_c * p.temp_c;
        sty += p.temp_c * p.signal_nm;
    }
    LineFit f;
    f.slope = (n * sty - st * sy) / (n * stt - st * st);
    f.intercept = (sy - f.slope * st) / n;
    double ss_res = 0, ss_tot = 0;
    const double mean = sy / n;
    for (const auto& p : curve) {
        const double pred = f.slope * p.temp_c + f.intercept;
        ss_res += (p.signal_nm - pred) * (p.signal_nm - pred);
        ss_tot += (p.signal_nm - mean) * (p.signal_nm - mean);
    }
    f.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace trinopo
