#include "trinopo/mz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace trinopo {

namespace {

void check(const MzConfig& cfg) {
    if (cfg.sideband_hz <= 0.0) throw std::invalid_argument("sideband frequency must be positive");
    if (cfg.refractive_index < 1.0) throw std::invalid_argument("refractive index must be >= 1");
    if (cfg.arm_delta_m < 0.0) throw std::invalid_argument("arm length difference must be >= 0");
    if (!(cfg.visibility > 0.0 && cfg.visibility <= 1.0))
        throw std::invalid_argument("visibility must lie in (0,1]");
}

}  // namespace

double arm_delta_for_pi(double sideband_hz, double refractive_index) {
    if (sideband_hz <= 0.0) throw std::invalid_argument("sideband frequency must be positive");
    if (refractive_index < 1.0) throw std::invalid_argument("refractive index must be >= 1");
    return kSpeedOfLight / (2.0 * refractive_index * sideband_hz);
}

double sideband_phase(const MzConfig& cfg) {
    check(cfg);
    return 2.0 * std::numbers::pi * cfg.sideband_hz * cfg.refractive_index * cfg.arm_delta_m /
           kSpeedOfLight;
}

MzReadout measured_quantities(const MzConfig& cfg, double s_x, double s_y) {
    check(cfg);
    if (s_x < 0.0 || s_y < 0.0) throw std::invalid_argument("quadrature spectra must be >= 0");
    const double v2 = cfg.visibility * cfg.visibility;
    MzReadout r;
    if (cfg.lock == MzLock::ShortArmOnly) {
        r.sum_channel = 1.0 + v2 * (s_x - 1.0);
        r.diff_channel = 1.0;
        r.sum_label = "amplitude quadrature noise";
        r.diff_label = "QNL";
    } else {
        const double theta = sideband_phase(cfg);
        const double c2 = std::cos(theta / 2.0) * std::cos(theta / 2.0);
        const double mixed = s_x * c2 + s_y * (1.0 - c2);
        r.diff_channel = 1.0 + v2 * (mixed - 1.0);
        r.sum_channel = 1.0;
        r.diff_label = "rotated quadrature noise (phase at theta = pi)";
        r.sum_label = "QNL";
    }
    return r;
}

}  // namespace trinopo
