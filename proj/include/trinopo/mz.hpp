#pragma once

#include <string>

namespace trinopo {

inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Lock point of the unbalanced Mach-Zehnder self-homodyne analyzer.
enum class MzLock {
    ShortArmOnly,     // beam routed through the short arm; amplitude readout
    BalancedPiOver2,  // 50/50 split, long/short phase locked at pi/2 + 2k pi
};

struct MzConfig {
    double sideband_hz = 0.0;       // analysis sideband f
    double refractive_index = 1.0;  // of the delay medium
    double arm_delta_m = 0.0;       // long-short arm length difference
    MzLock lock = MzLock::ShortArmOnly;
    double visibility = 1.0;  // fringe visibility; scales squeezed deviations by v^2
};

// Arm-length difference that places the sideband phase at pi: c / (2 n f).
double arm_delta_for_pi(double sideband_hz, double refractive_index);

// theta = 2 pi f n dL / c
double sideband_phase(const MzConfig& cfg);

struct MzReadout {
    double sum_channel = 0.0;
    double diff_channel = 0.0;
    std::string sum_label;
    std::string diff_label;
};

// Sum/difference photocurrent noise powers for an input beam with amplitude
// and phase quadrature spectra (s_x, s_y), vacuum = 1.
//
// short-arm-only:   sum  = amplitude noise s_x, diff = 1 (QNL)
// balanced-pi/2:    diff = s_x cos^2(theta/2) + s_y sin^2(theta/2), sum = 1 (QNL);
//                   at theta = pi the difference reads the phase quadrature.
MzReadout measured_quantities(const MzConfig& cfg, double s_x, double s_y);

}  // namespace trinopo
