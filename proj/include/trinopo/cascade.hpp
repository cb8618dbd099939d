#pragma once

#include <optional>
#include <string>
#include <vector>

#include "trinopo/criteria.hpp"
#include "trinopo/gaussian.hpp"
#include "trinopo/nopo.hpp"

namespace trinopo {

// Two cascaded NOPOs: the signal output of the first pumps the second. The
// three retained outputs are a2 (idler of NOPO1), a3 (signal of NOPO2) and
// a4 (idler of NOPO2).
struct CascadeConfig {
    NopoParams nopo1;
    NopoParams nopo2;
    double omega = 0.0;          // analysis frequency, rad/s
    NoiseInputSpectrum pump0;    // laser driving NOPO1
    double detection_eta_a2 = 1.0;
    double detection_eta_a3 = 1.0;
    double detection_eta_a4 = 1.0;

    // Fraction of the NOPO1 signal-beam fluctuations reaching the NOPO2 pump;
    // the power not used is tapped off through a beam splitter which admixes
    // vacuum. Defaults to nopo2.p_pump / available_power.
    std::optional<double> tap_ratio;
    double available_power_mw = 0.0;  // measured NOPO1 output power; 0 = unknown

    // Replaces both cavities by passive gainless ones; the output is then
    // exactly vacuum. Used by the vacuum diagnostic.
    bool diagnostic_vacuum = false;

    // Switches off only the second cavity's parametric gain: a3 and a4
    // reduce to vacuum and every cross covariance with a2 vanishes while a2
    // keeps its active statistics.
    bool bypass_nopo2 = false;

    void validate() const;
    double effective_tap_ratio() const;
};

struct CascadeBuild {
    TransferModel joint;            // 6 output rows (a2, a3, a4) over 10 ports
    CovarianceMatrix covariance;    // detection efficiency applied
    DerivedRates rates1, rates2;
    double tap_ratio = 1.0;
    std::vector<std::string> warnings;
    std::string tap_note;           // records the beam-splitter tap assumption
};

CascadeBuild build_cascade(const CascadeConfig& cfg);
CovarianceMatrix build_cascade_covariance(const CascadeConfig& cfg);

// vlf criteria on the 6x6 cascade output at the optimal gains.
CriteriaResult criteria_at_operating_point(const CascadeConfig& cfg);

}  // namespace trinopo
