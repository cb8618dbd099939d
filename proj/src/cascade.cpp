#include "trinopo/cascade.hpp"

#include <cmath>

namespace trinopo {

void CascadeConfig::validate() const {
    try {
        nopo1.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("nopo1: ") + e.what());
    }
    try {
        nopo2.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("nopo2: ") + e.what());
    }
    const double rel = std::abs(nopo1.signal_wavelength_nm - nopo2.pump_wavelength_nm) /
                       nopo2.pump_wavelength_nm;
    if (rel > 1e-4)
        throw ConfigError("wavelength chain mismatch: NOPO1 signal " +
                          std::to_string(nopo1.signal_wavelength_nm) + " nm must pump NOPO2 at " +
                          std::to_string(nopo2.pump_wavelength_nm) + " nm");
    if (omega <= 0.0) throw ConfigError("analysis frequency must be positive");
    pump0.validate();
    for (double eta : {detection_eta_a2, detection_eta_a3, detection_eta_a4})
        if (!(eta > 0.0 && eta <= 1.0))
            throw ConfigError("detection efficiencies must lie in (0,1]");
    const double tap = effective_tap_ratio();
    if (!(tap > 0.0 && tap <= 1.0))
        throw ConfigError("tap ratio must lie in (0,1], got " + std::to_string(tap));
}

double CascadeConfig::effective_tap_ratio() const {
    if (tap_ratio) return *tap_ratio;
    if (available_power_mw > 0.0) return nopo2.p_pump_mw / available_power_mw;
    return 1.0;
}

CascadeBuild build_cascade(const CascadeConfig& cfg) {
    cfg.validate();
    const double tap = cfg.effective_tap_ratio();
    std::vector<std::string> warnings;
    if (cfg.available_power_mw > 0.0 && cfg.nopo2.p_pump_mw > cfg.available_power_mw)
        warnings.push_back("NOPO2 pump power exceeds the available NOPO1 output power");

    // NOPO1 signal drives NOPO2; NOPO1 idler is the retained mode a2.
    TransferModel t1 = cfg.diagnostic_vacuum
                           ? passive_cavity_transfer(cfg.nopo1, cfg.omega, 1, 2, "nopo1")
                           : build_transfer(cfg.nopo1, cfg.omega, cfg.pump0, 1, 2, "nopo1");
    TransferModel t2 = (cfg.diagnostic_vacuum || cfg.bypass_nopo2)
                           ? passive_cavity_transfer(cfg.nopo2, cfg.omega, 3, 4, "nopo2")
                           : build_transfer(cfg.nopo2, cfg.omega, {}, 3, 4, "nopo2");
    DerivedRates rates1, rates2;
    if (!cfg.diagnostic_vacuum) {
        rates1 = derived_rates(cfg.nopo1);
        if (!cfg.bypass_nopo2) rates2 = derived_rates(cfg.nopo2);
    }

    // Joint ports: the five of NOPO1, the tap vacuum, then the four vacuum
    // ports of NOPO2. NOPO2's pump column is expanded through the NOPO1
    // signal rows (a1) and the tap.
    TransferModel joint;
    joint.omega = cfg.omega;
    joint.ports = t1.ports;
    joint.ports.push_back({"tap", PortKind::TapVacuum, {}});
    for (int i = 0; i < 4; ++i) joint.ports.push_back(t2.ports[i]);
    const int n_cols = 2 * static_cast<int>(joint.ports.size());
    joint.output_modes = {t1.output_modes[1], t2.output_modes[0], t2.output_modes[1]};
    joint.transfer = Eigen::MatrixXcd::Zero(6, n_cols);

    const double rt_tap = std::sqrt(tap);
    const double rt_vac = std::sqrt(1.0 - tap);
    const int tap_col = 10;   // X column of the tap port
    const int own_col = 12;   // first NOPO2 own column
    for (int q = 0; q < 2; ++q) {                       // X, Y sectors
        joint.transfer.row(q).segment(0, 10) = t1.transfer.row(2 + q);  // a2 = NOPO1 idler
        for (int m = 0; m < 2; ++m) {                   // a3, a4 = NOPO2 signal, idler
            const int row = 2 + 2 * m + q;
            const auto t2row = t2.transfer.row(2 * m + q);
            const std::complex<double> pump_coef = t2row(8 + q);  // NOPO2 pump column
            joint.transfer.row(row).segment(own_col, 8) = t2row.segment(0, 8);
            joint.transfer.row(row).segment(0, 10) +=
                pump_coef * rt_tap * t1.transfer.row(q);  // a1 = NOPO1 signal
            joint.transfer(row, tap_col + q) = pump_coef * rt_vac;
        }
    }

    CovarianceMatrix cov = output_covariance(joint);
    cov = apply_loss(cov, 2, cfg.detection_eta_a2);
    cov = apply_loss(cov, 3, cfg.detection_eta_a3);
    cov = apply_loss(cov, 4, cfg.detection_eta_a4);
    return CascadeBuild{
        std::move(joint),
        std::move(cov),
        rates1,
        rates2,
        tap,
        std::move(warnings),
        "pump tap modeled as a beam splitter on the NOPO1 signal output (fluctuation "
        "transmissivity " +
            std::to_string(tap) + "); whether the experiment tapped the beam is an assumption",
    };
}

CovarianceMatrix build_cascade_covariance(const CascadeConfig& cfg) {
    return build_cascade(cfg).covariance;
}

CriteriaResult criteria_at_operating_point(const CascadeConfig& cfg) {
    return evaluate_at_optimal_gains(build_cascade_covariance(cfg));
}

}  // namespace trinopo
