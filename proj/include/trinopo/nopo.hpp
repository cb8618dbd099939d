#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "trinopo/gaussian.hpp"

namespace trinopo {

// One non-degenerate OPO above threshold with a non-resonant (single-pass) pump.
struct NopoParams {
    double pump_wavelength_nm = 0.0;
    double signal_wavelength_nm = 0.0;
    double idler_wavelength_nm = 0.0;
    double cavity_length_mm = 0.0;
    double finesse = 0.0;
    double t_out = 0.0;                  // output-coupler power transmissivity
    std::optional<double> l_intra;       // round-trip intracavity power loss;
                                         // defaults to 2 pi / finesse - t_out
    double t_in_pump = 0.0;              // pump input coupling, documentation only
    double p_threshold_mw = 0.0;
    double p_pump_mw = 0.0;
    double eta_pump_coupling = 1.0;      // pump-noise coupling efficiency

    void validate() const;               // throws on violated invariants
    double round_trip_loss() const;      // t_out + l_intra (or 2 pi / finesse)
};

struct DerivedRates {
    double fsr_hz = 0.0;
    double kappa_total = 0.0;      // field decay rate, 1/s
    double kappa_out = 0.0;
    double kappa_loss = 0.0;
    double escape_efficiency = 0.0;
    double sigma = 0.0;            // sqrt(P / P_th)
};

// fsr = c / (2 L); kappa = (round-trip loss) fsr / 2; kappa_out = t_out fsr / 2;
// sigma = sqrt(P/Pth). Throws ModelError at or below threshold.
DerivedRates derived_rates(const NopoParams& p);

// Quadrature spectral variances of an input beam at the analysis frequency,
// vacuum = (1, 1). Must satisfy s_x s_y >= 1.
struct NoiseInputSpectrum {
    double s_x = 1.0;
    double s_y = 1.0;
    void validate() const;
};

enum class PortKind { OutputVacuum, LossVacuum, PumpInput, TapVacuum };

struct Port {
    std::string name;
    PortKind kind = PortKind::OutputVacuum;
    NoiseInputSpectrum spectrum;  // default used when no override is given
};

// Decoupled sum/difference quadrature subsystems of the linearized NOPO:
// each intracavity quadrature u obeys du/dt = -gamma u + sum_c b_c xi_c with
// delta-correlated inputs of spectral variance 1 (vacuum) and the output
// relation u_out = sqrt(2 kappa_out) u - xi_out.
//
// Decay rates: X-: 2k; Y-: 0 (free phase diffusion); X+: 2k(sigma-1);
// Y+: 2k sigma. The plus modes are additionally driven by the pump quadrature
// with coupling 2 sqrt(k (sigma-1) eta_pump_coupling).
struct QuadSubsystems {
    double gamma_x_plus, gamma_x_minus, gamma_y_plus, gamma_y_minus;
    double b_out;   // sqrt(2 kappa_out)
    double b_loss;  // sqrt(2 kappa_loss)
    double c_pump;  // pump drive on the plus modes
};

QuadSubsystems quad_subsystems(const DerivedRates& r, double eta_pump_coupling);

// Complex frequency-domain map from elementary input channels to output
// quadratures at one analysis frequency. Rows are (X, Y) per output mode,
// columns (X, Y) per port.
struct TransferModel {
    std::vector<Port> ports;
    std::vector<ModeLabel> output_modes;
    Eigen::MatrixXcd transfer;
    double omega = 0.0;  // rad/s

    int port_index(const std::string& name) const;  // throws for unknown names
};

// Linearized above-threshold transfer at analysis frequency omega > 0.
// Ports: out.<signal>, out.<idler>, loss.<signal>, loss.<idler>, pump.
// Throws ModelError below threshold and at omega = 0 (the phase-difference
// mode diffuses freely; its spectrum diverges at DC).
TransferModel build_transfer(const NopoParams& p, double omega,
                             const NoiseInputSpectrum& pump_spectrum = {},
                             int signal_id = 1, int idler_id = 2,
                             const std::string& port_prefix = "");

// Diagnostic: same cavity with the parametric gain switched off. A passive
// lossless-equivalent map; all-vacuum inputs give exactly vacuum outputs.
TransferModel passive_cavity_transfer(const NopoParams& p, double omega, int signal_id = 1,
                                      int idler_id = 2, const std::string& port_prefix = "");

// Re(T S T'), with per-port spectra from the port registry unless overridden
// by name. Unknown override names are an error.
CovarianceMatrix output_covariance(const TransferModel& t,
                                   const std::map<std::string, NoiseInputSpectrum>& overrides = {});

// Closed forms used as cross-checks:
// S(X_s - X_i)(omega) = 2 [1 - eta_esc / (1 + (omega/2k)^2)]  (combo QNL 2)
double closed_form_intensity_difference(const DerivedRates& r, double omega);

}  // namespace trinopo
