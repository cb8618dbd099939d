#include "trinopo/nopo.hpp"

#include <cmath>
#include <numbers>

#include "trinopo/mz.hpp"  // kSpeedOfLight

namespace trinopo {

void NopoParams::validate() const {
    const auto bad = [](const std::string& what) { throw std::invalid_argument(what); };
    if (pump_wavelength_nm <= 0 || signal_wavelength_nm <= 0 || idler_wavelength_nm <= 0)
        bad("wavelengths must be positive");
    const double lhs = 1.0 / pump_wavelength_nm;
    const double rhs = 1.0 / signal_wavelength_nm + 1.0 / idler_wavelength_nm;
    if (std::abs(lhs - rhs) > 1e-4 * lhs)
        bad("energy conservation violated: 1/pump != 1/signal + 1/idler within 1e-4");
    if (cavity_length_mm <= 0) bad("cavity length must be positive");
    if (finesse <= 0) bad("finesse must be positive");
    if (!(t_out > 0 && t_out < 1)) bad("output coupling t_out must lie in (0,1)");
    if (l_intra && *l_intra < 0) bad("intracavity loss must be >= 0");
    if (round_trip_loss() < t_out - 1e-15)
        bad("round-trip loss smaller than the output coupling");
    if (p_threshold_mw <= 0) bad("threshold power must be positive");
    if (!(eta_pump_coupling >= 0 && eta_pump_coupling <= 1))
        bad("eta_pump_coupling must lie in [0,1]");
}

double NopoParams::round_trip_loss() const {
    return l_intra ? t_out + *l_intra : 2.0 * std::numbers::pi / finesse;
}

DerivedRates derived_rates(const NopoParams& p) {
    p.validate();
    if (p.p_pump_mw <= p.p_threshold_mw)
        throw ModelError("pump power " + std::to_string(p.p_pump_mw) +
                         " mW is not above the threshold " + std::to_string(p.p_threshold_mw) +
                         " mW; the above-threshold model is undefined (sigma <= 1)");
    DerivedRates r;
    r.fsr_hz = kSpeedOfLight / (2.0 * p.cavity_length_mm * 1e-3);
    r.kappa_total = p.round_trip_loss() * r.fsr_hz / 2.0;
    r.kappa_out = p.t_out * r.fsr_hz / 2.0;
    r.kappa_loss = r.kappa_total - r.kappa_out;
    r.escape_efficiency = r.kappa_out / r.kappa_total;
    r.sigma = std::sqrt(p.p_pump_mw / p.p_threshold_mw);
    return r;
}

void NoiseInputSpectrum::validate() const {
    if (s_x < 0 || s_y < 0) throw std::invalid_argument("input spectra must be >= 0");
    if (s_x * s_y < 1.0 - 1e-12)
        throw std::invalid_argument("input spectra violate the uncertainty bound s_x s_y >= 1");
}

QuadSubsystems quad_subsystems(const DerivedRates& r, double eta_pump_coupling) {
    QuadSubsystems q;
    const double k = r.kappa_total;
    q.gamma_x_minus = 2.0 * k;
    q.gamma_y_minus = 0.0;
    q.gamma_x_plus = 2.0 * k * (r.sigma - 1.0);
    q.gamma_y_plus = 2.0 * k * r.sigma;
    q.b_out = std::sqrt(2.0 * r.kappa_out);
    q.b_loss = std::sqrt(2.0 * r.kappa_loss);
    q.c_pump = 2.0 * std::sqrt(k * (r.sigma - 1.0) * eta_pump_coupling);
    return q;
}

int TransferModel::port_index(const std::string& name) const {
    for (size_t i = 0; i < ports.size(); ++i)
        if (ports[i].name == name) return static_cast<int>(i);
    throw std::invalid_argument("unknown input channel '" + name + "'");
}

namespace {

using cd = std::complex<double>;

struct SubsystemResponse {
    cd h_out;   // onto its own output-port noise
    cd h_loss;  // onto the loss-port noise
    cd h_pump;  // onto the pump quadrature (plus modes only)
};

SubsystemResponse response(double gamma, double omega, const QuadSubsystems& q, bool pumped) {
    const cd den(gamma, -omega);
    SubsystemResponse r;
    r.h_out = q.b_out * q.b_out / den - 1.0;
    r.h_loss = q.b_out * q.b_loss / den;
    r.h_pump = pumped ? q.b_out * q.c_pump / den : cd(0.0);
    return r;
}

// Assembles the 4 x 10 complex transfer (rows Xs, Ys, Xi, Yi) from the four
// decoupled +/- subsystems rotated back to the signal/idler basis.
TransferModel assemble(const NopoParams& p, double omega, const QuadSubsystems& q,
                       const NoiseInputSpectrum& pump_spectrum, int signal_id, int idler_id,
                       const std::string& prefix) {
    TransferModel t;
    t.omega = omega;
    const auto tag = [&](const std::string& s) { return prefix.empty() ? s : prefix + "." + s; };
    t.ports = {
        {tag("out.signal"), PortKind::OutputVacuum, {}},
        {tag("out.idler"), PortKind::OutputVacuum, {}},
        {tag("loss.signal"), PortKind::LossVacuum, {}},
        {tag("loss.idler"), PortKind::LossVacuum, {}},
        {tag("pump"), PortKind::PumpInput, pump_spectrum},
    };
    t.output_modes = {
        {signal_id, p.signal_wavelength_nm, "a" + std::to_string(signal_id)},
        {idler_id, p.idler_wavelength_nm, "a" + std::to_string(idler_id)},
    };
    t.transfer = Eigen::MatrixXcd::Zero(4, 10);

    const double inv_rt2 = 1.0 / std::numbers::sqrt2;
    // Per sector: plus and minus responses, then
    //   signal = (plus + minus)/sqrt(2), idler = (plus - minus)/sqrt(2)
    // with the port noises themselves recombining the same way.
    struct Sector {
        int row_s, row_i;     // output rows (X or Y of signal/idler)
        int col_off;          // 0 for X columns, 1 for Y columns
        SubsystemResponse plus, minus;
    };
    const Sector sectors[2] = {
        {0, 2, 0, response(q.gamma_x_plus, omega, q, true),
         response(q.gamma_x_minus, omega, q, false)},
        {1, 3, 1, response(q.gamma_y_plus, omega, q, true),
         response(q.gamma_y_minus, omega, q, false)},
    };
    for (const auto& s : sectors) {
        const cd osum = 0.5 * (s.plus.h_out + s.minus.h_out);
        const cd odif = 0.5 * (s.plus.h_out - s.minus.h_out);
        const cd lsum = 0.5 * (s.plus.h_loss + s.minus.h_loss);
        const cd ldif = 0.5 * (s.plus.h_loss - s.minus.h_loss);
        const cd pump = s.plus.h_pump * inv_rt2;
        auto col = [&](int port) { return 2 * port + s.col_off; };
        t.transfer(s.row_s, col(0)) = osum;
        t.transfer(s.row_s, col(1)) = odif;
        t.transfer(s.row_s, col(2)) = lsum;
        t.transfer(s.row_s, col(3)) = ldif;
        t.transfer(s.row_s, col(4)) = pump;
        t.transfer(s.row_i, col(0)) = odif;
        t.transfer(s.row_i, col(1)) = osum;
        t.transfer(s.row_i, col(2)) = ldif;
        t.transfer(s.row_i, col(3)) = lsum;
        t.transfer(s.row_i, col(4)) = pump;
    }
    return t;
}

}  // namespace

TransferModel build_transfer(const NopoParams& p, double omega,
                             const NoiseInputSpectrum& pump_spectrum, int signal_id, int idler_id,
                             const std::string& port_prefix) {
    pump_spectrum.validate();
    const DerivedRates r = derived_rates(p);  // validates and enforces sigma > 1
    if (omega <= 0.0)
        throw ModelError(
            "analysis frequency must be positive: the phase-difference mode diffuses freely and "
            "its output spectrum diverges at DC");
    return assemble(p, omega, quad_subsystems(r, p.eta_pump_coupling), pump_spectrum, signal_id,
                    idler_id, port_prefix);
}

TransferModel passive_cavity_transfer(const NopoParams& p, double omega, int signal_id,
                                      int idler_id, const std::string& port_prefix) {
    p.validate();
    if (omega <= 0.0) throw ModelError("analysis frequency must be positive");
    DerivedRates r;
    r.fsr_hz = kSpeedOfLight / (2.0 * p.cavity_length_mm * 1e-3);
    r.kappa_total = p.round_trip_loss() * r.fsr_hz / 2.0;
    r.kappa_out = p.t_out * r.fsr_hz / 2.0;
    r.kappa_loss = r.kappa_total - r.kappa_out;
    r.escape_efficiency = r.kappa_out / r.kappa_total;
    r.sigma = 1.0;
    QuadSubsystems q = quad_subsystems(r, 0.0);
    // no parametric gain: every quadrature relaxes at the bare cavity rate
    q.gamma_x_plus = q.gamma_x_minus = q.gamma_y_plus = q.gamma_y_minus = r.kappa_total;
    q.c_pump = 0.0;
    return assemble(p, omega, q, {}, signal_id, idler_id, port_prefix);
}

CovarianceMatrix output_covariance(const TransferModel& t,
                                   const std::map<std::string, NoiseInputSpectrum>& overrides) {
    for (const auto& [name, spec] : overrides) {
        t.port_index(name);  // reject unknown channels
        spec.validate();
    }
    const int n_ports = static_cast<int>(t.ports.size());
    Eigen::VectorXd spectra(2 * n_ports);
    for (int pi = 0; pi < n_ports; ++pi) {
        NoiseInputSpectrum s = t.ports[pi].spectrum;
        if (auto it = overrides.find(t.ports[pi].name); it != overrides.end()) s = it->second;
        spectra(2 * pi) = s.s_x;
        spectra(2 * pi + 1) = s.s_y;
    }
    const Eigen::MatrixXcd scaled = t.transfer * spectra.asDiagonal();
    Eigen::MatrixXd v = (scaled * t.transfer.adjoint()).real();
    v = 0.5 * (v + v.transpose());  // kill round-off asymmetry
    return CovarianceMatrix(t.output_modes, std::move(v));
}

double closed_form_intensity_difference(const DerivedRates& r, double omega) {
    const double x = omega / (2.0 * r.kappa_total);
    return 2.0 * (1.0 - r.escape_efficiency / (1.0 + x * x));
}

}  // namespace trinopo
