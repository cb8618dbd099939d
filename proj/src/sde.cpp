#include "trinopo/sde.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "trinopo/mz.hpp"  // kSpeedOfLight

namespace trinopo {

namespace {

constexpr double kInvRt2 = 0.7071067811865475244;

// splitmix64: seed expander for the per-channel substreams.
std::uint64_t splitmix64(std::uint64_t& state) {
    state += 0x9E3779B97f4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// xoshiro256** with Box-Muller normals; self-contained so that equal seeds
// give bit-identical streams on every platform.
class NormalStream {
  public:
    explicit NormalStream(std::uint64_t seed) {
        std::uint64_t sm = seed;
        for (auto& word : s_) word = splitmix64(sm);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        while (u1 <= 1e-300) u1 = uniform01();
        const double u2 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

  private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

    std::uint64_t next() {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    double uniform01() { return (next() >> 11) * 0x1.0p-53; }

    std::uint64_t s_[4] = {};
    double spare_ = 0.0;
    bool have_spare_ = false;
};

void subsystem_rows(const QuadSubsystems& q, Eigen::MatrixXd& a, Eigen::MatrixXd& b, int s0,
                    int c0) {
    // states s0..s0+3 = (x+, x-, y+, y-); channels c0..c0+9 in port order
    // (out_s, out_i, loss_s, loss_i, pump) x (X, Y).
    a(s0 + 0, s0 + 0) = -q.gamma_x_plus;
    a(s0 + 1, s0 + 1) = -q.gamma_x_minus;
    a(s0 + 2, s0 + 2) = -q.gamma_y_plus;
    a(s0 + 3, s0 + 3) = -q.gamma_y_minus;
    const double bo = q.b_out * kInvRt2, bl = q.b_loss * kInvRt2;
    b(s0 + 0, c0 + 0) = bo;  b(s0 + 0, c0 + 2) = bo;
    b(s0 + 0, c0 + 4) = bl;  b(s0 + 0, c0 + 6) = bl;
    b(s0 + 0, c0 + 8) = q.c_pump;
    b(s0 + 1, c0 + 0) = bo;  b(s0 + 1, c0 + 2) = -bo;
    b(s0 + 1, c0 + 4) = bl;  b(s0 + 1, c0 + 6) = -bl;
    b(s0 + 2, c0 + 1) = bo;  b(s0 + 2, c0 + 3) = bo;
    b(s0 + 2, c0 + 5) = bl;  b(s0 + 2, c0 + 7) = bl;
    b(s0 + 2, c0 + 9) = q.c_pump;
    b(s0 + 3, c0 + 1) = bo;  b(s0 + 3, c0 + 3) = -bo;
    b(s0 + 3, c0 + 5) = bl;  b(s0 + 3, c0 + 7) = -bl;
}

// (X, Y) output rows of one mode; sign = +1 for the signal, -1 for the idler.
void output_rows(double b_out, double sign, Eigen::MatrixXd& c, Eigen::MatrixXd& d, int row0,
                 int s0, int out_col) {
    const double bo = b_out * kInvRt2;
    c(row0 + 0, s0 + 0) = bo;
    c(row0 + 0, s0 + 1) = sign * bo;
    c(row0 + 1, s0 + 2) = bo;
    c(row0 + 1, s0 + 3) = sign * bo;
    d(row0 + 0, out_col + 0) = -1.0;
    d(row0 + 1, out_col + 1) = -1.0;
}

}  // namespace

double StateSpaceModel::max_decay_rate() const {
    Eigen::EigenSolver<Eigen::MatrixXd> es(drift, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

void StateSpaceModel::check_stability() const {
    Eigen::EigenSolver<Eigen::MatrixXd> es(drift, false);
    const double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
    const double worst = es.eigenvalues().real().maxCoeff();
    if (worst > 1e-9 * scale)
        throw ModelError("unstable drift: eigenvalue with positive real part " +
                         std::to_string(worst));
}

StateSpaceModel nopo_state_space(const NopoParams& p, const NoiseInputSpectrum& pump_spectrum,
                                 int signal_id, int idler_id) {
    pump_spectrum.validate();
    const DerivedRates r = derived_rates(p);
    const QuadSubsystems q = quad_subsystems(r, p.eta_pump_coupling);
    StateSpaceModel m;
    m.drift = Eigen::MatrixXd::Zero(4, 4);
    m.input = Eigen::MatrixXd::Zero(4, 10);
    m.output = Eigen::MatrixXd::Zero(4, 4);
    m.direct = Eigen::MatrixXd::Zero(4, 10);
    subsystem_rows(q, m.drift, m.input, 0, 0);
    output_rows(q.b_out, +1.0, m.output, m.direct, 0, 0, 0);
    output_rows(q.b_out, -1.0, m.output, m.direct, 2, 0, 2);
    m.channel_spectra.assign(10, 1.0);
    m.channel_spectra[8] = pump_spectrum.s_x;
    m.channel_spectra[9] = pump_spectrum.s_y;
    m.output_modes = {{signal_id, p.signal_wavelength_nm, "a" + std::to_string(signal_id)},
                      {idler_id, p.idler_wavelength_nm, "a" + std::to_string(idler_id)}};
    return m;
}

StateSpaceModel passive_nopo_state_space(const NopoParams& p, int signal_id, int idler_id) {
    p.validate();
    DerivedRates r;
    r.fsr_hz = kSpeedOfLight / (2.0 * p.cavity_length_mm * 1e-3);
    r.kappa_total = p.round_trip_loss() * r.fsr_hz / 2.0;
    r.kappa_out = p.t_out * r.fsr_hz / 2.0;
    r.kappa_loss = r.kappa_total - r.kappa_out;
    r.sigma = 1.0;
    QuadSubsystems q = quad_subsystems(r, 0.0);
    q.gamma_x_plus = q.gamma_x_minus = q.gamma_y_plus = q.gamma_y_minus = r.kappa_total;
    q.c_pump = 0.0;
    StateSpaceModel m;
    m.drift = Eigen::MatrixXd::Zero(4, 4);
    m.input = Eigen::MatrixXd::Zero(4, 10);
    m.output = Eigen::MatrixXd::Zero(4, 4);
    m.direct = Eigen::MatrixXd::Zero(4, 10);
    subsystem_rows(q, m.drift, m.input, 0, 0);
    output_rows(q.b_out, +1.0, m.output, m.direct, 0, 0, 0);
    output_rows(q.b_out, -1.0, m.output, m.direct, 2, 0, 2);
    m.channel_spectra.assign(10, 1.0);
    m.output_modes = {{signal_id, p.signal_wavelength_nm, "a" + std::to_string(signal_id)},
                      {idler_id, p.idler_wavelength_nm, "a" + std::to_string(idler_id)}};
    return m;
}

StateSpaceModel cascade_state_space(const CascadeConfig& cfg) {
    cfg.validate();
    if (cfg.diagnostic_vacuum)
        throw std::invalid_argument("the stochastic model is for the active cascade");
    const DerivedRates r1 = derived_rates(cfg.nopo1);
    const DerivedRates r2 = derived_rates(cfg.nopo2);
    const QuadSubsystems q1 = quad_subsystems(r1, cfg.nopo1.eta_pump_coupling);
    const QuadSubsystems q2 = quad_subsystems(r2, cfg.nopo2.eta_pump_coupling);
    const double tap = cfg.effective_tap_ratio();

    // states: NOPO1 (0..3), NOPO2 (4..7); channels: NOPO1 ports (0..9),
    // tap (10,11), NOPO2 vacuum ports (12..19).
    StateSpaceModel m;
    m.drift = Eigen::MatrixXd::Zero(8, 8);
    m.input = Eigen::MatrixXd::Zero(8, 20);
    m.output = Eigen::MatrixXd::Zero(6, 8);
    m.direct = Eigen::MatrixXd::Zero(6, 20);
    subsystem_rows(q1, m.drift, m.input, 0, 0);

    Eigen::MatrixXd a2 = Eigen::MatrixXd::Zero(4, 4);
    Eigen::MatrixXd b2 = Eigen::MatrixXd::Zero(4, 10);
    subsystem_rows(q2, a2, b2, 0, 0);
    m.drift.block(4, 4, 4, 4) = a2;
    m.input.block(4, 12, 4, 8) = b2.leftCols(8);  // NOPO2's own vacuum ports

    // a1 output rows (the NOPO2 pump input after the tap beam splitter).
    Eigen::MatrixXd c1 = Eigen::MatrixXd::Zero(2, 8);
    const double bo1 = q1.b_out * kInvRt2;
    c1(0, 0) = bo1; c1(0, 1) = bo1;  // X of a1 from x1+, x1-
    c1(1, 2) = bo1; c1(1, 3) = bo1;  // Y of a1 from y1+, y1-
    const double rt_tap = std::sqrt(tap), rt_vac = std::sqrt(1.0 - tap);
    // pump drive on the NOPO2 plus modes: c_pump2 * xi_pump2
    m.drift.row(4) += q2.c_pump * rt_tap * c1.row(0);  // x2+ <- X of a1
    m.drift.row(6) += q2.c_pump * rt_tap * c1.row(1);  // y2+ <- Y of a1
    m.input(4, 0) += q2.c_pump * rt_tap * (-1.0);      // reflected out.signal X noise in a1
    m.input(6, 1) += q2.c_pump * rt_tap * (-1.0);
    m.input(4, 10) = q2.c_pump * rt_vac;
    m.input(6, 11) = q2.c_pump * rt_vac;

    // outputs: a2 = NOPO1 idler; a3, a4 = NOPO2 signal, idler.
    output_rows(q1.b_out, -1.0, m.output, m.direct, 0, 0, 2);
    Eigen::MatrixXd c2 = Eigen::MatrixXd::Zero(4, 4);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(4, 8);
    output_rows(q2.b_out, +1.0, c2, d2, 0, 0, 0);
    output_rows(q2.b_out, -1.0, c2, d2, 2, 0, 2);
    m.output.block(2, 4, 4, 4) = c2;
    m.direct.block(2, 12, 4, 8) = d2;

    m.channel_spectra.assign(20, 1.0);
    m.channel_spectra[8] = cfg.pump0.s_x;
    m.channel_spectra[9] = cfg.pump0.s_y;
    m.output_modes = {{2, cfg.nopo1.idler_wavelength_nm, "a2"},
                      {3, cfg.nopo2.signal_wavelength_nm, "a3"},
                      {4, cfg.nopo2.idler_wavelength_nm, "a4"}};
    return m;
}

void SimulationPlan::validate() const {
    if (model.n_state() == 0) throw std::invalid_argument("empty state-space model");
    model.check_stability();
    if (dt <= 0.0) throw std::invalid_argument("time step must be positive");
    if (dt * model.max_decay_rate() >= 0.1)
        throw ModelError("time step too large: dt * max decay rate = " +
                         std::to_string(dt * model.max_decay_rate()) + " >= 0.1");
    if (segment_length < 64) throw std::invalid_argument("segment length must be >= 64 samples");
    if (n_segments < 200)
        throw std::invalid_argument("need at least 200 segments for a stable error estimate");
    if (!(overlap >= 0.0 && overlap < 1.0)) throw std::invalid_argument("overlap must be in [0,1)");
}

SimulationPlan SimulationPlan::make_default(StateSpaceModel model, double omega_min,
                                            double omega_max, std::uint64_t seed) {
    if (!(omega_min > 0.0 && omega_max >= omega_min))
        throw std::invalid_argument("need 0 < omega_min <= omega_max");
    SimulationPlan plan;
    const double rate = model.max_decay_rate();
    plan.model = std::move(model);
    plan.dt = std::min(0.1 / rate / 2.0, 0.05 / omega_max);
    const double period_steps = 2.0 * std::numbers::pi / omega_min / plan.dt;
    int seg = 1024;
    while (seg < 10.0 * period_steps && seg < (1 << 22)) seg *= 2;
    plan.segment_length = seg;
    plan.n_segments = 200;
    plan.seed = seed;
    return plan;
}

std::vector<std::vector<SpectrumEstimate>> simulate_spectra_multi(
    const SimulationPlan& plan, std::span<const QuadratureCombo> combos,
    std::span<const double> omegas) {
    plan.validate();
    if (combos.empty()) throw std::invalid_argument("need at least one combo");
    for (double om : omegas)
        if (om <= 0.0) throw std::invalid_argument("analysis frequencies must be positive");
    const StateSpaceModel& m = plan.model;
    const int n_combo = static_cast<int>(combos.size());
    const size_t n_om = omegas.size();

    // combos -> weight rows over output quadratures, then onto states/channels
    Eigen::MatrixXd wout = Eigen::MatrixXd::Zero(n_combo, m.output.rows());
    for (int j = 0; j < n_combo; ++j)
        for (const auto& term : combos[j].terms) {
            int idx = -1;
            for (size_t k = 0; k < m.output_modes.size(); ++k)
                if (m.output_modes[k].id == term.mode_id) idx = static_cast<int>(k);
            if (idx < 0)
                throw std::invalid_argument("combo references mode id " +
                                            std::to_string(term.mode_id) +
                                            " absent from the model");
            wout(j, 2 * idx + (term.quad == Quad::X ? 0 : 1)) += term.weight;
        }
    const Eigen::MatrixXd cz = wout * m.output;  // n_combo x n_state
    const Eigen::MatrixXd dz = wout * m.direct;  // n_combo x n_chan

    const int n_chan = m.n_chan();
    std::vector<NormalStream> streams;
    streams.reserve(n_chan);
    std::uint64_t sm = plan.seed;
    for (int c = 0; c < n_chan; ++c) streams.emplace_back(splitmix64(sm));

    const double dt = plan.dt;
    const double sqdt = std::sqrt(dt);
    Eigen::VectorXd noise_b(n_chan), noise_d(n_chan);
    for (int c = 0; c < n_chan; ++c) {
        const double amp = std::sqrt(m.channel_spectra[c]);
        noise_b(c) = amp * sqdt;  // scales dW in the state update
        noise_d(c) = amp / sqdt;  // scales xi in the output
    }

    const int seg = plan.segment_length;
    const int hop = std::max(1, static_cast<int>(std::lround(seg * (1.0 - plan.overlap))));

    Eigen::VectorXd window(seg);
    for (int i = 0; i < seg; ++i)
        window(i) = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * i / (seg - 1)));
    const double wnorm = window.squaredNorm();
    const double t_mean = (seg - 1.0) / 2.0;
    double t_var = 0.0;
    for (int i = 0; i < seg; ++i) t_var += (i - t_mean) * (i - t_mean);

    Eigen::VectorXd x = Eigen::VectorXd::Zero(m.n_state());
    Eigen::VectorXd w(n_chan), xnext(m.n_state()), scaled_w(n_chan), xmid(m.n_state());
    // ring of the last `seg` samples per combo; segments are emitted every
    // `hop` recorded steps once the first segment has filled
    Eigen::MatrixXd buf(n_combo, seg);

    std::vector<std::vector<std::vector<double>>> power(
        combos.size(), std::vector<std::vector<double>>(n_om));

    auto flush_segment = [&](long next_pos) {
        // next_pos = index one past the segment end in recorded-sample space;
        // ring layout: sample (next_pos - seg + i) lives at column
        // (next_pos - seg + i) mod seg shifted consistently below.
        for (int j = 0; j < n_combo; ++j) {
            double zsum = 0.0, zt = 0.0;
            for (int i = 0; i < seg; ++i) {
                const double v = buf(j, (next_pos - seg + i) % seg);
                zsum += v;
                zt += (i - t_mean) * v;
            }
            const double slope = zt / t_var;
            const double mean = zsum / seg;
            std::vector<std::complex<double>> amp(n_om, {0.0, 0.0});
            std::vector<std::complex<double>> rot(n_om), phase(n_om, {1.0, 0.0});
            for (size_t k = 0; k < n_om; ++k) rot[k] = std::polar(1.0, omegas[k] * dt);
            for (int i = 0; i < seg; ++i) {
                const double z =
                    (buf(j, (next_pos - seg + i) % seg) - mean - slope * (i - t_mean)) * window(i);
                for (size_t k = 0; k < n_om; ++k) {
                    amp[k] += z * phase[k];
                    phase[k] *= rot[k];
                }
            }
            for (size_t k = 0; k < n_om; ++k)
                power[j][k].push_back(dt * std::norm(amp[k]) / wnorm);
        }
    };

    const double inv_rt2 = 1.0 / std::numbers::sqrt2;
    const auto advance = [&] {
        if (plan.pair_sum_noise)
            for (int c = 0; c < n_chan; ++c)
                w(c) = (streams[c].normal() + streams[c].normal()) * inv_rt2;
        else
            for (int c = 0; c < n_chan; ++c) w(c) = streams[c].normal();
        scaled_w = noise_b.cwiseProduct(w);
        xnext = x;
        xnext.noalias() += dt * (m.drift * x);
        xnext.noalias() += m.input * scaled_w;
    };
    for (int i = 0; i < seg; ++i) {  // warm-up, one segment length
        advance();
        x.swap(xnext);
    }
    const long total = static_cast<long>(seg) + static_cast<long>(hop) * (plan.n_segments - 1);
    int emitted = 0;
    for (long i = 0; i < total; ++i) {
        advance();
        xmid = 0.5 * (x + xnext);
        scaled_w = noise_d.cwiseProduct(w);
        buf.col(i % seg).noalias() = cz * xmid;
        buf.col(i % seg).noalias() += dz * scaled_w;
        x.swap(xnext);
        const long filled = i + 1;
        if (filled >= seg && (filled - seg) % hop == 0 && emitted < plan.n_segments) {
            flush_segment(filled);
            ++emitted;
        }
    }

    std::vector<std::vector<SpectrumEstimate>> out(combos.size());
    for (size_t j = 0; j < combos.size(); ++j) {
        out[j].resize(n_om);
        for (size_t k = 0; k < n_om; ++k) {
            const auto& p = power[j][k];
            double mean = 0.0;
            for (double v : p) mean += v;
            mean /= p.size();
            double var = 0.0;
            for (double v : p) var += (v - mean) * (v - mean);
            var /= (p.size() - 1);
            out[j][k] = {mean, std::sqrt(var / p.size()), static_cast<int>(p.size())};
        }
    }
    return out;
}

std::vector<SpectrumEstimate> simulate_spectra(const SimulationPlan& plan,
                                               const QuadratureCombo& combo,
                                               std::span<const double> omegas) {
    return simulate_spectra_multi(plan, std::span<const QuadratureCombo>(&combo, 1), omegas)
        .front();
}

SpectrumEstimate simulate_spectrum(const SimulationPlan& plan, const QuadratureCombo& combo,
                                   double omega) {
    return simulate_spectra(plan, combo, std::span<const double>(&omega, 1)).front();
}

double analytic_combo_spectrum(const TransferModel& t, const QuadratureCombo& combo) {
    return combo_variance(output_covariance(t), combo);
}

}  // namespace trinopo
