#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "trinopo/cascade.hpp"
#include "trinopo/gaussian.hpp"
#include "trinopo/nopo.hpp"

namespace trinopo {

// Time-domain state-space form of the linearized model,
//   dx = A x dt + B dW,   y = C x + D xi,
// with unit-spectral-density white inputs xi (dW = xi dt) scaled per channel
// by channel_spectra. Output rows are (X, Y) per output mode, matching the
// frequency-domain transfer so that the two evaluation paths share one model.
struct StateSpaceModel {
    Eigen::MatrixXd drift;    // A, n_state x n_state
    Eigen::MatrixXd input;    // B, n_state x n_chan
    Eigen::MatrixXd output;   // C, n_out x n_state
    Eigen::MatrixXd direct;   // D, n_out x n_chan
    std::vector<double> channel_spectra;
    std::vector<ModeLabel> output_modes;

    int n_state() const { return static_cast<int>(drift.rows()); }
    int n_chan() const { return static_cast<int>(input.cols()); }
    double max_decay_rate() const;  // spectral abscissa magnitude of A
    // All drift eigenvalues must have non-positive real part; marginal
    // (zero-rate) phase-diffusion modes are expected and allowed.
    void check_stability() const;
};

StateSpaceModel nopo_state_space(const NopoParams& p, const NoiseInputSpectrum& pump_spectrum = {},
                                 int signal_id = 1, int idler_id = 2);

// Gainless counterpart of passive_cavity_transfer (vacuum-throughput check).
StateSpaceModel passive_nopo_state_space(const NopoParams& p, int signal_id = 1, int idler_id = 2);

// Joint system of both cavities with the pump substitution; detection
// efficiency is not part of the stochastic model (apply it on covariances).
StateSpaceModel cascade_state_space(const CascadeConfig& cfg);

struct SimulationPlan {
    StateSpaceModel model;
    double dt = 0.0;            // integration step, s
    int segment_length = 8192;  // samples per spectral segment
    int n_segments = 200;
    double overlap = 0.0;       // fraction of segment_length shared by neighbours
    std::uint64_t seed = 1;
    // Draw two normals per channel per step and use their scaled sum: the
    // plan then follows the same Brownian path as a plain plan at dt/2 with
    // the same seed. Step-doubling convergence tests use this to isolate
    // discretization error from statistical scatter.
    bool pair_sum_noise = false;

    void validate() const;
    // dt = min(0.1 / max decay rate, 0.05 / omega_max), segments sized to
    // hold >= 10 periods of the slowest analysis frequency.
    static SimulationPlan make_default(StateSpaceModel model, double omega_min, double omega_max,
                                       std::uint64_t seed);
};

struct SpectrumEstimate {
    double estimate = 0.0;
    double std_error = 0.0;
    int segments = 0;
};

// Euler-Maruyama integration with per-channel substreams (splitmix-seeded
// xoshiro256**, Box-Muller normals; bit-identical for equal seeds). Each
// segment is linearly detrended (removes the slow drift accumulated by the
// marginal phase-diffusion modes), Hann windowed, and evaluated at each
// requested frequency by direct DFT; the estimate is the segment mean and the
// error the standard error of that mean. All combos and frequencies share a
// single integration pass, so estimates for one plan are mutually consistent.
// Result layout: [combo][omega].
std::vector<std::vector<SpectrumEstimate>> simulate_spectra_multi(
    const SimulationPlan& plan, std::span<const QuadratureCombo> combos,
    std::span<const double> omegas);

std::vector<SpectrumEstimate> simulate_spectra(const SimulationPlan& plan,
                                               const QuadratureCombo& combo,
                                               std::span<const double> omegas);

SpectrumEstimate simulate_spectrum(const SimulationPlan& plan, const QuadratureCombo& combo,
                                   double omega);

// Analytic spectrum of the same combo through the frequency-domain transfer;
// the comparison partner for the estimates above.
double analytic_combo_spectrum(const TransferModel& t, const QuadratureCombo& combo);

}  // namespace trinopo
