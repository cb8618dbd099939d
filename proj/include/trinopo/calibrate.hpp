#pragma once

#include <array>
#include <string>
#include <vector>

#include "trinopo/cascade.hpp"
#include "trinopo/criteria.hpp"

namespace trinopo {

// One bounded free parameter of the calibration. Recognized names:
//   detection_eta_a2, detection_eta_a3, detection_eta_a4   in (0, 1]
//   pump_s_x, pump_s_y                                      >= 1
//   tap_ratio                                               in (0, 1]
struct BoundedParam {
    std::string name;
    double start = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Weighted least squares between the model's six measured-combination dB
// values (at the table's gains) and the measured table; optionally also pulls
// the model's optimal gains toward the measured gains.
struct CalibrationProblem {
    CascadeConfig base;
    MeasuredDbTable targets;
    std::vector<BoundedParam> params;           // 1..6 free parameters
    std::array<double, 6> weights{1, 1, 1, 1, 1, 1};
    std::array<double, 3> gain_weights{0, 0, 0};
    int max_iterations = 10000;                 // objective evaluations

    void validate() const;
};

struct CalibrationResult {
    std::vector<double> values;             // fitted parameters, problem order
    std::array<double, 6> residuals_db{};   // model - target
    std::array<double, 3> gain_residuals{};
    double objective = 0.0;
    bool converged = false;                 // step floor reached within the cap
    int evaluations = 0;
};

// The six dB values the analyzers would record for a given cascade, in the
// MeasuredDbTable row order, each relative to its combo QNL.
std::array<double, 6> model_measurements_db(const CascadeConfig& cfg,
                                            const std::array<double, 3>& gains);

CascadeConfig apply_params(const CascadeConfig& base, const std::vector<BoundedParam>& params,
                           const std::vector<double>& values);

// Derivative-free bounded coordinate descent with shrinking steps,
// deterministic from the configured start.
CalibrationResult calibrate(const CalibrationProblem& problem);

}  // namespace trinopo
