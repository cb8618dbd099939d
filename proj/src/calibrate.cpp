#include "trinopo/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace trinopo {

namespace {

const std::set<std::string>& known_params() {
    static const std::set<std::string> names = {
        "detection_eta_a2", "detection_eta_a3", "detection_eta_a4",
        "detection_eta_a34",  // one efficiency shared by a3 and a4
        "pump_s_x",         "pump_s_y",         "tap_ratio"};
    return names;
}

void set_param(CascadeConfig& cfg, const std::string& name, double v) {
    if (name == "detection_eta_a2") cfg.detection_eta_a2 = v;
    else if (name == "detection_eta_a3") cfg.detection_eta_a3 = v;
    else if (name == "detection_eta_a4") cfg.detection_eta_a4 = v;
    else if (name == "detection_eta_a34") cfg.detection_eta_a3 = cfg.detection_eta_a4 = v;
    else if (name == "pump_s_x") cfg.pump0.s_x = v;
    else if (name == "pump_s_y") cfg.pump0.s_y = v;
    else if (name == "tap_ratio") cfg.tap_ratio = v;
    else throw ConfigError("unknown calibration parameter '" + name + "'");
}

}  // namespace

void CalibrationProblem::validate() const {
    if (params.empty())
        throw ConfigError("calibration needs at least one free parameter");
    if (params.size() > 6)
        throw ConfigError("calibration supports at most six free parameters");
    std::set<std::string> seen;
    for (const auto& p : params) {
        if (!known_params().count(p.name))
            throw ConfigError("unknown calibration parameter '" + p.name + "'");
        if (!seen.insert(p.name).second)
            throw ConfigError("duplicate calibration parameter '" + p.name + "'");
        if (!(p.lo < p.hi) || p.start < p.lo || p.start > p.hi)
            throw ConfigError("calibration parameter '" + p.name +
                              "' needs lo < hi and a start inside the bounds");
    }
    for (double w : weights)
        if (w < 0) throw ConfigError("calibration weights must be >= 0");
    if (max_iterations < 10) throw ConfigError("iteration cap too small");
}

std::array<double, 6> model_measurements_db(const CascadeConfig& cfg,
                                            const std::array<double, 3>& gains) {
    const CovarianceMatrix cov = build_cascade_covariance(cfg);
    MeasuredDbTable rows;
    rows.gains = gains;
    std::array<double, 6> out{};
    for (int i = 0; i < 6; ++i) {
        const QuadratureCombo combo = rows.combo(i);
        out[i] = 10.0 * std::log10(combo_variance(cov, combo) / qnl_of_combo(combo));
    }
    return out;
}

CascadeConfig apply_params(const CascadeConfig& base, const std::vector<BoundedParam>& params,
                           const std::vector<double>& values) {
    CascadeConfig cfg = base;
    for (size_t i = 0; i < params.size(); ++i) set_param(cfg, params[i].name, values[i]);
    return cfg;
}

CalibrationResult calibrate(const CalibrationProblem& problem) {
    problem.validate();
    const size_t n = problem.params.size();
    int evals = 0;

    const bool want_gains =
        std::any_of(problem.gain_weights.begin(), problem.gain_weights.end(),
                    [](double w) { return w > 0.0; });

    auto residuals = [&](const std::vector<double>& v, std::array<double, 6>& rdb,
                         std::array<double, 3>& rg) {
        const CascadeConfig cfg = apply_params(problem.base, problem.params, v);
        const auto db = model_measurements_db(cfg, problem.targets.gains);
        for (int i = 0; i < 6; ++i) rdb[i] = db[i] - problem.targets.values[i].value_db;
        rg = {0, 0, 0};
        if (want_gains) {
            const auto g = optimal_gains(build_cascade_covariance(cfg));
            for (int i = 0; i < 3; ++i) rg[i] = g[i] - problem.targets.gains[i];
        }
    };
    auto objective = [&](const std::vector<double>& v) {
        ++evals;
        std::array<double, 6> rdb;
        std::array<double, 3> rg;
        residuals(v, rdb, rg);
        double s = 0.0;
        for (int i = 0; i < 6; ++i) s += problem.weights[i] * rdb[i] * rdb[i];
        for (int i = 0; i < 3; ++i) s += problem.gain_weights[i] * rg[i] * rg[i];
        return s;
    };

    std::vector<double> x(n), step(n);
    for (size_t i = 0; i < n; ++i) {
        x[i] = problem.params[i].start;
        step[i] = 0.25 * (problem.params[i].hi - problem.params[i].lo);
    }
    double best = objective(x);
    bool converged = false;
    while (evals < problem.max_iterations) {
        bool improved = false;
        for (size_t i = 0; i < n && evals < problem.max_iterations; ++i) {
            for (double dir : {+1.0, -1.0}) {
                const double trial =
                    std::clamp(x[i] + dir * step[i], problem.params[i].lo, problem.params[i].hi);
                if (trial == x[i]) continue;
                std::vector<double> xt = x;
                xt[i] = trial;
                const double f = objective(xt);
                if (f < best - 1e-15) {
                    best = f;
                    x = xt;
                    improved = true;
                    break;
                }
                if (evals >= problem.max_iterations) break;
            }
        }
        if (!improved) {
            bool any = false;
            for (size_t i = 0; i < n; ++i) {
                step[i] *= 0.5;
                if (step[i] > 1e-7 * (problem.params[i].hi - problem.params[i].lo)) any = true;
            }
            if (!any) {
                converged = true;
                break;
            }
        }
    }

    CalibrationResult res;
    res.values = x;
    residuals(x, res.residuals_db, res.gain_residuals);
    res.objective = best;
    res.converged = converged;
    res.evaluations = evals;
    return res;
}

}  // namespace trinopo
