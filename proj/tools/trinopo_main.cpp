// Command-line front end: scenario simulation, criterion arithmetic, model
// calibration, tuning curves, fiber sweeps, self-homodyne geometry and the
// stochastic oracle check. Exit codes: 0 ok, 1 usage, 2 config, 3 model.

#include <CLI11.hpp>
#include <algorithm>
#include <array>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <sstream>

#include "trinopo/calibrate.hpp"
#include "trinopo/cascade.hpp"
#include "trinopo/config.hpp"
#include "trinopo/criteria.hpp"
#include "trinopo/fiber.hpp"
#include "trinopo/mz.hpp"
#include "trinopo/phase_matching.hpp"
#include "trinopo/sde.hpp"

namespace {

using namespace trinopo;
namespace fs = std::filesystem;

std::string resolve(const std::string& path, const std::string& config_path) {
    if (path.empty() || fs::path(path).is_absolute()) return path;
    const fs::path dir = fs::path(config_path).parent_path();
    return (dir / path).string();
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot open output file '" + path + "'");
    return os;
}

// companion gnuplot stub next to a CSV; plotting itself stays external
void write_plot_stub(const std::string& csv_path, const std::string& xlabel,
                     const std::string& ylabel, int n_columns) {
    std::ofstream os(csv_path + ".gp");
    if (!os) return;
    os << "set datafile separator ','\n"
       << "set key autotitle columnhead\n"
       << "set xlabel '" << xlabel << "'\n"
       << "set ylabel '" << ylabel << "'\n"
       << "plot";
    for (int c = 2; c <= n_columns; ++c)
        os << (c > 2 ? "," : "") << " '" << csv_path << "' using 1:" << c << " with lines";
    os << '\n';
}

AttenuationTable attenuation_from(const ConfigFile& cfg, const std::string& config_path) {
    const std::string p = attenuation_path(cfg);
    if (p.empty()) return AttenuationTable::defaults();
    std::ifstream is(resolve(p, config_path));
    if (!is) throw ConfigError("cannot open attenuation table '" + resolve(p, config_path) + "'");
    return AttenuationTable::load(is);
}

std::vector<CrystalDispersion> dispersion_from(const ConfigFile& cfg,
                                               const std::string& config_path) {
    const std::string p = dispersion_path(cfg);
    if (p.empty()) throw ConfigError("paths.dispersion_data is required for this command");
    std::ifstream is(resolve(p, config_path));
    if (!is) throw ConfigError("cannot open dispersion data '" + resolve(p, config_path) + "'");
    return load_dispersion_file(is);
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const ConfigFile cfg = ConfigFile::load_path(config_path);
    const CascadeConfig cc = cascade_from_config(cfg);
    const CascadeBuild build = build_cascade(cc);
    for (const auto& w : build.warnings) std::cout << "warning: " << w << '\n';

    const PhysicalityReport phys = physicality_check(build.covariance);
    if (!phys.physical)
        throw ModelError("cascade covariance failed the physicality check (min eigenvalue " +
                         std::to_string(phys.min_eigenvalue) + ")");

    std::cout.precision(6);
    if (!cc.diagnostic_vacuum) {
        std::cout << "NOPO1: sigma = " << build.rates1.sigma
                  << ", escape efficiency = " << build.rates1.escape_efficiency
                  << ", kappa = " << build.rates1.kappa_total << " 1/s\n";
        std::cout << "NOPO2: sigma = " << build.rates2.sigma
                  << ", escape efficiency = " << build.rates2.escape_efficiency
                  << ", kappa = " << build.rates2.kappa_total << " 1/s\n";
        std::cout << "pump tap ratio = " << build.tap_ratio << '\n';
    } else {
        std::cout << "diagnostic: passive cavities, vacuum output\n";
    }
    std::cout << "covariance physical, min eigenvalue of V+iJ = " << phys.min_eigenvalue << "\n\n";

    const CriteriaResult crit = evaluate_at_optimal_gains(build.covariance);
    write_criteria_report(std::cout, crit);

    fs::create_directories(out_dir.empty() ? "." : out_dir);
    const fs::path dir = out_dir.empty() ? "." : out_dir;
    {
        auto os = open_out((dir / "covariance.txt").string());
        os << "# 6x6 quadrature covariance of modes a2, a3, a4 (vacuum = 1)\n";
        os << "# " << build.tap_note << '\n';
        write_covariance(os, build.covariance);
    }
    {
        auto os = open_out((dir / "criteria.csv").string());
        write_criteria_csv(os, crit);
    }
    std::cout << "\nwrote " << (dir / "covariance.txt").string() << " and "
              << (dir / "criteria.csv").string() << '\n';
    return 0;
}

int cmd_criteria(const std::string& measurements, const std::string& covariance,
                 const std::string& gains_arg, const std::string& out_path) {
    CriteriaResult r;
    if (!measurements.empty()) {
        std::ifstream is(measurements);
        if (!is) throw ConfigError("cannot open measurements file '" + measurements + "'");
        r = criteria_from_measurements(MeasuredDbTable::from_csv(is));
        write_criteria_report(std::cout, r);
        std::cout << "note: deltas are recombined from the tabulated dB entries; rounding in "
                     "those entries propagates to the sums\n";
    } else if (!covariance.empty()) {
        std::ifstream is(covariance);
        if (!is) throw ConfigError("cannot open covariance file '" + covariance + "'");
        const CovarianceMatrix cov = read_covariance(is);
        if (gains_arg.empty()) {
            r = evaluate_at_optimal_gains(cov);
        } else {
            std::array<double, 3> g{};
            std::istringstream gs(gains_arg);
            std::string tok;
            int k = 0;
            while (std::getline(gs, tok, ',') && k < 3) g[k++] = std::stod(tok);
            if (k != 3) throw ConfigError("--gains needs three comma-separated values");
            r = evaluate(cov, g);
        }
        write_criteria_report(std::cout, r);
    } else {
        throw ConfigError("criteria needs --measurements or --covariance");
    }
    if (!out_path.empty()) {
        auto os = open_out(out_path);
        write_criteria_csv(os, r);
    }
    return 0;
}

int cmd_calibrate(const std::string& config_path, const std::string& out_path) {
    const ConfigFile cfg = ConfigFile::load_path(config_path);
    const CalibrationProblem problem =
        calibration_from_config(cfg, fs::path(config_path).parent_path().string());
    const CalibrationResult res = calibrate(problem);

    std::cout.precision(6);
    if (!res.converged)
        std::cout << "warning: iteration cap reached before the step floor; reporting the best "
                     "point found\n";
    std::cout << "objective = " << res.objective << " after " << res.evaluations
              << " evaluations\n";
    for (size_t i = 0; i < problem.params.size(); ++i)
        std::cout << problem.params[i].name << " = " << res.values[i] << "  (bounds ["
                  << problem.params[i].lo << ", " << problem.params[i].hi << "])\n";
    const auto model_db = model_measurements_db(
        apply_params(problem.base, problem.params, res.values), problem.targets.gains);
    std::cout << "\nquantity            model_dB   target_dB  residual_dB\n";
    for (int i = 0; i < 6; ++i) {
        std::ostringstream name;
        name << MeasuredDbTable::row_names()[i];
        std::cout << name.str() << std::string(20 - name.str().size(), ' ') << model_db[i]
                  << "   " << problem.targets.values[i].value_db << "   " << res.residuals_db[i]
                  << '\n';
    }
    if (!out_path.empty()) {
        auto os = open_out(out_path);
        os.precision(12);
        os << "parameter,value\n";
        for (size_t i = 0; i < problem.params.size(); ++i)
            os << problem.params[i].name << ',' << res.values[i] << '\n';
        os << "objective," << res.objective << '\n';
        for (int i = 0; i < 6; ++i)
            os << "residual_db_" << i + 1 << ',' << res.residuals_db[i] << '\n';
    }
    return 0;
}

int cmd_tuning_curve(const std::string& config_path, const std::string& out_path) {
    const ConfigFile cfg = ConfigFile::load_path(config_path);
    const TuningSection t = tuning_from_config(cfg);
    const auto sets = dispersion_from(cfg, config_path);
    CrystalDispersion disp = find_material(sets, t.material);
    double pump_nm = t.pump_nm;
    if (pump_nm <= 0.0) {
        if (!cfg.has("nopo2.pump_wavelength_nm"))
            throw ConfigError("tuning.pump_nm or nopo2.pump_wavelength_nm is required");
        pump_nm = cfg.number("nopo2.pump_wavelength_nm");
    }
    if (t.anchor_temp_c)
        disp = calibrate_poling(disp, pump_nm, *t.anchor_temp_c, *t.anchor_signal_nm);

    const auto curve = tuning_curve(disp, pump_nm, t.t_min_c, t.t_max_c, t.step_c);
    const LineFit fit = fit_signal_line(curve);
    std::cout.precision(7);
    std::cout << "material " << t.material << ", pump " << pump_nm << " nm, poling period "
              << disp.poling_period_um << " um\n";
    std::cout << "signal slope = " << fit.slope << " nm/K, R^2 = " << fit.r_squared << '\n';

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        os = &file;
    }
    os->precision(10);
    *os << "temp_c,signal_nm,idler_nm\n";
    for (const auto& p : curve)
        *os << p.temp_c << ',' << p.signal_nm << ',' << p.idler_nm << '\n';
    if (!out_path.empty()) write_plot_stub(out_path, "temperature (C)", "wavelength (nm)", 3);
    return 0;
}

int cmd_fiber_sweep(const std::string& config_path, const std::string& out_path) {
    const ConfigFile cfg = ConfigFile::load_path(config_path);
    const FiberSection f = fiber_from_config(cfg);
    const AttenuationTable table = attenuation_from(cfg, config_path);
    std::vector<double> wavelengths = f.wavelengths_nm;
    if (wavelengths.empty())
        for (const auto& [wl, alpha] : table.entries) wavelengths.push_back(wl);

    std::cout.precision(6);
    for (double wl : wavelengths) {
        const double alpha = table.alpha_at(wl);
        std::cout << wl << " nm (" << alpha << " dB/km): max distance to " << f.cutoff_db
                  << " dB cutoff = " << max_distance_km(f.v_db, f.cutoff_db, alpha) << " km\n";
    }

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        os = &file;
    }
    os->precision(10);
    *os << "distance_km";
    for (double wl : wavelengths) *os << ",v_db_" << wl << "nm";
    *os << '\n';
    const int n = static_cast<int>(std::floor(f.max_km / f.step_km + 1e-9));
    for (int i = 0; i <= n; ++i) {
        const double d = i * f.step_km;
        *os << d;
        for (double wl : wavelengths)
            *os << ',' << degrade_db(f.v_db, transmission(d, table.alpha_at(wl)));
        *os << '\n';
    }
    if (!out_path.empty())
        write_plot_stub(out_path, "distance (km)", "correlation (dB rel. QNL)",
                        1 + static_cast<int>(wavelengths.size()));
    return 0;
}

int cmd_mz(double f_mhz, double n_index, double delta_l, const std::string& lock, double s_x,
           double s_y, double visibility) {
    MzConfig cfg;
    cfg.sideband_hz = f_mhz * 1e6;
    cfg.refractive_index = n_index;
    cfg.visibility = visibility;
    cfg.arm_delta_m = delta_l > 0.0 ? delta_l : arm_delta_for_pi(cfg.sideband_hz, n_index);
    if (lock == "short") cfg.lock = MzLock::ShortArmOnly;
    else if (lock == "balanced") cfg.lock = MzLock::BalancedPiOver2;
    else throw ConfigError("--lock must be 'short' or 'balanced'");

    std::cout.precision(6);
    std::cout << "arm length difference = " << cfg.arm_delta_m
              << " m, sideband phase = " << sideband_phase(cfg) << " rad\n";
    const MzReadout r = measured_quantities(cfg, s_x, s_y);
    const double signal = cfg.lock == MzLock::ShortArmOnly ? r.sum_channel : r.diff_channel;
    const double qnl = cfg.lock == MzLock::ShortArmOnly ? r.diff_channel : r.sum_channel;
    const char* schan = cfg.lock == MzLock::ShortArmOnly ? "sum" : "difference";
    const char* qchan = cfg.lock == MzLock::ShortArmOnly ? "difference" : "sum";
    std::cout << "signal channel (" << schan << "): " << signal << "  ["
              << (cfg.lock == MzLock::ShortArmOnly ? r.sum_label : r.diff_label) << "]\n";
    std::cout << "QNL channel (" << qchan << "): " << qnl << "  -> "
              << 10.0 * std::log10(signal / qnl) << " dB relative to QNL\n";
    return 0;
}

int cmd_oracle_check(const std::string& config_path, std::uint64_t seed,
                     const std::string& out_path) {
    const ConfigFile cfg = ConfigFile::load_path(config_path);
    const OracleSection oc = oracle_from_config(cfg);

    std::ostream* os = &std::cout;
    std::ofstream file;
    if (!out_path.empty()) {
        file = open_out(out_path);
        os = &file;
    }

    const CascadeConfig cc = cascade_from_config(cfg);
    int failures = 0;
    *os << "combo,omega_rad_s,analytic,simulated,std_error,pass\n";
    os->precision(8);

    std::vector<QuadratureCombo> combos;
    std::vector<double> omegas;
    std::vector<std::vector<double>> analytic;  // [combo][omega]
    StateSpaceModel model;

    if (oc.system == "nopo2") {
        model = nopo_state_space(cc.nopo2, {}, 3, 4);
        const DerivedRates r = derived_rates(cc.nopo2);
        for (const char* ctext : {"X3-X4", "X3+X4", "Y3+Y4", "X3"})
            combos.push_back(QuadratureCombo::parse(ctext));
        for (double x : {0.1, 0.3, 1.0, 3.0, 10.0}) omegas.push_back(x * r.kappa_total);
        analytic.resize(combos.size());
        for (double omega : omegas) {
            const TransferModel t = build_transfer(cc.nopo2, omega, {}, 3, 4);
            const CovarianceMatrix cov = output_covariance(t);
            for (size_t j = 0; j < combos.size(); ++j)
                analytic[j].push_back(combo_variance(cov, combos[j]));
        }
    } else {
        model = cascade_state_space(cc);
        CascadeConfig ideal = cc;  // detection loss is not part of the stochastic model
        ideal.detection_eta_a2 = ideal.detection_eta_a3 = ideal.detection_eta_a4 = 1.0;
        for (const char* ctext : {"X3-X4", "Y3+Y4", "X2-X4", "Y2+Y3+Y4"})
            combos.push_back(QuadratureCombo::parse(ctext));
        for (double x : {0.5, 1.0, 2.0}) omegas.push_back(x * cc.omega);
        analytic.resize(combos.size());
        for (double omega : omegas) {
            CascadeConfig at = ideal;
            at.omega = omega;
            const CovarianceMatrix cov = build_cascade_covariance(at);
            for (size_t j = 0; j < combos.size(); ++j)
                analytic[j].push_back(combo_variance(cov, combos[j]));
        }
    }

    SimulationPlan plan = SimulationPlan::make_default(
        model, *std::min_element(omegas.begin(), omegas.end()),
        *std::max_element(omegas.begin(), omegas.end()), seed);
    plan.n_segments = oc.n_segments;
    if (oc.segment_length > 0) plan.segment_length = oc.segment_length;
    const auto est = simulate_spectra_multi(plan, combos, omegas);

    for (size_t j = 0; j < combos.size(); ++j)
        for (size_t k = 0; k < omegas.size(); ++k) {
            const bool pass =
                std::abs(est[j][k].estimate - analytic[j][k]) <= 3.0 * est[j][k].std_error;
            if (!pass) ++failures;
            *os << combos[j].str() << ',' << omegas[k] << ',' << analytic[j][k] << ','
                << est[j][k].estimate << ',' << est[j][k].std_error << ','
                << (pass ? "yes" : "no") << '\n';
        }
    std::cout << (failures == 0 ? "oracle check passed" : "oracle check FAILED") << " ("
              << failures << " comparisons outside 3 standard errors)\n";
    return failures == 0 ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"cascaded two-NOPO three-color entanglement toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, measurements, covariance, gains, lock = "short";
    std::string format = "csv";
    std::uint64_t seed = 1;
    double f_mhz = 2.0, n_index = 1.5625, delta_l = 0.0, s_x = 1.0, s_y = 1.0, visibility = 1.0;

    auto add_common = [&](CLI::App* sub, bool needs_config) {
        if (needs_config)
            sub->add_option("--config", config_path, "scenario config file")->required();
        sub->add_option("--out", out_path, "output file or directory");
        sub->add_option("--seed", seed, "random seed for stochastic commands");
        sub->add_option("--format", format, "output format (csv)")
            ->check(CLI::IsMember({"csv"}));
    };

    auto* simulate = app.add_subcommand("simulate", "full-cascade covariance and criteria");
    add_common(simulate, true);
    auto* criteria = app.add_subcommand("criteria", "criterion arithmetic from measurements "
                                                    "or a covariance file");
    add_common(criteria, false);
    criteria->add_option("--measurements", measurements, "six-row dB table CSV");
    criteria->add_option("--covariance", covariance, "covariance block file");
    criteria->add_option("--gains", gains, "g1,g2,g3 (default: optimal)");
    auto* calibrate_cmd = app.add_subcommand("calibrate", "fit bounded parameters to measured dB");
    add_common(calibrate_cmd, true);
    auto* tuning = app.add_subcommand("tuning-curve", "phase-matched wavelengths vs temperature");
    add_common(tuning, true);
    auto* fiber = app.add_subcommand("fiber-sweep", "correlation decay over fiber distance");
    add_common(fiber, true);
    auto* mz = app.add_subcommand("mz", "self-homodyne interferometer geometry and readout");
    mz->add_option("--f-mhz", f_mhz, "sideband frequency in MHz");
    mz->add_option("--n", n_index, "refractive index of the delay medium");
    mz->add_option("--delta-l", delta_l, "arm length difference in m (default: set for pi)");
    mz->add_option("--lock", lock, "short | balanced");
    mz->add_option("--s-x", s_x, "input amplitude quadrature spectrum");
    mz->add_option("--s-y", s_y, "input phase quadrature spectrum");
    mz->add_option("--visibility", visibility, "fringe visibility");
    auto* oracle = app.add_subcommand("oracle-check", "stochastic integration vs analytic spectra");
    add_common(oracle, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (simulate->parsed()) return cmd_simulate(config_path, out_path);
        if (criteria->parsed()) return cmd_criteria(measurements, covariance, gains, out_path);
        if (calibrate_cmd->parsed()) return cmd_calibrate(config_path, out_path);
        if (tuning->parsed()) return cmd_tuning_curve(config_path, out_path);
        if (fiber->parsed()) return cmd_fiber_sweep(config_path, out_path);
        if (mz->parsed()) return cmd_mz(f_mhz, n_index, delta_l, lock, s_x, s_y, visibility);
        if (oracle->parsed()) return cmd_oracle_check(config_path, seed, out_path);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ModelError& e) {
        std::cerr << "model error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
    return 1;
}
