#include <doctest.h>

#include <numbers>
#include <sstream>

#include "trinopo/config.hpp"

using namespace trinopo;

TEST_CASE("shipped operating-point config parses") {
    const auto cfg = ConfigFile::load_path(std::string(TRINOPO_DATA_DIR) +
                                           "/configs/paper_operating_point.cfg");
    const auto cc = cascade_from_config(cfg);
    CHECK(cc.nopo1.finesse == doctest::Approx(195.0));
    CHECK(cc.nopo2.t_out == doctest::Approx(0.040));
    CHECK(cc.omega == doctest::Approx(2.0 * std::numbers::pi * 2e6));
    CHECK(cc.effective_tap_ratio() == doctest::Approx(14.6 / 17.0));
    CHECK_FALSE(cc.diagnostic_vacuum);
    const auto t = tuning_from_config(cfg);
    CHECK(t.material == "PPLN");
    REQUIRE(t.anchor_temp_c.has_value());
    CHECK(*t.anchor_temp_c == doctest::Approx(154.0));
}

TEST_CASE("shipped vacuum diagnostic config parses") {
    const auto cfg = ConfigFile::load_path(std::string(TRINOPO_DATA_DIR) +
                                           "/configs/vacuum_diagnostic.cfg");
    CHECK(cascade_from_config(cfg).diagnostic_vacuum);
}

TEST_CASE("unknown keys are rejected with their line number") {
    std::stringstream ss("analysis.frequency_mhz = 2\nnopo1.flux_capacitance = 3\n");
    try {
        ConfigFile::load(ss, "test.cfg");
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("test.cfg:2") != std::string::npos);
        CHECK(msg.find("nopo1.flux_capacitance") != std::string::npos);
    }
}

TEST_CASE("values with unit suffixes are rejected naming the key") {
    std::stringstream ss("nopo1.p_pump_mw = 118 mW\n");
    const auto cfg = ConfigFile::load(ss, "test.cfg");
    try {
        cfg.number("nopo1.p_pump_mw");
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("nopo1.p_pump_mw") != std::string::npos);
        CHECK(msg.find("not a plain number") != std::string::npos);
    }
}

TEST_CASE("duplicate and missing keys") {
    std::stringstream dup("pump.s_x = 1\npump.s_x = 2\n");
    CHECK_THROWS_AS(ConfigFile::load(dup, "d.cfg"), ConfigError);

    std::stringstream ss("pump.s_x = 1\n");
    const auto cfg = ConfigFile::load(ss, "m.cfg");
    try {
        cfg.number("nopo1.finesse");
        FAIL("expected rejection");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("nopo1.finesse") != std::string::npos);
    }
}

TEST_CASE("comments, blanks, defaults, and lists") {
    std::stringstream ss(
        "# a comment\n\nanalysis.frequency_mhz = 2.0  # trailing comment\n"
        "fiber.wavelengths_nm = 1550 1440\n");
    const auto cfg = ConfigFile::load(ss, "c.cfg");
    CHECK(cfg.number("analysis.frequency_mhz") == doctest::Approx(2.0));
    CHECK(cfg.number_or("pump.s_x", 1.0) == doctest::Approx(1.0));
    const auto f = fiber_from_config(cfg);
    REQUIRE(f.wavelengths_nm.size() == 2);
    CHECK(f.wavelengths_nm[1] == doctest::Approx(1440.0));
    CHECK(f.v_db == doctest::Approx(-3.2));  // default
}

TEST_CASE("calibration section round trip") {
    const auto cfg = ConfigFile::load_path(std::string(TRINOPO_DATA_DIR) +
                                           "/configs/calibrate_fig3.cfg");
    const auto prob = calibration_from_config(
        cfg, std::string(TRINOPO_DATA_DIR) + "/configs");
    CHECK(prob.params.size() == 6);
    CHECK(prob.targets.gains[0] == doctest::Approx(0.95));
    CHECK(prob.max_iterations == 10000);
}

TEST_CASE("tuning anchor must come as a pair") {
    std::stringstream ss("tuning.anchor_temp_c = 154\n");
    const auto cfg = ConfigFile::load(ss, "t.cfg");
    CHECK_THROWS_AS(tuning_from_config(cfg), ConfigError);
}

TEST_CASE("oracle section validation") {
    std::stringstream ss("oracle.system = banana\n");
    const auto cfg = ConfigFile::load(ss, "o.cfg");
    CHECK_THROWS_AS(oracle_from_config(cfg), ConfigError);
}
