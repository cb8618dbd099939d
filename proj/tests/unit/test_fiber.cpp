#include <doctest.h>

#include <cmath>
#include <sstream>

#include "trinopo/fiber.hpp"

using namespace trinopo;

TEST_CASE("span transmission") {
    CHECK(transmission(20.0, 0.20) == doctest::Approx(std::pow(10.0, -0.4)).epsilon(1e-14));
    CHECK(transmission(20.0, 0.20) == doctest::Approx(0.398).epsilon(2e-3));
    CHECK(transmission(20.0, 0.65) == doctest::Approx(0.050).epsilon(2e-2));
    CHECK(transmission(0.0, 0.20) == doctest::Approx(1.0));
}

TEST_CASE("variance degradation through loss") {
    CHECK(degrade_db(-3.2, 0.0863) == doctest::Approx(-0.2).epsilon(2e-3));
    CHECK(degrade_db(-3.2, 1.0) == doctest::Approx(-3.2).epsilon(1e-13));
    CHECK(degrade_db(0.0, 0.4) == doctest::Approx(0.0).epsilon(1e-13));
    CHECK_THROWS_AS(degrade_db(-3.2, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(degrade_db(-3.2, 1.2), std::invalid_argument);
}

TEST_CASE("degradation is monotone and never crosses the QNL") {
    double prev = -3.2;
    for (double eta : {0.9, 0.7, 0.5, 0.3, 0.1, 0.01}) {
        const double v = degrade_db(-3.2, eta);
        CHECK(v > prev);
        CHECK(v < 0.0);
        prev = v;
    }
}

TEST_CASE("loss channels compose multiplicatively") {
    for (double e1 : {0.9, 0.5, 0.2})
        for (double e2 : {0.8, 0.4, 0.05})
            CHECK(degrade_db(degrade_db(-3.2, e1), e2) ==
                  doctest::Approx(degrade_db(-3.2, e1 * e2)).epsilon(1e-12));
}

TEST_CASE("maximum distances to the cutoff") {
    CHECK(max_distance_km(-3.2, -0.2, 0.20) == doctest::Approx(53.19).epsilon(2e-3));
    CHECK(max_distance_km(-3.2, -0.2, 0.25) == doctest::Approx(42.55).epsilon(2e-3));
    CHECK(max_distance_km(-3.2, -0.2, 0.65) == doctest::Approx(16.37).epsilon(2e-3));
    // reaching the cutoff exactly at the solved distance
    for (double alpha : {0.20, 0.25, 0.65}) {
        const double d = max_distance_km(-3.2, -0.2, alpha);
        CHECK(degrade_db(-3.2, transmission(d, alpha)) == doctest::Approx(-0.2).epsilon(1e-10));
    }
}

TEST_CASE("one loss budget serves every attenuation") {
    const double b = max_distance_km(-3.2, -0.2, 1.0);  // budget in dB
    CHECK(b == doctest::Approx(10.64).epsilon(1e-3));
    for (double alpha : {0.1, 0.2, 0.25, 0.65, 1.7})
        CHECK(max_distance_km(-3.2, -0.2, alpha) * alpha == doctest::Approx(b).epsilon(1e-9));
}

TEST_CASE("distance solver domain errors") {
    CHECK_THROWS_AS(max_distance_km(-0.1, -0.2, 0.2), ModelError);
    CHECK_THROWS_AS(max_distance_km(-3.2, 0.2, 0.2), std::invalid_argument);
}

TEST_CASE("attenuation table lookup and IO") {
    const auto t = AttenuationTable::defaults();
    CHECK(t.alpha_at(1550.0) == doctest::Approx(0.20));
    CHECK(t.alpha_at(1440.0) == doctest::Approx(0.25));
    CHECK(t.alpha_at(1064.0) == doctest::Approx(0.65));
    CHECK_THROWS_AS(t.alpha_at(900.0), ModelError);

    std::stringstream ss("# comment\n1550 0.21\n1310 0.35\n");
    const auto loaded = AttenuationTable::load(ss);
    CHECK(loaded.alpha_at(1310.0) == doctest::Approx(0.35));

    std::stringstream dup("1550 0.2\n1550 0.3\n");
    CHECK_THROWS_AS(AttenuationTable::load(dup), ConfigError);
    std::stringstream neg("1550 -0.2\n");
    CHECK_THROWS_AS(AttenuationTable::load(neg), ConfigError);
}

TEST_CASE("fiber sweep endpoints") {
    const auto sweep = fiber_sweep(-3.2, 0.20, 60.0, 1.0);
    REQUIRE(sweep.size() == 61);
    CHECK(sweep.front().v_db == doctest::Approx(-3.2));
    CHECK(sweep.back().distance_km == doctest::Approx(60.0));
    // past the 53.2 km cutoff distance the correlation is above -0.2 dB
    CHECK(sweep[54].v_db > -0.2);
    CHECK(sweep[52].v_db < -0.2);
}
