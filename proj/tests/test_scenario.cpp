// Copyright helmtrace contributors.
// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>

#include "helmtrace/scenario.hpp"

using namespace helmtrace;

TEST_SUITE("scenario") {

TEST_CASE("wavenumbers derive from permittivities: k = omega sqrt(eps)") {
    Scenario s = load_scenario_text("omega = 1\nepsilons = 1,64,256\ngeometry = three_subdomain\n");
    CHECK(s.k(0) == doctest::Approx(1.0));
    CHECK(s.k(1) == doctest::Approx(8.0));
    CHECK(s.k(2) == doctest::Approx(16.0));
}

TEST_CASE("eta defaults to k0") {
    Scenario s = load_scenario_text("omega = 2\nepsilons = 1,4\ngeometry = single_disk\n");
    CHECK(s.k(0) == doctest::Approx(2.0));
    CHECK(s.eta == doctest::Approx(2.0));
    Scenario t = load_scenario_text("omega = 2\nepsilons = 1,4\ngeometry = single_disk\neta = 5\n");
    CHECK(t.eta == doctest::Approx(5.0));
}

TEST_CASE("GSqR shift rule sigma_j = k_j^(1/3)") {
    Scenario s =
        load_scenario_text("omega = 4\nepsilons = 1,4,16\ngeometry = three_subdomain\n");
    // k2 = 4*sqrt(16) = 16, sigma2 = 16^(1/3)
    CHECK(s.sigma_gsqr(2) == doctest::Approx(std::cbrt(16.0)).epsilon(1e-14));
}

TEST_CASE("defaults reproduce the reference parameter set") {
    Scenario s = load_scenario_text("omega = 1\nepsilons = 1,64,256\ngeometry = three_subdomain\n");
    CHECK(s.gmres_tol == doctest::Approx(1e-4));
    CHECK(s.farfield_directions == 1024);
    CHECK(s.sigmoid_degree == 3);
    CHECK(s.sigma_dtnr == doctest::Approx(0.1));
    CHECK(s.incident_direction.x == doctest::Approx(1.0));
    CHECK(s.incident_direction.y == doctest::Approx(0.0));
}

TEST_CASE("validation errors name the offending field") {
    CHECK_THROWS_WITH_AS(
        (void)load_scenario_text("omega = 1\nepsilons = 1,-2\ngeometry = single_disk\n"),
        doctest::Contains("epsilons[1]"), ConfigError);
    CHECK_THROWS_WITH_AS((void)load_scenario_text("omega = 1\ngeometry = hexagon\n"),
                         doctest::Contains("geometry"), ConfigError);
    CHECK_THROWS_WITH_AS((void)load_scenario_text("omega = 1\nbogus_key = 2\n"),
                         doctest::Contains("bogus_key"), ConfigError);
    CHECK_THROWS_AS((void)load_scenario_text("omega = 1\nepsilons = 1,4\ngeometry = "
                                             "single_disk\nn = 63\n"),
                    ConfigError);
}

TEST_CASE("save/load round-trips bit-identically") {
    Scenario s = load_scenario_text(
        "omega = 0.3141592653589793\nepsilons = 1,4.700001,16\ngeometry = three_subdomain\n"
        "n = 48\ngmres_tol = 3.3e-5\n");
    const std::string text = save_scenario_text(s);
    Scenario t = load_scenario_text(text);
    CHECK(save_scenario_text(t) == text);
    CHECK(t.omega == s.omega);
    CHECK(t.media[1].wavenumber == s.media[1].wavenumber);
    CHECK(t.gmres_tol == s.gmres_tol);
}

TEST_CASE("plane wave basics") {
    Scenario s = load_scenario_text("omega = 2\nepsilons = 1,4\ngeometry = single_disk\n");
    CHECK(std::abs(plane_wave_value(s, {0.0, 0.0}) - 1.0) < 1e-15);
    const auto [gx, gy] = plane_wave_gradient(s, {0.0, 0.0});
    CHECK(std::abs(gx - iu * 2.0) < 1e-15); // d=(1,0): normal derivative i k0
    CHECK(std::abs(gy) < 1e-15);
    // unit modulus everywhere for real k0
    for (double t = 0.0; t < 6.0; t += 0.7)
        CHECK(std::abs(std::abs(plane_wave_value(s, {std::cos(t), std::sin(t)})) - 1.0) < 1e-14);
}

} // TEST_SUITE
