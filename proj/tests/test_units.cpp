#include "doctest.h"

#include "caplb/units.hpp"

using caplb::UnitBridge;

TEST_CASE("lattice viscosity from physical parameters") {
    // nu = 1e-6 m^2/s, dx = 1e-3 m, dt = 1e-3 s -> nu~ = 1e-3
    UnitBridge b(1e-3, 1e-3, 1000.0);
    CHECK(b.lattice_viscosity(1e-3) == doctest::Approx(1e-3).epsilon(1e-12));
    CHECK_THROWS_AS(b.lattice_viscosity(0.0), std::invalid_argument);
    CHECK_THROWS_AS(b.lattice_viscosity(-1.0), std::invalid_argument);
}

TEST_CASE("relaxation time from lattice viscosity") {
    CHECK(UnitBridge::tau_from_nu(0.1) == doctest::Approx(0.8).epsilon(1e-14));
    CHECK(UnitBridge::tau_from_nu(1.0 / 30.0) == doctest::Approx(0.6).epsilon(1e-14));
    // zero-shear plateau target used for shear-thinning runs
    CHECK(UnitBridge::tau_from_nu(0.492 / 3.0) == doctest::Approx(0.992).epsilon(1e-14));
    CHECK_THROWS_AS(UnitBridge::tau_from_nu(0.0), std::invalid_argument);
}

TEST_CASE("dt solved so that the high-shear plateau lands on tau = 0.6") {
    // eta = 3.265 mPa s, rho = 1000, dx = 0.5 um; require nu~ = 1/30
    const UnitBridge b = UnitBridge::from_tau_target(0.5e-6, 3.265e-3, 0.6, 1000.0);
    CHECK(b.lattice_viscosity(3.265e-3) == doctest::Approx(1.0 / 30.0).epsilon(1e-12));
    CHECK(UnitBridge::tau_from_nu(b.lattice_viscosity(3.265e-3)) ==
          doctest::Approx(0.6).epsilon(1e-12));
}

TEST_CASE("tau(nu) is strictly increasing and round-trips") {
    double prev = 0.0;
    for (double nu : {1e-4, 1e-3, 1e-2, 0.1, 0.3, 1.0}) {
        const double tau = UnitBridge::tau_from_nu(nu);
        CHECK(tau > prev);
        prev = tau;
        CHECK(UnitBridge::nu_from_tau(tau) == doctest::Approx(nu).epsilon(1e-13));
    }
}

TEST_CASE("pressure to lattice density") {
    UnitBridge b(1e-6, 3e-8, 1000.0);
    SUBCASE("reference maps to density 1") {
        CHECK(b.pressure_to_lattice_density(40.0, 40.0) == doctest::Approx(1.0));
    }
    SUBCASE("perfusion-pressure offset, ideal-gas law") {
        // MAP 68.2, IOP 11.6 -> dp = 56.6 mmHg
        const double rho = b.pressure_to_lattice_density(68.2, 11.6);
        const double cs = b.sound_speed();
        CHECK(rho - 1.0 ==
              doctest::Approx(56.6 * caplb::kMmHgToPa / (1000.0 * cs * cs)).epsilon(1e-12));
    }
    SUBCASE("linear in the pressure offset") {
        const double d1 = b.pressure_to_lattice_density(20.0, 10.0) - 1.0;
        const double d2 = b.pressure_to_lattice_density(30.0, 10.0) - 1.0;
        CHECK(d2 == doctest::Approx(2.0 * d1).epsilon(1e-12));
    }
    SUBCASE("round-trips against the pressure offset") {
        const double rho = b.pressure_to_lattice_density(50.0, 10.0);
        CHECK(b.lattice_density_to_pressure_pa(rho) ==
              doctest::Approx(40.0 * caplb::kMmHgToPa).epsilon(1e-12));
    }
}

TEST_CASE("conversions round-trip to 1e-12") {
    UnitBridge b(0.731e-6, 4.2e-8, 1043.0);
    for (double v : {1e-4, 0.05, 3.0}) {
        CHECK(b.velocity_to_physical(b.velocity_to_lattice(v)) ==
              doctest::Approx(v).epsilon(1e-12));
    }
}

TEST_CASE("velocity Mach guard") {
    UnitBridge b(1e-6, 1e-6, 1000.0);   // velocity scale 1 m/s
    CHECK(b.checked_velocity_to_lattice(0.05) == doctest::Approx(0.05));
    CHECK_THROWS_AS(b.checked_velocity_to_lattice(0.2), std::invalid_argument);
}

TEST_CASE("construction requires positive scales") {
    CHECK_THROWS_AS(UnitBridge(0.0, 1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(UnitBridge(1.0, -1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(UnitBridge(1.0, 1.0, 0.0), std::invalid_argument);
}
