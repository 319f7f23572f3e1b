#include "doctest.h"

#include <fstream>
#include <random>

#include "caplb/benchmark.hpp"
#include "caplb/network_gen.hpp"
#include "caplb/voxelizer.hpp"

using namespace caplb;

TEST_CASE("analytic Hagen-Poiseuille flow rate") {
    CHECK(analytic_flow_rate(0.01, 10.0) ==
          doctest::Approx(0.01 * std::numbers::pi * 100.0 / 8.0).epsilon(1e-14));
    CHECK(analytic_flow_rate(0.01, 20.0) ==
          doctest::Approx(4.0 * analytic_flow_rate(0.01, 10.0)).epsilon(1e-14));
    CHECK(analytic_flow_rate(0.0, 10.0) == 0.0);
    CHECK(analytic_flow_rate(-0.01, 10.0) == analytic_flow_rate(0.01, 10.0));
}

TEST_CASE("rotated frame") {
    const Eigen::Vector3d axis = benchmark_axis();
    CHECK(std::abs(axis.norm() - 1.0) < 1e-3);   // quoted to three decimals
    const auto frame = RotatedFrame<double>::from_axis(axis);

    SUBCASE("columns orthonormal to 1e-12") {
        CHECK((frame.Q * frame.Q.transpose() - Eigen::Matrix3d::Identity()).norm() < 1e-12);
        CHECK(frame.Q.determinant() == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("third column is the axis") {
        CHECK((frame.Q.col(2) - axis.normalized()).norm() < 1e-12);
    }
    SUBCASE("axis parallel to e3 is degenerate") {
        CHECK_THROWS_AS(RotatedFrame<double>::from_axis(Eigen::Vector3d(0, 0, 1)),
                        std::invalid_argument);
    }
}

TEST_CASE("analytic stress tensor") {
    const double v_max = 0.01, eta = 0.1, R = 5.0;

    SUBCASE("canonical frame at (R, 0, 0): the 13/31 pair only") {
        const Eigen::Matrix3d t =
            poiseuille_stress_canonical<double>(v_max, eta, R, {R, 0.0, 0.0});
        const double expect = -2.0 * v_max * eta / R;
        CHECK(t(0, 2) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(t(2, 0) == doctest::Approx(expect).epsilon(1e-14));
        CHECK(std::abs(t(0, 0)) + std::abs(t(1, 1)) + std::abs(t(2, 2)) +
                  std::abs(t(0, 1)) + std::abs(t(1, 2)) ==
              0.0);
    }
    SUBCASE("zero on the axis") {
        const Eigen::Vector3d axis = benchmark_axis();
        const Eigen::Matrix3d t =
            poiseuille_stress<double>(axis, v_max, eta, R, 2.0 * axis);
        CHECK(t.norm() < 1e-15);
    }
    SUBCASE("rotation identity: T*(Q x) = Q T'(x) Q^T to 1e-12") {
        const Eigen::Vector3d axis = benchmark_axis().normalized();
        const auto frame = RotatedFrame<double>::from_axis(axis);
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(-1.0, 1.0);
        for (int t = 0; t < 20; ++t) {
            const Eigen::Vector3d pc(0.7 * R * u(rng), 0.7 * R * u(rng), 3.0 * u(rng));
            const Eigen::Matrix3d lhs =
                poiseuille_stress<double>(axis, v_max, eta, R, frame.Q * pc);
            const Eigen::Matrix3d rhs =
                frame.rotate_tensor(poiseuille_stress_canonical<double>(v_max, eta, R, pc));
            CHECK((lhs - rhs).norm() < 1e-12);
        }
    }
    SUBCASE("points outside the lumen are rejected") {
        const Eigen::Vector3d axis = benchmark_axis();
        const auto frame = RotatedFrame<double>::from_axis(axis.normalized());
        const Eigen::Vector3d outside = frame.Q * Eigen::Vector3d(1.2 * R, 0.0, 0.0);
        CHECK_THROWS_AS(poiseuille_stress<double>(axis, v_max, eta, R, outside),
                        std::invalid_argument);
    }
}

TEST_CASE("error metrics") {
    SUBCASE("flow-rate error") {
        CHECK(flow_rate_error(1.0, 1.0) == 0.0);
        CHECK(flow_rate_error(0.97, 1.0) == doctest::Approx(0.03).epsilon(1e-12));
        CHECK_THROWS_AS(flow_rate_error(1.0, 0.0), std::invalid_argument);
    }
    SUBCASE("stress error is rotation sensitive and scale invariant") {
        Eigen::Matrix3d t = Eigen::Matrix3d::Zero();
        t(0, 2) = t(2, 0) = -0.4;
        t(1, 2) = t(2, 1) = 0.3;
        CHECK(stress_error<double>(t, t) == 0.0);

        Eigen::Matrix3d flipped = t;
        flipped(0, 2) = -t(0, 2);
        flipped(2, 0) = -t(2, 0);
        CHECK(stress_error<double>(flipped, t) > 0.5);   // same magnitudes, wrong rotation

        const Eigen::Matrix3d sim = 0.9 * t;
        CHECK(stress_error<double>(3.0 * sim, 3.0 * t) ==
              doctest::Approx(stress_error<double>(sim, t)).epsilon(1e-12));
    }
}

TEST_CASE("grid refinement error metric") {
    VoxelDomain box = make_box_domain(6, 6, 3, false);
    // shift coords so the z = 0 plane exists
    box.offset = {0, 0, -1};
    MacroFields a, b;
    a.resize(box.fluid_count());
    b.resize(box.fluid_count());
    const UnitBridge bridge(1e-6, 1e-6, 1000.0);
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-0.01, 0.01);
    for (std::int64_t f = 0; f < box.fluid_count(); ++f)
        for (int k = 0; k < 3; ++k) a.v(k, f) = u(rng);

    SUBCASE("identical fields at identical resolution give zero") {
        b.v = a.v;
        CHECK(grid_refinement_error(a, box, bridge, b, box, bridge, false) == 0.0);
    }
    SUBCASE("uniform offset in one component gives |delta| / max speed") {
        const double delta = 3e-3;
        b.v = a.v;
        b.v.row(0).array() += delta;
        double vmax = 0.0;
        for (std::int64_t f = 0; f < box.fluid_count(); ++f)
            vmax = std::max(vmax, a.v.col(f).norm());
        CHECK(grid_refinement_error(b, box, bridge, a, box, bridge, false) ==
              doctest::Approx(delta / vmax).epsilon(1e-12));
    }
}

TEST_CASE("mini-plexus generator produces a usable network") {
    const VesselSkeleton plexus = make_mini_plexus();
    CHECK(plexus.edges.size() >= 180);
    CHECK(plexus.edges.size() <= 260);
    CHECK(plexus.iolets.size() == 2);
    CHECK_NOTHROW(plexus.validate());

    // terminal segments are axis-aligned so the openings are lattice planes
    for (const auto& io : plexus.iolets) {
        int nbr = -1;
        for (const auto& [a, b] : plexus.edges) {
            if (a == io.node) nbr = b;
            if (b == io.node) nbr = a;
        }
        const Eigen::Vector3d dir = (plexus.nodes[plexus.node_index(io.node)].pos_um -
                                     plexus.nodes[plexus.node_index(nbr)].pos_um)
                                        .normalized();
        CHECK(std::abs(std::abs(dir.x()) - 1.0) < 1e-12);
    }
}

TEST_CASE("inclined-cylinder benchmark at D = 5 meets the headline bounds") {
    BenchmarkOptions opt;
    opt.threads = 2;
    const BenchmarkRow row = run_cylinder_benchmark(5.0, 0.8, opt);
    REQUIRE(row.error.empty());
    REQUIRE(row.status == RunStatus::Converged);
    CHECK(row.eps_q < 0.03);
    REQUIRE(row.stress_bins.size() == 4);
    for (const auto& bin : row.stress_bins) CHECK(bin.sites > 0);
    CHECK(row.eps_t_wall <= 0.22);

    SUBCASE("CSV output is deterministic") {
        write_benchmark_csv("bench_a.csv", {row}, false);
        const BenchmarkRow again = run_cylinder_benchmark(5.0, 0.8, opt);
        write_benchmark_csv("bench_b.csv", {again}, false);
        std::ifstream fa("bench_a.csv"), fb("bench_b.csv");
        const std::string sa((std::istreambuf_iterator<char>(fa)),
                             std::istreambuf_iterator<char>());
        const std::string sb((std::istreambuf_iterator<char>(fb)),
                             std::istreambuf_iterator<char>());
        CHECK(sa == sb);
        CHECK(sa.find("D,tau,eps_q,eps_T_wall") == 0);
        std::remove("bench_a.csv");
        std::remove("bench_b.csv");
    }
}
