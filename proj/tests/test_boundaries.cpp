#include "doctest.h"

#include <random>

#include "caplb/boundaries.hpp"
#include "caplb/simulation.hpp"
#include "caplb/voxelizer.hpp"

#include "test_support.hpp"

using namespace caplb;

using caplb::testing::make_channel;
using caplb::testing::step_once;

TEST_CASE("interpolated bounce-back coefficient algebra") {
    VoxelDomain d = make_closed_box_domain(3, 3, 3);
    // pick one +x wall link of the center-ish site and tune q by hand
    std::size_t pick = 0;
    for (std::size_t k = 0; k < d.wall_links.size(); ++k) {
        if (int(d.wall_links[k].dir) == 1) {
            pick = k;
            break;
        }
    }
    const auto nbr = d.build_neighbor_table();
    const std::int64_t site = d.wall_links[pick].site;
    const int dir = d.wall_links[pick].dir;
    const int opp = D3Q15::opposite[dir];

    auto apply_with_q = [&](double q, double f_out, double f_in, double f_up) {
        d.wall_links[pick].q = q;
        const BoundarySet bset = BoundarySet::build(d, nbr, {});
        LatticeState st(d.fluid_count());
        st.initialize_rest(1.0);
        st.current()(dir, site) = f_out;
        st.current()(opp, site) = f_in;
        const std::int64_t up = nbr[site * D3Q15::Q + opp];
        if (up >= 0) st.current()(dir, up) = f_up;
        st.next().setConstant(-1.0);
        bset.apply(st, Eigen::Matrix3Xd::Zero(3, d.fluid_count()), 1);
        return st.next()(opp, site);
    };

    SUBCASE("q = 1/2 reduces to plain bounce-back") {
        CHECK(apply_with_q(0.5, 0.37, 0.11, 0.29) == 0.37);
    }
    SUBCASE("q = 1 mixes the outgoing and incoming post-collision values") {
        CHECK(apply_with_q(1.0, 0.1, 0.3, 0.0) == doctest::Approx(0.2).epsilon(1e-15));
    }
    SUBCASE("q < 1/2 interpolates toward the upstream neighbour") {
        const double got = apply_with_q(0.25, 0.2, 0.0, 0.6);
        CHECK(got == doctest::Approx(0.5 * 0.2 + 0.5 * 0.6).epsilon(1e-15));
    }
}

TEST_CASE("all q = 1/2 walls are bitwise identical to simple bounce-back") {
    VoxelDomain d = make_closed_box_domain(6, 5, 7);
    const auto nbr = d.build_neighbor_table();
    const BoundarySet bset = BoundarySet::build(d, nbr, {});

    LatticeState a(d.fluid_count()), b(d.fluid_count());
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(0.01, 0.2);
    for (std::int64_t s = 0; s < a.size(); ++s)
        for (int i = 0; i < D3Q15::Q; ++i) {
            const double val = u(rng);
            a.current()(i, s) = val;
            b.current()(i, s) = val;
        }
    a.tau.setConstant(0.8);
    b.tau.setConstant(0.8);

    MacroFields macro;
    for (int t = 0; t < 5; ++t) {
        step_once(a, nbr, bset, Eigen::Vector3d::Zero(), macro);

        // reference: plain bounce-back applied by hand
        collide(b, Eigen::Vector3d::Zero(), false, nullptr, 1);
        stream(b, nbr, 1);
        for (const auto& wl : d.wall_links)
            b.next()(D3Q15::opposite[wl.dir], wl.site) = b.current()(wl.dir, wl.site);
        b.swap_buffers();

        CHECK((a.current() == b.current()).all());
    }
}

TEST_CASE("closed box conserves mass to 1e-12 over 1000 steps") {
    VoxelDomain d = make_closed_box_domain(8, 8, 8);
    const auto nbr = d.build_neighbor_table();
    const BoundarySet bset = BoundarySet::build(d, nbr, {});
    LatticeState st(d.fluid_count());
    st.tau.setConstant(0.8);
    for (std::int64_t f = 0; f < d.fluid_count(); ++f) {
        const Eigen::Vector3i g = d.site_lattice_coords(f);
        const double bump = 0.02 * std::sin(0.9 * g.x()) * std::cos(1.3 * g.y() + 0.4 * g.z());
        st.current().col(f) = equilibrium<double>(1.0 + bump, Eigen::Vector3d::Zero()).array();
    }
    const double mass0 = st.current().sum();
    MacroFields macro;
    for (int t = 0; t < 1000; ++t) step_once(st, nbr, bset, Eigen::Vector3d::Zero(), macro);
    CHECK(std::abs(st.current().sum() - mass0) / mass0 < 1e-12);
}

TEST_CASE("force-driven Poiseuille at the parabola-exact relaxation time") {
    // bounce-back closure is exact for this flow when (tau - 1/2)^2 = 3/16
    const int height = 11, n = 4;
    const double tau = 0.5 + std::sqrt(3.0) / 4.0;
    const double nu = D3Q15::cs2 * (tau - 0.5);
    const double g = 1e-8;
    VoxelDomain d = make_channel(n, height, false);
    const auto nbr = d.build_neighbor_table();
    const BoundarySet bset = BoundarySet::build(d, nbr, {});
    LatticeState st(d.fluid_count());
    st.initialize_rest(1.0);
    st.tau.setConstant(tau);
    const Eigen::Vector3d accel(g, 0, 0);

    MacroFields macro;
    for (int t = 0; t < 20000; ++t) step_once(st, nbr, bset, accel, macro);

    compute_shear(st.current(), st.tau, accel, macro, 1);
    const double zc = 0.5 * (height - 1);
    double max_rel = 0.0, umax = 0.0;
    for (std::int64_t f = 0; f < d.fluid_count(); ++f) {
        const double z = d.cell_coords(d.cell_of_fluid[f]).z() - zc;
        const double analytic = g / (2.0 * nu) * (0.25 * height * height - z * z);
        umax = std::max(umax, analytic);
        max_rel = std::max(max_rel, std::abs(macro.v(0, f) - analytic));
    }
    CHECK(max_rel / umax < 1e-8);

    SUBCASE("strain rate S_13 matches the parabola slope within 2%") {
        for (std::int64_t f = 0; f < d.fluid_count(); ++f) {
            const double z = d.cell_coords(d.cell_of_fluid[f]).z() - zc;
            const double analytic = -0.5 * g * z / nu;   // d(u_x)/dz / 2
            if (std::abs(analytic) < 0.3 * g * zc / nu) continue;
            CHECK(macro.S(4, f) == doctest::Approx(analytic).epsilon(0.02));
        }
    }
}

TEST_CASE("velocity opening drives an exact Couette profile") {
    const int height = 9, n = 4;
    const double wall_speed = 1e-3;
    VoxelDomain d = make_channel(n, height, true);
    const auto nbr = d.build_neighbor_table();

    std::vector<IoletBC> bcs(1);
    bcs[0].is_velocity = true;
    bcs[0].velocity_lat = [&](const Eigen::Vector3d&) {
        return Eigen::Vector3d(wall_speed, 0.0, 0.0);
    };
    const BoundarySet bset = BoundarySet::build(d, nbr, bcs);

    LatticeState st(d.fluid_count());
    st.initialize_rest(1.0);
    st.tau.setConstant(0.8);
    MacroFields macro;
    for (int t = 0; t < 20000; ++t)
        step_once(st, nbr, bset, Eigen::Vector3d::Zero(), macro);

    compute_macroscopics(st.current(), Eigen::Vector3d::Zero(), macro, 1);
    for (std::int64_t f = 0; f < d.fluid_count(); ++f) {
        const int z = d.cell_coords(d.cell_of_fluid[f]).z();
        const double analytic = wall_speed * (z + 0.5) / height;
        CHECK(std::abs(macro.v(0, f) - analytic) / wall_speed < 1e-8);
    }

    SUBCASE("zero prescribed velocity reduces to plain bounce-back") {
        std::vector<IoletBC> rest(1);
        rest[0].is_velocity = true;
        rest[0].velocity_lat = [](const Eigen::Vector3d&) {
            return Eigen::Vector3d::Zero();
        };
        const BoundarySet quiet = BoundarySet::build(d, nbr, rest);
        LatticeState s2(d.fluid_count());
        s2.initialize_rest(1.0);
        s2.tau.setConstant(0.8);
        MacroFields m2;
        for (int t = 0; t < 50; ++t) step_once(s2, nbr, quiet, Eigen::Vector3d::Zero(), m2);
        CHECK((s2.current().col(0).matrix() -
               equilibrium<double>(1.0, Eigen::Vector3d::Zero()))
                  .norm() < 1e-15);
    }
}

TEST_CASE("velocity opening enforces the compressibility guard") {
    VoxelDomain d = make_channel(3, 5, true);
    const auto nbr = d.build_neighbor_table();
    std::vector<IoletBC> bcs(1);
    bcs[0].is_velocity = true;
    bcs[0].velocity_lat = [](const Eigen::Vector3d&) {
        return Eigen::Vector3d(0.2, 0.0, 0.0);
    };
    CHECK_THROWS_AS(BoundarySet::build(d, nbr, bcs), std::invalid_argument);
}

TEST_CASE("pressure opening holds a uniform fluid at rest, bitwise") {
    const VesselSkeleton skel = [] {
        VesselSkeleton s;
        s.nodes.push_back({0, {0.2, 0.4, -12}, 4.0});
        s.nodes.push_back({1, {0.2, 0.4, 12}, 4.0});
        s.edges.emplace_back(0, 1);
        s.iolets.push_back({1, IoletKind::Inlet, 20.0});
        s.iolets.push_back({0, IoletKind::Outlet, 20.0});
        return s;
    }();
    const VoxelDomain d = voxelize(skel, 1.0);
    const auto nbr = d.build_neighbor_table();
    std::vector<IoletBC> bcs(2);
    bcs[0].rho_target = 1.02;
    bcs[1].rho_target = 1.02;
    const BoundarySet bset = BoundarySet::build(d, nbr, bcs);

    LatticeState st(d.fluid_count());
    st.initialize_rest(1.02);
    st.tau.setConstant(0.8);
    MacroFields macro;
    for (int t = 0; t < 10; ++t) step_once(st, nbr, bset, Eigen::Vector3d::Zero(), macro);
    for (int i = 0; i < D3Q15::Q; ++i)
        CHECK((st.current().row(i) - 1.02 * D3Q15::w[i]).abs().maxCoeff() < 1e-14);
}

TEST_CASE("pressure-driven straight tube") {
    VesselSkeleton skel;
    skel.nodes.push_back({0, {0.2, 0.4, -20}, 5.0});
    skel.nodes.push_back({1, {0.2, 0.4, 20}, 5.0});
    skel.edges.emplace_back(0, 1);
    skel.iolets.push_back({1, IoletKind::Inlet, 0.0});
    skel.iolets.push_back({0, IoletKind::Outlet, 0.0});
    const VoxelDomain d = voxelize(skel, 1.0);

    const double delta = 1e-3;   // inlet density 1 + delta at the +z end
    auto run_with = [&](double rho_in, double rho_out) {
        SimulationSetup setup;
        setup.domain = &d;
        setup.rheology = RheologyModel::newtonian(3.265e-3, 0.8);
        setup.bridge = setup.rheology.make_bridge(1e-6);
        setup.iolet_bcs.resize(2);
        setup.iolet_bcs[0].rho_target = rho_in;    // iolet 0 is the +z inlet
        setup.iolet_bcs[1].rho_target = rho_out;
        setup.threads = 2;
        return run_steady(setup);
    };

    const SteadyRunResult fwd = run_with(1.0 + delta, 1.0);
    REQUIRE(fwd.report.status == RunStatus::Converged);

    SUBCASE("flow runs toward the low-pressure end and matches Poiseuille within 5%") {
        const FlowRate q = flow_rate(fwd.fields, d, UnitBridge(1e-6, 1e-6), 2, 0);
        CHECK(q.lattice < 0.0);   // high pressure at +z pushes toward -z
        const double dp = delta * D3Q15::cs2;
        const double eta_lat = UnitBridge::nu_from_tau(0.8);   // rho0 = 1
        const double q_star = std::numbers::pi * std::pow(5.0, 4) * dp / (8.0 * eta_lat * 40.0);
        CHECK(std::abs(q.lattice) == doctest::Approx(q_star).epsilon(0.05));
    }

    SUBCASE("reversing the pressures negates the velocity field") {
        const SteadyRunResult rev = run_with(1.0, 1.0 + delta);
        REQUIRE(rev.report.status == RunStatus::Converged);
        double peak = 0.0, mismatch = 0.0;
        for (std::int64_t f = 0; f < d.fluid_count(); ++f) {
            peak = std::max(peak, fwd.fields.v.col(f).norm());
            mismatch =
                std::max(mismatch, (fwd.fields.v.col(f) + rev.fields.v.col(f)).norm());
        }
        CHECK(mismatch < 1e-2 * peak);
    }
}

TEST_CASE("wall links with a solid upstream neighbour fall back to bounce-back") {
    // D = 3 dx tube: thin enough that some q < 1/2 links lack a fluid upstream
    VesselSkeleton skel;
    skel.nodes.push_back({0, {0.2, 0.4, -6}, 1.5});
    skel.nodes.push_back({1, {0.2, 0.4, 6}, 1.5});
    skel.edges.emplace_back(0, 1);
    skel.iolets.push_back({1, IoletKind::Inlet, 0.0});
    skel.iolets.push_back({0, IoletKind::Outlet, 0.0});
    const VoxelDomain d = voxelize(skel, 1.0);
    const auto nbr = d.build_neighbor_table();
    const BoundarySet bset = BoundarySet::build(d, nbr, std::vector<IoletBC>(2));
    CHECK(bset.fallback_links() > 0);
    CHECK(bset.fallback_links() < bset.wall_link_count());
}
