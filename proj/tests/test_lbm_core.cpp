#include "doctest.h"

#include <random>

#include "caplb/lbm.hpp"
#include "caplb/voxelizer.hpp"

using namespace caplb;

namespace {

Eigen::Vector3d moment1(const Eigen::Ref<const Eigen::ArrayXd>& f) {
    Eigen::Vector3d m = Eigen::Vector3d::Zero();
    for (int i = 0; i < D3Q15::Q; ++i) m += f(i) * D3Q15::dir(i);
    return m;
}

}  // namespace

TEST_CASE("velocity-set moment identities") {
    double w_sum = 0.0;
    Eigen::Vector3d c_sum = Eigen::Vector3d::Zero();
    Eigen::Matrix3d cc = Eigen::Matrix3d::Zero();
    for (int i = 0; i < D3Q15::Q; ++i) {
        w_sum += D3Q15::w[i];
        c_sum += D3Q15::w[i] * D3Q15::dir(i);
        cc += D3Q15::w[i] * D3Q15::dir(i) * D3Q15::dir(i).transpose();
    }
    CHECK(std::abs(w_sum - 1.0) < 1e-15);
    CHECK(c_sum.norm() < 1e-15);
    CHECK((cc - D3Q15::cs2 * Eigen::Matrix3d::Identity()).norm() < 1e-15);

    SUBCASE("opposite map really inverts directions") {
        for (int i = 0; i < D3Q15::Q; ++i)
            CHECK((D3Q15::dir(i) + D3Q15::dir(D3Q15::opposite[i])).norm() == 0.0);
    }
}

TEST_CASE("equilibrium distribution") {
    SUBCASE("rest state reduces to the weights") {
        const auto feq = equilibrium<double>(1.0, Eigen::Vector3d::Zero());
        for (int i = 0; i < D3Q15::Q; ++i) CHECK(feq(i) == D3Q15::w[i]);
    }
    SUBCASE("zeroth and first moments match rho and rho v to 1e-14") {
        std::mt19937 rng(3);
        std::uniform_real_distribution<double> u(-0.08, 0.08);
        for (int t = 0; t < 50; ++t) {
            const double rho = 0.9 + 0.2 * u(rng);
            const Eigen::Vector3d v(u(rng), u(rng), u(rng));
            const Eigen::Matrix<double, 15, 1> feq = equilibrium(rho, v);
            CHECK(std::abs(feq.sum() - rho) < 1e-14);
            CHECK((moment1(feq.array()) - rho * v).norm() < 1e-14);
        }
    }
    SUBCASE("drift skews the paired face populations") {
        const auto feq = equilibrium<double>(1.0, Eigen::Vector3d(0.05, 0, 0));
        CHECK(feq(1) > feq(2));   // +x vs -x
    }
}

TEST_CASE("collision") {
    LatticeState st(4);
    st.tau.setConstant(0.73);

    SUBCASE("equilibrium is a fixed point") {
        st.current().col(0) = equilibrium<double>(1.02, {0.03, -0.01, 0.02}).array();
        const Eigen::ArrayXd before = st.current().col(0);
        collide(st, Eigen::Vector3d::Zero(), false, nullptr, 1);
        CHECK((st.current().col(0) - before).abs().maxCoeff() < 1e-16);
    }
    SUBCASE("tau = 1 relaxes straight to equilibrium") {
        st.tau.setConstant(1.0);
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> u(0.01, 0.1);
        for (std::int64_t s = 0; s < st.size(); ++s)
            for (int i = 0; i < D3Q15::Q; ++i) st.current()(i, s) = u(rng);
        MacroFields macro;
        collide(st, Eigen::Vector3d::Zero(), false, &macro, 1);
        for (std::int64_t s = 0; s < st.size(); ++s) {
            const Eigen::Matrix<double, 15, 1> feq =
                equilibrium<double>(macro.rho(s), macro.v.col(s));
            CHECK((st.current().col(s).matrix() - feq).norm() < 1e-15);
        }
    }
    SUBCASE("mass and momentum conserved to 1e-13 for random populations") {
        std::mt19937 rng(5);
        std::uniform_real_distribution<double> u(0.005, 0.12);
        for (std::int64_t s = 0; s < st.size(); ++s)
            for (int i = 0; i < D3Q15::Q; ++i) st.current()(i, s) = u(rng);
        const Eigen::ArrayXXd before = st.current();
        collide(st, Eigen::Vector3d::Zero(), true, nullptr, 1);
        for (std::int64_t s = 0; s < st.size(); ++s) {
            CHECK(std::abs(st.current().col(s).sum() - before.col(s).sum()) < 1e-13);
            CHECK((moment1(st.current().col(s)) - moment1(before.col(s))).norm() < 1e-13);
        }
    }
}

TEST_CASE("streaming") {
    SUBCASE("a single perturbed population translates by c_i each step") {
        VoxelDomain box = make_box_domain(8, 8, 8, true);
        const auto nbr = box.build_neighbor_table();
        LatticeState st(box.fluid_count());
        st.initialize_rest(1.0);
        const int dir = 7;   // corner vector (1,1,1)
        const std::int64_t start = box.fluid_of_cell[box.cell_index(2, 3, 4)];
        st.current()(dir, start) += 0.01;
        for (int steps = 1; steps <= 3; ++steps) {
            stream(st, nbr, 1);
            st.swap_buffers();
            const std::int64_t expect =
                box.fluid_of_cell[box.cell_index(2 + steps, 3 + steps, 4 + steps)];
            CHECK(st.current()(dir, expect) == doctest::Approx(D3Q15::w[dir] + 0.01));
        }
    }
    SUBCASE("streaming the direction-reversed field undoes a stream") {
        VoxelDomain box = make_box_domain(6, 5, 4, true);
        const auto nbr = box.build_neighbor_table();
        LatticeState st(box.fluid_count());
        std::mt19937 rng(17);
        std::uniform_real_distribution<double> u(0.01, 0.2);
        for (std::int64_t s = 0; s < st.size(); ++s)
            for (int i = 0; i < D3Q15::Q; ++i) st.current()(i, s) = u(rng);
        const Eigen::ArrayXXd original = st.current();

        auto reverse_pairs = [&](Eigen::ArrayXXd& f) {
            for (int i = 0; i < D3Q15::Q; ++i) {
                const int o = D3Q15::opposite[i];
                if (o > i) f.row(i).swap(f.row(o));
            }
        };
        stream(st, nbr, 1);
        st.swap_buffers();
        reverse_pairs(st.current());
        stream(st, nbr, 1);
        st.swap_buffers();
        reverse_pairs(st.current());
        CHECK((st.current() == original).all());
    }
    SUBCASE("one full step at uniform equilibrium is the identity") {
        VoxelDomain box = make_box_domain(5, 6, 7, true);
        const auto nbr = box.build_neighbor_table();
        LatticeState st(box.fluid_count());
        st.initialize_rest(1.0);
        st.tau.setConstant(0.8);
        const Eigen::ArrayXXd before = st.current();
        collide(st, Eigen::Vector3d::Zero(), false, nullptr, 1);
        stream(st, nbr, 1);
        st.swap_buffers();
        CHECK((st.current() - before).abs().maxCoeff() < 1e-14);
    }
}

TEST_CASE("macroscopic moments") {
    SUBCASE("weights give rho 1 at rest") {
        Eigen::ArrayXXd f(D3Q15::Q, 1);
        for (int i = 0; i < D3Q15::Q; ++i) f(i, 0) = D3Q15::w[i];
        MacroFields m;
        compute_macroscopics(f, Eigen::Vector3d::Zero(), m, 1);
        CHECK(m.rho(0) == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(m.v.col(0).norm() < 1e-15);
    }
    SUBCASE("recovers the equilibrium arguments exactly") {
        Eigen::ArrayXXd f(D3Q15::Q, 2);
        f.col(0) = equilibrium<double>(1.05, {0.02, 0.0, -0.01}).array();
        f.col(1) = equilibrium<double>(0.97, {-0.01, 0.04, 0.0}).array();
        MacroFields m;
        compute_macroscopics(f, Eigen::Vector3d::Zero(), m, 1);
        CHECK(m.rho(0) == doctest::Approx(1.05).epsilon(1e-14));
        CHECK((m.v.col(0) - Eigen::Vector3d(0.02, 0.0, -0.01)).norm() < 1e-14);
        CHECK(m.rho(1) == doctest::Approx(0.97).epsilon(1e-14));
        CHECK((m.v.col(1) - Eigen::Vector3d(-0.01, 0.04, 0.0)).norm() < 1e-14);
    }
    SUBCASE("non-positive density raises an instability error") {
        Eigen::ArrayXXd f = Eigen::ArrayXXd::Zero(D3Q15::Q, 1);
        MacroFields m;
        CHECK_THROWS_AS(compute_macroscopics(f, Eigen::Vector3d::Zero(), m, 1, 42),
                        InstabilityError);
    }
}

TEST_CASE("strain rate from the non-equilibrium second moment") {
    SUBCASE("equilibrium field has zero S and shear rate") {
        Eigen::ArrayXXd f(D3Q15::Q, 1);
        f.col(0) = equilibrium<double>(1.0, {0.03, 0.02, -0.04}).array();
        Eigen::ArrayXd tau(1);
        tau(0) = 0.8;
        MacroFields m;
        compute_shear(f, tau, Eigen::Vector3d::Zero(), m, 1);
        CHECK(m.S.col(0).norm() < 1e-15);
        CHECK(m.gamma_dot(0) < 1e-15);
    }
    SUBCASE("reconstructs a seeded strain tensor and is rotation invariant") {
        // Chapman-Enskog ansatz: f_neq = -w tau rho / cs2 (c S c - cs2 tr S)
        const double tau = 0.85, rho = 1.0;
        auto seed_field = [&](const Eigen::Matrix3d& S) {
            Eigen::ArrayXXd f(D3Q15::Q, 1);
            f.col(0) = equilibrium<double>(rho, Eigen::Vector3d::Zero()).array();
            for (int i = 0; i < D3Q15::Q; ++i) {
                const Eigen::Vector3d c = D3Q15::dir(i);
                const double csc = c.dot(S * c) - D3Q15::cs2 * S.trace();
                f(i, 0) += -D3Q15::w[i] * tau * rho / D3Q15::cs2 * csc;
            }
            return f;
        };
        Eigen::Matrix3d S0;
        S0 << 2e-5, 1e-5, -3e-6, 1e-5, -1e-5, 4e-6, -3e-6, 4e-6, -1e-5;   // traceless
        Eigen::ArrayXd tau_field(1);
        tau_field(0) = tau;

        MacroFields m;
        compute_shear(seed_field(S0), tau_field, Eigen::Vector3d::Zero(), m, 1);
        CHECK((sym3_to_matrix(m.S.col(0)) - S0).norm() < 1e-12);
        const double gamma0 = m.gamma_dot(0);
        CHECK(gamma0 == doctest::Approx(std::sqrt(2.0 * (S0 * S0).trace())).epsilon(1e-12));

        std::mt19937 rng(23);
        std::normal_distribution<double> g(0.0, 1.0);
        for (int t = 0; t < 10; ++t) {
            Eigen::Matrix3d a;
            for (int r = 0; r < 3; ++r)
                for (int c = 0; c < 3; ++c) a(r, c) = g(rng);
            const Eigen::Matrix3d q =
                Eigen::HouseholderQR<Eigen::Matrix3d>(a).householderQ();
            const Eigen::Matrix3d srot = q * S0 * q.transpose();
            compute_shear(seed_field(srot), tau_field, Eigen::Vector3d::Zero(), m, 1);
            CHECK(m.gamma_dot(0) == doctest::Approx(gamma0).epsilon(1e-10));
        }
    }
}

TEST_CASE("shear-wave decay rate measures the lattice viscosity within 1%") {
    const int n = 32;
    const double tau = 0.8;
    const double nu = D3Q15::cs2 * (tau - 0.5);
    VoxelDomain box = make_box_domain(n, 4, 4, true);
    const auto nbr = box.build_neighbor_table();
    LatticeState st(box.fluid_count());
    st.tau.setConstant(tau);

    const double k = 2.0 * std::numbers::pi / n;
    const double u0 = 1e-6;
    for (std::int64_t f = 0; f < box.fluid_count(); ++f) {
        const double x = double(box.site_lattice_coords(f).x());
        st.current().col(f) =
            equilibrium<double>(1.0, {0.0, u0 * std::sin(k * x), 0.0}).array();
    }

    auto amplitude = [&]() {
        MacroFields m;
        compute_macroscopics(st.current(), Eigen::Vector3d::Zero(), m, 1);
        double acc = 0.0;
        for (std::int64_t f = 0; f < box.fluid_count(); ++f) {
            const double x = double(box.site_lattice_coords(f).x());
            acc += m.v(1, f) * std::sin(k * x);
        }
        return 2.0 * acc / double(box.fluid_count());
    };

    auto advance = [&](int steps) {
        for (int t = 0; t < steps; ++t) {
            collide(st, Eigen::Vector3d::Zero(), false, nullptr, 1);
            stream(st, nbr, 1);
            st.swap_buffers();
        }
    };

    advance(50);   // settle the initialization transient
    const double a1 = amplitude();
    advance(200);
    const double a2 = amplitude();
    const double nu_measured = -std::log(a2 / a1) / (200.0 * k * k);
    CHECK(nu_measured == doctest::Approx(nu).epsilon(0.01));
}

TEST_CASE("kernels are bitwise deterministic across worker counts") {
    VoxelDomain box = make_box_domain(12, 11, 10, true);
    const auto nbr = box.build_neighbor_table();

    auto run = [&](int threads) {
        LatticeState st(box.fluid_count());
        std::mt19937 rng(99);
        std::uniform_real_distribution<double> u(0.01, 0.2);
        for (std::int64_t s = 0; s < st.size(); ++s)
            for (int i = 0; i < D3Q15::Q; ++i) st.current()(i, s) = u(rng);
        st.tau.setConstant(0.77);
        for (int t = 0; t < 10; ++t) {
            collide(st, Eigen::Vector3d::Zero(), true, nullptr, threads);
            stream(st, nbr, threads);
            st.swap_buffers();
        }
        return Eigen::ArrayXXd(st.current());
    };

    const Eigen::ArrayXXd f1 = run(1);
    const Eigen::ArrayXXd f2 = run(2);
    const Eigen::ArrayXXd f8 = run(8);
    CHECK((f1 == f2).all());
    CHECK((f1 == f8).all());
}
