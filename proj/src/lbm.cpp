#include "caplb/lbm.hpp"

#include <atomic>

#include "caplb/parallel.hpp"

namespace caplb {

TauLaw TauLaw::from_model(const RheologyModel& model, const UnitBridge& bridge) {
    TauLaw law;
    if (model.is_newtonian()) {
        law.variable = false;
        law.tau_const = model.tau(0.0, bridge);
        return law;
    }
    const auto& p = model.cy();
    law.variable = true;
    law.eta0 = p.eta0;
    law.eta_inf = p.eta_inf;
    law.lambda_lat = p.lambda / bridge.dt();   // lambda * gamma_phys = lambda_lat * gamma_lat
    law.a = p.a;
    law.exponent = (p.n - 1.0) / p.a;
    law.tau_inf = model.tau_inf();
    law.tau0 = model.tau0();
    law.tau_const = law.tau0;
    return law;
}

LatticeState::LatticeState(std::int64_t fluid_sites) : nf_(fluid_sites) {
    f_[0].setZero(D3Q15::Q, nf_);
    f_[1].setZero(D3Q15::Q, nf_);
    tau.setConstant(nf_, 0.8);
    gamma_dot.setZero(nf_);
}

void LatticeState::initialize_rest(double rho) {
    for (int i = 0; i < D3Q15::Q; ++i) {
        f_[0].row(i).setConstant(rho * D3Q15::w[i]);
        f_[1].row(i).setConstant(rho * D3Q15::w[i]);
    }
    gamma_dot.setZero();
    step_ = 0;
}

void collide(LatticeState& state, const Eigen::Vector3d& body_accel, bool update_gamma,
             MacroFields* macro_out, int threads) {
    auto& f = state.current();
    const std::int64_t n = state.size();
    const bool has_force = body_accel.squaredNorm() > 0.0;
    if (macro_out && macro_out->rho.size() != n) macro_out->resize(n);

    double cg[D3Q15::Q];
    for (int i = 0; i < D3Q15::Q; ++i)
        cg[i] = D3Q15::c[i][0] * body_accel.x() + D3Q15::c[i][1] * body_accel.y() +
                D3Q15::c[i][2] * body_accel.z();

    parallel_for_blocks(n, threads, [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
        double fs[D3Q15::Q];
        for (std::int64_t s = lo; s < hi; ++s) {
            double rho = 0.0, mx = 0.0, my = 0.0, mz = 0.0;
            for (int i = 0; i < D3Q15::Q; ++i) {
                fs[i] = f(i, s);
                rho += fs[i];
                mx += fs[i] * D3Q15::c[i][0];
                my += fs[i] * D3Q15::c[i][1];
                mz += fs[i] * D3Q15::c[i][2];
            }
            const double inv_rho = 1.0 / rho;
            double ux = mx * inv_rho, uy = my * inv_rho, uz = mz * inv_rho;
            if (has_force) {
                ux += 0.5 * body_accel.x();
                uy += 0.5 * body_accel.y();
                uz += 0.5 * body_accel.z();
            }
            const double uu = ux * ux + uy * uy + uz * uz;
            if (macro_out) {
                macro_out->rho(s) = rho;
                macro_out->v(0, s) = ux;
                macro_out->v(1, s) = uy;
                macro_out->v(2, s) = uz;
            }
            const double tau_s = state.tau(s);
            const double omega = 1.0 / tau_s;
            const double force_pref = has_force ? (1.0 - 0.5 * omega) * rho : 0.0;
            const double ug =
                ux * body_accel.x() + uy * body_accel.y() + uz * body_accel.z();

            double pxx = 0, pyy = 0, pzz = 0, pxy = 0, pxz = 0, pyz = 0;
            for (int i = 0; i < D3Q15::Q; ++i) {
                const double cu = D3Q15::c[i][0] * ux + D3Q15::c[i][1] * uy +
                                  D3Q15::c[i][2] * uz;
                const double feq =
                    rho * D3Q15::w[i] * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * uu);
                if (update_gamma) {
                    const double fneq = fs[i] - feq;
                    pxx += fneq * D3Q15::c[i][0] * D3Q15::c[i][0];
                    pyy += fneq * D3Q15::c[i][1] * D3Q15::c[i][1];
                    pzz += fneq * D3Q15::c[i][2] * D3Q15::c[i][2];
                    pxy += fneq * D3Q15::c[i][0] * D3Q15::c[i][1];
                    pxz += fneq * D3Q15::c[i][0] * D3Q15::c[i][2];
                    pyz += fneq * D3Q15::c[i][1] * D3Q15::c[i][2];
                }
                double fi = fs[i] - omega * (fs[i] - feq);
                if (has_force) {
                    fi += D3Q15::w[i] * force_pref * (3.0 * (cg[i] - ug) + 9.0 * cu * cg[i]);
                }
                f(i, s) = fi;
            }
            if (update_gamma) {
                const double scale = -1.0 / (2.0 * tau_s * D3Q15::cs2 * rho);
                const double sxx = scale * pxx, syy = scale * pyy, szz = scale * pzz;
                const double sxy = scale * pxy, sxz = scale * pxz, syz = scale * pyz;
                const double ss = sxx * sxx + syy * syy + szz * szz +
                                  2.0 * (sxy * sxy + sxz * sxz + syz * syz);
                state.gamma_dot(s) = std::sqrt(2.0 * ss);
            }
        }
    });
}

void stream(LatticeState& state, const std::vector<std::int64_t>& neighbor_table,
            int threads) {
    const auto& fc = state.current();
    auto& fn = state.next();
    const std::int64_t n = state.size();
    parallel_for_blocks(n, threads, [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
        for (std::int64_t s = lo; s < hi; ++s) {
            const std::int64_t* nbr = &neighbor_table[s * D3Q15::Q];
            for (int i = 0; i < D3Q15::Q; ++i) {
                const std::int64_t up = nbr[D3Q15::opposite[i]];
                if (up >= 0) fn(i, s) = fc(i, up);
            }
        }
    });
}

void compute_macroscopics(const Eigen::ArrayXXd& f, const Eigen::Vector3d& body_accel,
                          MacroFields& out, int threads, std::int64_t step) {
    const std::int64_t n = f.cols();
    if (out.rho.size() != n) out.resize(n);
    std::atomic<std::int64_t> bad{-1};
    parallel_for_blocks(n, threads, [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
        for (std::int64_t s = lo; s < hi; ++s) {
            double rho = 0.0, mx = 0.0, my = 0.0, mz = 0.0;
            for (int i = 0; i < D3Q15::Q; ++i) {
                const double fi = f(i, s);
                rho += fi;
                mx += fi * D3Q15::c[i][0];
                my += fi * D3Q15::c[i][1];
                mz += fi * D3Q15::c[i][2];
            }
            if (!(rho > 0.0) || !std::isfinite(rho)) {
                std::int64_t expected = -1;
                bad.compare_exchange_strong(expected, s);
                rho = 1.0;
            }
            const double inv_rho = 1.0 / rho;
            out.rho(s) = rho;
            out.v(0, s) = mx * inv_rho + 0.5 * body_accel.x();
            out.v(1, s) = my * inv_rho + 0.5 * body_accel.y();
            out.v(2, s) = mz * inv_rho + 0.5 * body_accel.z();
        }
    });
    if (bad.load() >= 0) {
        throw InstabilityError("non-positive or non-finite density at fluid site " +
                                   std::to_string(bad.load()),
                               step);
    }
}

void compute_shear(const Eigen::ArrayXXd& f, const Eigen::ArrayXd& tau,
                   const Eigen::Vector3d& body_accel, MacroFields& out, int threads) {
    const std::int64_t n = f.cols();
    if (out.rho.size() != n) out.resize(n);
    parallel_for_blocks(n, threads, [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
        for (std::int64_t s = lo; s < hi; ++s) {
            double rho = 0.0, mx = 0.0, my = 0.0, mz = 0.0;
            double fs[D3Q15::Q];
            for (int i = 0; i < D3Q15::Q; ++i) {
                fs[i] = f(i, s);
                rho += fs[i];
                mx += fs[i] * D3Q15::c[i][0];
                my += fs[i] * D3Q15::c[i][1];
                mz += fs[i] * D3Q15::c[i][2];
            }
            const double inv_rho = 1.0 / rho;
            const double ux = mx * inv_rho + 0.5 * body_accel.x();
            const double uy = my * inv_rho + 0.5 * body_accel.y();
            const double uz = mz * inv_rho + 0.5 * body_accel.z();
            const double uu = ux * ux + uy * uy + uz * uz;

            double pxx = 0, pyy = 0, pzz = 0, pxy = 0, pxz = 0, pyz = 0;
            for (int i = 0; i < D3Q15::Q; ++i) {
                const double cu = D3Q15::c[i][0] * ux + D3Q15::c[i][1] * uy +
                                  D3Q15::c[i][2] * uz;
                const double fneq =
                    fs[i] - rho * D3Q15::w[i] * (1.0 + 3.0 * cu + 4.5 * cu * cu - 1.5 * uu);
                pxx += fneq * D3Q15::c[i][0] * D3Q15::c[i][0];
                pyy += fneq * D3Q15::c[i][1] * D3Q15::c[i][1];
                pzz += fneq * D3Q15::c[i][2] * D3Q15::c[i][2];
                pxy += fneq * D3Q15::c[i][0] * D3Q15::c[i][1];
                pxz += fneq * D3Q15::c[i][0] * D3Q15::c[i][2];
                pyz += fneq * D3Q15::c[i][1] * D3Q15::c[i][2];
            }
            const double scale = -1.0 / (2.0 * tau(s) * D3Q15::cs2 * rho);
            out.rho(s) = rho;
            out.v(0, s) = ux;
            out.v(1, s) = uy;
            out.v(2, s) = uz;
            out.S(0, s) = scale * pxx;
            out.S(1, s) = scale * pyy;
            out.S(2, s) = scale * pzz;
            out.S(3, s) = scale * pxy;
            out.S(4, s) = scale * pxz;
            out.S(5, s) = scale * pyz;
            out.gamma_dot(s) = std::sqrt(2.0 * sym3_contract(out.S.col(s)));
        }
    });
}

}  // namespace caplb
