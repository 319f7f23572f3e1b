#ifndef CAPLB_LBM_HPP
#define CAPLB_LBM_HPP

/// D3Q15 LBGK kernel: second-order Maxwellian equilibrium, collision with
/// a locally variable relaxation time, pull-scheme streaming over a sparse
/// fluid-site list, and local recovery of macroscopic and stress fields
/// from the non-equilibrium moments.

#include <Eigen/Dense>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "caplb/lattice.hpp"
#include "caplb/rheology.hpp"
#include "caplb/units.hpp"
#include "caplb/voxel_domain.hpp"

namespace caplb {

/// f_i^eq = rho w_i (1 + c.v/cs2 + (c.v)^2/(2 cs4) - v.v/(2 cs2))
template <typename Scalar>
Eigen::Matrix<Scalar, D3Q15::Q, 1> equilibrium(Scalar rho,
                                               const Eigen::Matrix<Scalar, 3, 1>& v) {
    Eigen::Matrix<Scalar, D3Q15::Q, 1> feq;
    const Scalar inv_cs2 = Scalar(3);
    const Scalar vv = v.squaredNorm();
    for (int i = 0; i < D3Q15::Q; ++i) {
        const Scalar cv = Scalar(D3Q15::c[i][0]) * v(0) + Scalar(D3Q15::c[i][1]) * v(1) +
                          Scalar(D3Q15::c[i][2]) * v(2);
        feq(i) = rho * Scalar(D3Q15::w[i]) *
                 (Scalar(1) + inv_cs2 * cv + Scalar(0.5) * inv_cs2 * inv_cs2 * cv * cv -
                  Scalar(0.5) * inv_cs2 * vv);
    }
    return feq;
}

/// Symmetric tensor stored as (xx, yy, zz, xy, xz, yz).
using Sym3 = Eigen::Matrix<double, 6, 1>;

inline Eigen::Matrix3d sym3_to_matrix(const Sym3& s) {
    Eigen::Matrix3d m;
    m << s(0), s(3), s(4), s(3), s(1), s(5), s(4), s(5), s(2);
    return m;
}

inline double sym3_contract(const Sym3& s) {   // S:S
    return s(0) * s(0) + s(1) * s(1) + s(2) * s(2) +
           2.0 * (s(3) * s(3) + s(4) * s(4) + s(5) * s(5));
}

struct MacroFields {
    Eigen::ArrayXd rho;                         // lattice density
    Eigen::Matrix3Xd v;                         // lattice velocity
    Eigen::ArrayXd gamma_dot;                   // lattice shear rate
    Eigen::Matrix<double, 6, Eigen::Dynamic> S; // lattice strain-rate tensor

    void resize(std::int64_t n) {
        rho.setZero(n);
        v.setZero(3, n);
        gamma_dot.setZero(n);
        S.setZero(6, n);
    }
};

/// Relaxation-time law evaluated per site from the lattice shear rate
/// (CY parameters pre-scaled so lambda multiplies lattice shear rates).
struct TauLaw {
    bool variable = false;
    double tau_const = 0.8;
    double eta0 = 0.0, eta_inf = 0.0, lambda_lat = 0.0, a = 1.0, exponent = 0.0;
    double tau_inf = 0.6, tau0 = 0.992;

    static TauLaw constant(double tau) { return {false, tau}; }
    static TauLaw from_model(const RheologyModel& model, const UnitBridge& bridge);

    double operator()(double gamma_lat) const {
        if (!variable) return tau_const;
        const double br = 1.0 + std::pow(lambda_lat * gamma_lat, a);
        const double eta = eta_inf + (eta0 - eta_inf) * std::pow(br, exponent);
        const double t = tau_inf + (tau0 - tau_inf) * (eta - eta_inf) / (eta0 - eta_inf);
        return std::clamp(t, tau_inf, tau0);
    }
};

/// Double-buffered distribution functions plus the per-site relaxation
/// time. Buffers swap roles every step; no in-place aliased update.
class LatticeState {
public:
    explicit LatticeState(std::int64_t fluid_sites);

    std::int64_t size() const { return nf_; }
    Eigen::ArrayXXd& current() { return f_[cur_]; }
    const Eigen::ArrayXXd& current() const { return f_[cur_]; }
    Eigen::ArrayXXd& next() { return f_[1 - cur_]; }
    const Eigen::ArrayXXd& next() const { return f_[1 - cur_]; }
    void swap_buffers() { cur_ = 1 - cur_; ++step_; }
    std::int64_t step() const { return step_; }

    Eigen::ArrayXd tau;         // per-site relaxation time
    Eigen::ArrayXd gamma_dot;   // lattice shear rate from the previous step

    /// Uniform density 1 fluid at rest.
    void initialize_rest(double rho = 1.0);

private:
    std::int64_t nf_;
    Eigen::ArrayXXd f_[2];      // Q x nf, column per site
    int cur_ = 0;
    std::int64_t step_ = 0;
};

struct InstabilityError : std::runtime_error {
    InstabilityError(const std::string& what, std::int64_t step)
        : std::runtime_error(what), step(step) {}
    std::int64_t step = 0;
};

/// LBGK relaxation toward the local equilibrium, in place on the current
/// buffer. Optionally accumulates the strain-rate shear rate (from the
/// pre-collision non-equilibrium moments) into state.gamma_dot, and adds a
/// uniform body acceleration with Guo forcing. When macro_out is given the
/// pre-collision density and velocity moments are stored there (consumed
/// by the pressure openings and the convergence monitor).
void collide(LatticeState& state, const Eigen::Vector3d& body_accel, bool update_gamma,
             MacroFields* macro_out, int threads);

/// Pull streaming: next(i, s) = current(i, upstream) for interior links.
/// Boundary-cut slots are left for the boundary rules to fill.
void stream(LatticeState& state, const std::vector<std::int64_t>& neighbor_table,
            int threads);

/// rho, v from the moment sums of a buffer (with the half-force velocity
/// correction when a body acceleration is active). Throws InstabilityError
/// on non-positive or non-finite density.
void compute_macroscopics(const Eigen::ArrayXXd& f, const Eigen::Vector3d& body_accel,
                          MacroFields& out, int threads, std::int64_t step = 0);

/// Strain-rate tensor, shear rate from the non-equilibrium second moment:
/// S = -1/(2 tau cs2 rho) sum_i f_i^neq c_i c_i, fully site-local.
void compute_shear(const Eigen::ArrayXXd& f, const Eigen::ArrayXd& tau,
                   const Eigen::Vector3d& body_accel, MacroFields& out, int threads);

}  // namespace caplb

#endif
