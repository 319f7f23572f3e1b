#ifndef CAPLB_ANALYTIC_HPP
#define CAPLB_ANALYTIC_HPP

/// Closed-form Hagen-Poiseuille references for the verification flows:
/// flow rate, velocity profile, and the rotated shear-stress tensor for a
/// cylinder of arbitrary orientation, plus the scalar error metrics.

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace caplb {

/// Benchmark cylinder orientation, drawn pseudorandomly from the unit
/// sphere subject to |n.e_i| <= 0.9.
inline Eigen::Vector3d benchmark_axis() { return {-0.299, 0.382, 0.874}; }

/// Orthonormal frame whose third column is the cylinder axis, built from
/// r_perp = (axis x e3)/|axis x e3|. Degenerate for an axis parallel to
/// e3 (the canonical case needs no rotation).
template <typename Scalar = double>
struct RotatedFrame {
    Eigen::Matrix<Scalar, 3, 3> Q;   // columns (u, axis x u, axis)

    static RotatedFrame from_axis(const Eigen::Matrix<Scalar, 3, 1>& axis_in) {
        const Eigen::Matrix<Scalar, 3, 1> axis = axis_in.normalized();
        const Eigen::Matrix<Scalar, 3, 1> e3(Scalar(0), Scalar(0), Scalar(1));
        Eigen::Matrix<Scalar, 3, 1> u = axis.cross(e3);
        const Scalar len = u.norm();
        if (!(len > Scalar(1e-12)))
            throw std::invalid_argument("RotatedFrame: axis parallel to e3 is degenerate");
        u /= len;
        RotatedFrame fr;
        fr.Q.col(0) = u;
        fr.Q.col(1) = axis.cross(u);
        fr.Q.col(2) = axis;
        return fr;
    }

    Eigen::Matrix<Scalar, 3, 1> to_canonical(const Eigen::Matrix<Scalar, 3, 1>& p) const {
        return Q.transpose() * p;
    }
    Eigen::Matrix<Scalar, 3, 3> rotate_tensor(const Eigen::Matrix<Scalar, 3, 3>& t) const {
        return Q * t * Q.transpose();
    }
};

/// q* = |v_max| pi D^2 / 8
template <typename Scalar = double>
Scalar analytic_flow_rate(Scalar v_max, Scalar diameter) {
    using std::abs;
    return abs(v_max) * std::numbers::pi_v<Scalar> * diameter * diameter / Scalar(8);
}

/// Radial distance of a point from the cylinder axis through the origin.
template <typename Scalar = double>
Scalar cylinder_radius(const Eigen::Matrix<Scalar, 3, 1>& axis,
                       const Eigen::Matrix<Scalar, 3, 1>& p) {
    const Eigen::Matrix<Scalar, 3, 1> a = axis.normalized();
    return (p - p.dot(a) * a).norm();
}

/// Poiseuille velocity at a point, flow along +axis, cylinder through the
/// origin. Zero outside the lumen.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 3, 1> poiseuille_velocity(const Eigen::Matrix<Scalar, 3, 1>& axis,
                                                Scalar v_max, Scalar radius,
                                                const Eigen::Matrix<Scalar, 3, 1>& p) {
    const Eigen::Matrix<Scalar, 3, 1> a = axis.normalized();
    const Scalar r = cylinder_radius<Scalar>(a, p);
    if (r > radius) return Eigen::Matrix<Scalar, 3, 1>::Zero();
    return v_max * (Scalar(1) - (r / radius) * (r / radius)) * a;
}

/// Deviatoric stress of Hagen-Poiseuille flow in the canonical frame
/// (axis e3, flow toward +e3):
///   T'_13 = T'_31 = -2 |v_max| eta x1 / R^2,  T'_23 = T'_32 likewise in x2.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 3, 3> poiseuille_stress_canonical(Scalar v_max, Scalar eta,
                                                        Scalar radius,
                                                        const Eigen::Matrix<Scalar, 3, 1>& p) {
    using std::abs;
    Eigen::Matrix<Scalar, 3, 3> t = Eigen::Matrix<Scalar, 3, 3>::Zero();
    const Scalar k = Scalar(-2) * abs(v_max) * eta / (radius * radius);
    t(0, 2) = t(2, 0) = k * p(0);
    t(1, 2) = t(2, 1) = k * p(1);
    return t;
}

/// T*(x) = Q T'(Q^T x) Q^T for a cylinder along `axis` through the origin.
/// Throws for points outside the lumen or an e3-parallel axis.
template <typename Scalar = double>
Eigen::Matrix<Scalar, 3, 3> poiseuille_stress(const Eigen::Matrix<Scalar, 3, 1>& axis,
                                              Scalar v_max, Scalar eta, Scalar radius,
                                              const Eigen::Matrix<Scalar, 3, 1>& p) {
    const auto frame = RotatedFrame<Scalar>::from_axis(axis);
    const Eigen::Matrix<Scalar, 3, 1> pc = frame.to_canonical(p);
    if (pc.template head<2>().norm() > radius * (Scalar(1) + Scalar(1e-9)))
        throw std::invalid_argument("poiseuille_stress: point outside the cylinder");
    return frame.rotate_tensor(poiseuille_stress_canonical(v_max, eta, radius, pc));
}

/// eps_q = |(q* - q)/q*|
template <typename Scalar = double>
Scalar flow_rate_error(Scalar q_simulated, Scalar q_analytic) {
    if (q_analytic == Scalar(0))
        throw std::invalid_argument("flow_rate_error: zero analytic flow rate");
    using std::abs;
    return abs((q_analytic - q_simulated) / q_analytic);
}

/// eps_T = ||T* - T||_F / ||T*||_F
template <typename Scalar = double>
Scalar stress_error(const Eigen::Matrix<Scalar, 3, 3>& simulated,
                    const Eigen::Matrix<Scalar, 3, 3>& analytic) {
    const Scalar denom = analytic.norm();
    if (!(denom > Scalar(0)))
        throw std::invalid_argument("stress_error: zero analytic stress");
    return (analytic - simulated).norm() / denom;
}

}  // namespace caplb

#endif
