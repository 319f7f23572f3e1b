#ifndef CAPLB_UNITS_HPP
#define CAPLB_UNITS_HPP

/// Physical <-> lattice unit conversion. Everything downstream of the
/// voxelizer computes in lattice units (dx = dt = rho = 1) and converts
/// back to SI only at the reporting surface.

#include <cmath>
#include <stdexcept>

namespace caplb {

inline constexpr double kMmHgToPa = 133.322;
inline constexpr double kLatticeCs2 = 1.0 / 3.0;  // D3Q15 sound speed squared

/// Conversion bridge defined by the voxel size, the timestep, and the
/// physical mass density mapped to lattice density 1.
class UnitBridge {
public:
    UnitBridge(double dx_m, double dt_s, double rho_kg_m3 = 1000.0)
        : dx_(dx_m), dt_(dt_s), rho_(rho_kg_m3) {
        if (!(dx_ > 0.0) || !(dt_ > 0.0) || !(rho_ > 0.0)) {
            throw std::invalid_argument("UnitBridge: dx, dt, rho must be positive");
        }
    }

    /// Pick dt so that a target relaxation time corresponds to the given
    /// dynamic viscosity: nu_lat = cs2*(tau-1/2) = (eta/rho)*dt/dx^2.
    static UnitBridge from_tau_target(double dx_m, double eta_pa_s, double tau,
                                      double rho_kg_m3 = 1000.0) {
        if (!(eta_pa_s > 0.0)) throw std::invalid_argument("eta must be positive");
        if (!(tau > 0.5)) throw std::invalid_argument("tau target must exceed 1/2");
        const double nu_lat = kLatticeCs2 * (tau - 0.5);
        const double dt = nu_lat * dx_m * dx_m / (eta_pa_s / rho_kg_m3);
        return UnitBridge(dx_m, dt, rho_kg_m3);
    }

    double dx() const { return dx_; }
    double dt() const { return dt_; }
    double rho_phys() const { return rho_; }

    double velocity_scale() const { return dx_ / dt_; }       // m/s per lattice unit
    double stress_scale() const { return rho_ * velocity_scale() * velocity_scale(); }
    double shear_rate_scale() const { return 1.0 / dt_; }     // 1/s per lattice unit
    double sound_speed() const { return dx_ / (std::sqrt(3.0) * dt_); }  // physical c_s

    /// Kinematic viscosity in lattice units, nu~ = (eta/rho) dt/dx^2.
    double lattice_viscosity(double eta_pa_s) const {
        if (!(eta_pa_s > 0.0)) throw std::invalid_argument("lattice_viscosity: eta must be positive");
        return (eta_pa_s / rho_) * dt_ / (dx_ * dx_);
    }

    /// tau~ = 1/2 + nu~/cs2 with cs2 = 1/3.
    static double tau_from_nu(double nu_lat) {
        if (!(nu_lat > 0.0)) throw std::invalid_argument("tau_from_nu: nu must be positive");
        return 0.5 + nu_lat / kLatticeCs2;
    }

    /// Inverse of tau_from_nu.
    static double nu_from_tau(double tau) { return kLatticeCs2 * (tau - 0.5); }

    /// Lattice density imposing pressure p (mmHg) against the reference
    /// pressure mapped to density 1, via the lattice ideal-gas law.
    double pressure_to_lattice_density(double p_mmhg, double reference_mmhg) const {
        const double dp = (p_mmhg - reference_mmhg) * kMmHgToPa;
        const double cs = sound_speed();
        return 1.0 + dp / (rho_ * cs * cs);
    }

    /// Physical pressure offset (Pa) carried by a lattice density.
    double lattice_density_to_pressure_pa(double rho_lat) const {
        const double cs = sound_speed();
        return (rho_lat - 1.0) * rho_ * cs * cs;
    }

    double velocity_to_lattice(double v_m_s) const { return v_m_s / velocity_scale(); }
    double velocity_to_physical(double v_lat) const { return v_lat * velocity_scale(); }

    /// Converts and enforces the compressibility guard |v~| < 0.1.
    double checked_velocity_to_lattice(double v_m_s) const {
        const double v = velocity_to_lattice(v_m_s);
        if (!(std::abs(v) < 0.1)) {
            throw std::invalid_argument("velocity exceeds 0.1 lattice units (Mach guard)");
        }
        return v;
    }

    double shear_rate_to_physical(double g_lat) const { return g_lat * shear_rate_scale(); }
    double stress_to_physical(double t_lat) const { return t_lat * stress_scale(); }

private:
    double dx_;
    double dt_;
    double rho_;
};

}  // namespace caplb

#endif
