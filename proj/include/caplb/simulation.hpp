#ifndef CAPLB_SIMULATION_HPP
#define CAPLB_SIMULATION_HPP

/// Steady-state driver: collide -> stream -> boundary fill loop with the
/// velocity-change convergence criterion, plus the reporting operations
/// (plane flow rates, wall tractions, perfusion-pressure sweeps).

#include <functional>
#include <optional>

#include "caplb/boundaries.hpp"
#include "caplb/lbm.hpp"
#include "caplb/units.hpp"
#include "caplb/voxel_domain.hpp"

namespace caplb {

struct ConvergenceSettings {
    double v_ref_m_s = 0.05;          // reference velocity scale
    double eps_tol = 1e-6;
    std::int64_t check_interval = 100;
    std::int64_t max_steps = 5000000;
};

enum class RunStatus { Converged, MaxSteps, Unstable };

struct RunReport {
    RunStatus status = RunStatus::MaxSteps;
    std::int64_t steps = 0;
    double wall_seconds = 0.0;
    double peak_velocity_m_s = 0.0;           // iolet-adjacent layer excluded
    double min_f = 0.0;                       // most negative population seen
    std::vector<double> residual_history;     // one entry per check
    std::vector<double> iolet_volume_rate_m3_s;  // net outflow per iolet
    std::vector<std::string> warnings;
};

struct SteadyRunResult {
    RunReport report;
    MacroFields fields;          // converged (or last stable) lattice fields
};

struct SimulationSetup {
    const VoxelDomain* domain = nullptr;
    RheologyModel rheology = RheologyModel::newtonian(3.265e-3);
    UnitBridge bridge{1e-6, 1e-6, 1000.0};
    std::vector<IoletBC> iolet_bcs;           // empty: pressure BCs from the skeleton
    Eigen::Vector3d body_accel_lat = Eigen::Vector3d::Zero();
    ConvergenceSettings convergence;
    int threads = 0;                          // 0: CAPLB_THREADS or hardware
};

/// Pressure boundary conditions from the iolet pressures stored in the
/// domain, referenced so that the lowest outlet pressure maps to lattice
/// density 1. Returns the reference pressure through reference_mmhg.
std::vector<IoletBC> pressure_bcs_from_domain(const VoxelDomain& domain,
                                              const UnitBridge& bridge,
                                              double* reference_mmhg = nullptr);

/// Advances from a uniform fluid at rest until the largest site velocity
/// change per check interval drops below eps_tol * v_ref.
SteadyRunResult run_steady(const SimulationSetup& setup);

struct FlowRate {
    double lattice = 0.0;        // sum of v.n over plane sites (dx = 1)
    double physical_m3_s = 0.0;
    std::int64_t sites = 0;
};

/// Midpoint-rule volumetric flux through the lattice-aligned plane
/// axis = coord (global integer site coordinate). The optional filter
/// restricts which fluid sites are summed.
FlowRate flow_rate(const MacroFields& fields, const VoxelDomain& domain,
                   const UnitBridge& bridge, int axis, int plane_coord,
                   const std::function<bool(const Eigen::Vector3d&)>& filter = {});

struct WssRecord {
    Eigen::Vector3d position_um;     // wall-link surface intersection
    Eigen::Vector3d normal;          // wall-surface normal, pointing into the fluid
    Eigen::Vector3d traction_pa;     // t = T n
    double wss_pa = 0.0;             // |t|
};

/// Traction vectors at every wall-link intersection, from the deviatoric
/// stress at the link's fluid site: T = 2 eta(gamma) S in physical units.
std::vector<WssRecord> traction_field(const MacroFields& fields, const VoxelDomain& domain,
                                      const UnitBridge& bridge, const RheologyModel& rheology);

struct OppPoint {
    double opp_mmhg = 0.0;
    double peak_velocity_m_s = 0.0;
    RunStatus status = RunStatus::Converged;
    std::int64_t steps = 0;
};

struct OppSweepResult {
    std::vector<OppPoint> points;
    double slope_m_s_per_mmhg = 0.0;
    double intercept_m_s = 0.0;
    double r_squared = 0.0;
};

/// One steady run per perfusion pressure: inlet pressures are raised to
/// outlet + OPP while outlets stay at the reference. Requires >= 3 values.
OppSweepResult opp_sweep(const SimulationSetup& base, const std::vector<double>& opp_mmhg);

/// Peak site speed (lattice units -> m/s) excluding sites within one
/// lattice layer of an iolet opening.
double peak_velocity_m_s(const MacroFields& fields, const VoxelDomain& domain,
                         const UnitBridge& bridge);

}  // namespace caplb

#endif
