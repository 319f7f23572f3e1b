#ifndef CAPLB_BENCHMARK_HPP
#define CAPLB_BENCHMARK_HPP

/// Inclined-cylinder verification runs: Hagen-Poiseuille flow rate and
/// shear-stress error characterisation over diameter/relaxation-time
/// matrices, plus the dyadic grid-refinement study.

#include <optional>
#include <string>

#include "caplb/analytic.hpp"
#include "caplb/simulation.hpp"

namespace caplb {

struct BenchmarkOptions {
    Eigen::Vector3d axis = benchmark_axis();
    double reynolds = 1.0;
    double dx_um = 1.0;
    bool carreau_yasuda = false;     // Newtonian at the requested tau otherwise
    ConvergenceSettings convergence;
    int threads = 0;
};

struct StressBin {
    double r_lo = 0.0, r_hi = 0.0;   // in units of R
    double mean_eps = 0.0;
    double max_eps = 0.0;
    double mean_norm_diff = 0.0;     // ||T|| - ||T*||, signed
    std::int64_t sites = 0;
};

struct BenchmarkRow {
    double diameter_lat = 0.0;
    double tau = 0.0;
    double eps_q = std::numeric_limits<double>::quiet_NaN();
    double eps_t_wall = std::numeric_limits<double>::quiet_NaN();  // max, [0.95R, R]
    std::vector<StressBin> stress_bins;   // four 0.05R bins over [0.8R, R]
    std::int64_t steps = 0;
    double seconds = 0.0;
    RunStatus status = RunStatus::MaxSteps;
    std::string error;
};

/// Steady Re = 1 flow in the inclined cylinder: parabolic velocity inlet,
/// reference-density outlet; flow rate measured through the z = 0 lattice
/// plane against q* = |v_max| pi D^2/8, stress against the rotated tensor.
BenchmarkRow run_cylinder_benchmark(double diameter_lat, double tau,
                                    const BenchmarkOptions& options = {});

/// One run per (D, tau) pair; failures are recorded in the row and the
/// suite continues.
std::vector<BenchmarkRow> run_benchmark_suite(const std::vector<double>& diameters,
                                              const std::vector<double>& taus,
                                              const BenchmarkOptions& options = {});

/// Columns: D,tau,eps_q,eps_T_wall,eps_T_bin...,steps,seconds,status.
/// gnuplot_whitespace swaps commas for spaces (and '#' on the header).
void write_benchmark_csv(const std::string& path, const std::vector<BenchmarkRow>& rows,
                         bool gnuplot_whitespace = false);

/// RMS velocity mismatch against a finer reference discretisation,
/// nearest-site matched, scaled by sqrt(N) times the reference peak speed.
/// plane_only restricts the sum to sites on the z = 0 lattice plane.
double grid_refinement_error(const MacroFields& coarse_fields, const VoxelDomain& coarse,
                             const UnitBridge& coarse_bridge, const MacroFields& ref_fields,
                             const VoxelDomain& ref, const UnitBridge& ref_bridge,
                             bool plane_only = true);

struct RefinementResult {
    std::vector<double> dx_um;       // coarse levels, coarsest first
    std::vector<double> eps;         // grid_refinement_error per level
    double slope = 0.0;              // log-log least-squares slope
    std::vector<std::int64_t> steps;
};

/// Dyadic ladder at fixed physical diameter: levels at dx0/2^k compared
/// against a reference another factor two finer.
RefinementResult grid_refinement_study(double diameter_um, double dx0_um, int levels,
                                       double tau = 0.8, const BenchmarkOptions& options = {});

}  // namespace caplb

#endif
