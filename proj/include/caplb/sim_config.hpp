#ifndef CAPLB_SIM_CONFIG_HPP
#define CAPLB_SIM_CONFIG_HPP

/// Simulation configuration: JSON-backed, schema documented through
/// sim_config_schema(). Exactly one rheology source and exactly one
/// geometry source must be set.

#include <optional>
#include <string>
#include <vector>

#include "caplb/rheology.hpp"

namespace caplb {

struct SimConfig {
    // geometry: exactly one
    std::string skeleton_path;
    std::string domain_path;

    std::string output_dir = ".";
    std::string snapshot_name = "fields.clbs";
    bool write_vtk = false;

    double dx_um = 1.0;                  // used when voxelizing a skeleton
    bool min_diameter_override = false;

    // timestep: explicit dt, or derived from the relaxation-time targets
    std::optional<double> dt_s;
    double tau_newtonian = 0.8;
    double tau_inf = 0.6;
    double tau0 = 0.992;

    // rheology: exactly one
    std::optional<double> newtonian_eta_pa_s;
    std::optional<CarreauYasudaParams> carreau_yasuda;
    std::string fit_csv_path;

    double rho_kg_m3 = 1000.0;
    bool rho_is_default = true;          // flagged in every report

    std::vector<double> iolet_pressures_mmhg;   // optional per-index override

    double v_ref_m_s = 0.05;
    double eps_tol = 1e-6;
    std::int64_t check_interval = 100;
    std::int64_t max_steps = 5000000;
    int threads = 0;

    void validate() const;
    RheologyModel make_rheology() const;    // fits the CSV when configured
    UnitBridge make_bridge(double dx_um_actual) const;
};

SimConfig load_sim_config(const std::string& path);
void save_sim_config(const std::string& path, const SimConfig& config);
std::string sim_config_to_json(const SimConfig& config);
SimConfig sim_config_from_json(const std::string& text);
std::string sim_config_schema();

}  // namespace caplb

#endif
