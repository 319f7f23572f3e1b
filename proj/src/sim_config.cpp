#include "caplb/sim_config.hpp"

#include <fstream>

#include "json.hpp"

namespace caplb {

void SimConfig::validate() const {
    int geom = 0;
    if (!skeleton_path.empty()) ++geom;
    if (!domain_path.empty()) ++geom;
    if (geom != 1)
        throw std::invalid_argument("config: exactly one of skeleton/domain is required");
    int rheo = 0;
    if (newtonian_eta_pa_s) ++rheo;
    if (carreau_yasuda) ++rheo;
    if (!fit_csv_path.empty()) ++rheo;
    if (rheo != 1)
        throw std::invalid_argument(
            "config: exactly one rheology source is required "
            "(newtonian_eta_pa_s | carreau_yasuda | fit_csv)");
    if (!(dx_um > 0.0)) throw std::invalid_argument("config: dx_um must be positive");
    if (dt_s && !(*dt_s > 0.0)) throw std::invalid_argument("config: dt_s must be positive");
    if (!(rho_kg_m3 > 0.0)) throw std::invalid_argument("config: rho_kg_m3 must be positive");
    if (!(eps_tol > 0.0) || !(v_ref_m_s > 0.0))
        throw std::invalid_argument("config: eps_tol and v_ref_m_s must be positive");
    if (check_interval < 1 || max_steps < 1)
        throw std::invalid_argument("config: check_interval and max_steps must be >= 1");
    if (carreau_yasuda) carreau_yasuda->validate();
}

RheologyModel SimConfig::make_rheology() const {
    if (newtonian_eta_pa_s)
        return RheologyModel::newtonian(*newtonian_eta_pa_s, tau_newtonian);
    if (carreau_yasuda)
        return RheologyModel::carreau_yasuda(*carreau_yasuda, tau_inf, tau0);
    const auto samples = load_viscosity_csv(fit_csv_path);
    const auto fit = fit_cy(samples, cy_initial_guess(samples));
    return RheologyModel::carreau_yasuda(fit.params, tau_inf, tau0);
}

UnitBridge SimConfig::make_bridge(double dx_um_actual) const {
    if (dt_s) return UnitBridge(dx_um_actual * 1e-6, *dt_s, rho_kg_m3);
    return make_rheology().make_bridge(dx_um_actual * 1e-6, rho_kg_m3);
}

namespace {

nlohmann::json cy_to_json(const CarreauYasudaParams& p) {
    return {{"eta0_pa_s", p.eta0},
            {"eta_inf_pa_s", p.eta_inf},
            {"lambda_s", p.lambda},
            {"a", p.a},
            {"n", p.n}};
}

CarreauYasudaParams cy_from_json(const nlohmann::json& j) {
    CarreauYasudaParams p;
    p.eta0 = j.at("eta0_pa_s").get<double>();
    p.eta_inf = j.at("eta_inf_pa_s").get<double>();
    p.lambda = j.at("lambda_s").get<double>();
    p.a = j.at("a").get<double>();
    p.n = j.at("n").get<double>();
    return p;
}

}  // namespace

std::string sim_config_to_json(const SimConfig& c) {
    nlohmann::json j;
    if (!c.skeleton_path.empty()) j["skeleton"] = c.skeleton_path;
    if (!c.domain_path.empty()) j["domain"] = c.domain_path;
    j["output_dir"] = c.output_dir;
    j["snapshot_name"] = c.snapshot_name;
    j["write_vtk"] = c.write_vtk;
    j["dx_um"] = c.dx_um;
    j["min_diameter_override"] = c.min_diameter_override;
    if (c.dt_s) j["dt_s"] = *c.dt_s;
    j["tau_newtonian"] = c.tau_newtonian;
    j["tau_inf"] = c.tau_inf;
    j["tau0"] = c.tau0;
    if (c.newtonian_eta_pa_s) j["rheology"] = {{"newtonian_eta_pa_s", *c.newtonian_eta_pa_s}};
    if (c.carreau_yasuda) j["rheology"] = {{"carreau_yasuda", cy_to_json(*c.carreau_yasuda)}};
    if (!c.fit_csv_path.empty()) j["rheology"] = {{"fit_csv", c.fit_csv_path}};
    j["rho_kg_m3"] = c.rho_kg_m3;
    j["rho_is_default"] = c.rho_is_default;
    if (!c.iolet_pressures_mmhg.empty()) j["iolet_pressures_mmhg"] = c.iolet_pressures_mmhg;
    j["v_ref_m_s"] = c.v_ref_m_s;
    j["eps_tol"] = c.eps_tol;
    j["check_interval"] = c.check_interval;
    j["max_steps"] = c.max_steps;
    j["threads"] = c.threads;
    return j.dump(2);
}

SimConfig sim_config_from_json(const std::string& text) {
    const nlohmann::json j = nlohmann::json::parse(text);
    SimConfig c;
    c.skeleton_path = j.value("skeleton", "");
    c.domain_path = j.value("domain", "");
    c.output_dir = j.value("output_dir", ".");
    c.snapshot_name = j.value("snapshot_name", "fields.clbs");
    c.write_vtk = j.value("write_vtk", false);
    c.dx_um = j.value("dx_um", 1.0);
    c.min_diameter_override = j.value("min_diameter_override", false);
    if (j.contains("dt_s")) c.dt_s = j.at("dt_s").get<double>();
    c.tau_newtonian = j.value("tau_newtonian", 0.8);
    c.tau_inf = j.value("tau_inf", 0.6);
    c.tau0 = j.value("tau0", 0.992);
    if (j.contains("rheology")) {
        const auto& r = j.at("rheology");
        if (r.contains("newtonian_eta_pa_s"))
            c.newtonian_eta_pa_s = r.at("newtonian_eta_pa_s").get<double>();
        if (r.contains("carreau_yasuda")) c.carreau_yasuda = cy_from_json(r.at("carreau_yasuda"));
        if (r.contains("fit_csv")) c.fit_csv_path = r.at("fit_csv").get<std::string>();
    }
    if (j.contains("rho_kg_m3")) {
        c.rho_kg_m3 = j.at("rho_kg_m3").get<double>();
        c.rho_is_default = j.value("rho_is_default", false);
    }
    if (j.contains("iolet_pressures_mmhg"))
        c.iolet_pressures_mmhg = j.at("iolet_pressures_mmhg").get<std::vector<double>>();
    c.v_ref_m_s = j.value("v_ref_m_s", 0.05);
    c.eps_tol = j.value("eps_tol", 1e-6);
    c.check_interval = j.value("check_interval", std::int64_t(100));
    c.max_steps = j.value("max_steps", std::int64_t(5000000));
    c.threads = j.value("threads", 0);
    c.validate();
    return c;
}

SimConfig load_sim_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return sim_config_from_json(text);
}

void save_sim_config(const std::string& path, const SimConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config file: " + path);
    out << sim_config_to_json(config) << "\n";
}

std::string sim_config_schema() {
    return R"schema({
  "skeleton": "path to skeleton JSON (exactly one of skeleton/domain)",
  "domain": "path to a voxelized CLBD domain",
  "output_dir": "directory for reports and snapshots (default .)",
  "snapshot_name": "snapshot file name (default fields.clbs)",
  "write_vtk": "also export legacy-VTK visualisation files (default false)",
  "dx_um": "voxel size in micrometres when voxelizing a skeleton (default 1.0)",
  "min_diameter_override": "voxelize even when a segment is thinner than 3 dx (default false)",
  "dt_s": "explicit timestep; omit to derive it from the relaxation-time targets",
  "tau_newtonian": "relaxation-time target for a Newtonian run (default 0.8)",
  "tau_inf": "relaxation time at the high-shear viscosity plateau (default 0.6)",
  "tau0": "relaxation time at the zero-shear viscosity plateau (default 0.992)",
  "rheology": {
    "newtonian_eta_pa_s": "constant dynamic viscosity, OR",
    "carreau_yasuda": {"eta0_pa_s": 0.01449, "eta_inf_pa_s": 0.003265,
                       "lambda_s": 0.1839, "a": 2.707, "n": 0.4136},
    "fit_csv": "OR fit the model to a viscosity CSV (shear_rate_per_s,viscosity_mpas,source)"
  },
  "rho_kg_m3": "mass density mapped to lattice density 1 (default 1000; flagged in reports)",
  "iolet_pressures_mmhg": "optional per-iolet pressure override, by iolet index",
  "v_ref_m_s": "convergence reference velocity (default 0.05)",
  "eps_tol": "convergence tolerance (default 1e-6)",
  "check_interval": "steps between convergence checks (default 100)",
  "max_steps": "step cap (default 5000000)",
  "threads": "worker count; 0 uses CAPLB_THREADS or all cores"
})schema";
}

}  // namespace caplb
