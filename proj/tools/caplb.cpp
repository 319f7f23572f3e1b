// caplb command-line tool: voxelization, steady runs, verification
// benchmarks, perfusion-pressure sweeps, rheology fitting, histograms,
// synthetic network generation, and VTK export.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "caplb/benchmark.hpp"
#include "caplb/domain_io.hpp"
#include "caplb/network_gen.hpp"
#include "caplb/sim_config.hpp"
#include "caplb/snapshot.hpp"
#include "caplb/voxelizer.hpp"
#include "caplb/vtk_writer.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int fail(const std::string& type, const std::string& message, int code) {
    json err;
    err["error"]["type"] = type;
    err["error"]["message"] = message;
    std::cerr << err.dump() << "\n";
    return code;
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

const char* status_name(caplb::RunStatus s) {
    switch (s) {
        case caplb::RunStatus::Converged: return "converged";
        case caplb::RunStatus::MaxSteps: return "max_steps";
        default: return "unstable";
    }
}

json report_to_json(const caplb::RunReport& rep) {
    json j;
    j["status"] = status_name(rep.status);
    j["steps"] = rep.steps;
    j["wall_seconds"] = rep.wall_seconds;
    j["peak_velocity_m_s"] = rep.peak_velocity_m_s;
    j["min_f"] = rep.min_f;
    j["iolet_volume_rate_m3_s"] = rep.iolet_volume_rate_m3_s;
    j["residual_history_tail"] =
        std::vector<double>(rep.residual_history.end() -
                                std::min<std::size_t>(10, rep.residual_history.size()),
                            rep.residual_history.end());
    j["warnings"] = rep.warnings;
    return j;
}

void print_diameter_table(const caplb::VesselSkeleton& skel, double dx_um) {
    std::cout << "lattice-diameter coverage (length-weighted):\n";
    for (double d : {3.0, 5.0, 7.0, 10.0}) {
        const double frac = caplb::diameter_length_fraction_at_least(skel, dx_um, d);
        std::cout << "  D >= " << d << ": " << 100.0 * frac << "%\n";
    }
    const double at7 = caplb::diameter_length_fraction_at_least(skel, dx_um, 7.0);
    std::cout << (at7 >= 0.95 ? "  95% of the network has D >= 7: yes\n"
                              : "  95% of the network has D >= 7: no\n");
}

int cmd_voxelize(const std::string& skeleton_path, double dx, const std::string& out,
                 bool override_min_d) {
    const auto skel = caplb::load_skeleton_json(skeleton_path);
    caplb::VoxelizeOptions opt;
    opt.min_diameter_override = override_min_d;
    caplb::VoxelizeReport rep;
    const auto dom = caplb::voxelize(skel, dx, opt, &rep);
    caplb::save_domain(out, dom);
    std::cout << "fluid sites: " << dom.fluid_count() << "\n";
    std::cout << "wall links: " << dom.wall_links.size()
              << ", iolet links: " << dom.iolet_links.size() << "\n";
    for (const auto& w : rep.warnings) std::cout << "warning: " << w << "\n";
    print_diameter_table(skel, dx);
    std::cout << "domain written to " << out << "\n";
    return 0;
}

int cmd_run(const std::string& config_path) {
    const caplb::SimConfig cfg = caplb::load_sim_config(config_path);

    caplb::VoxelDomain dom;
    if (!cfg.skeleton_path.empty()) {
        const auto skel = caplb::load_skeleton_json(cfg.skeleton_path);
        caplb::VoxelizeOptions opt;
        opt.min_diameter_override = cfg.min_diameter_override;
        dom = caplb::voxelize(skel, cfg.dx_um, opt);
    } else {
        dom = caplb::load_domain(cfg.domain_path);
    }
    if (!cfg.iolet_pressures_mmhg.empty()) {
        if (cfg.iolet_pressures_mmhg.size() != dom.iolets.size())
            throw std::invalid_argument("config: iolet pressure override count mismatch");
        for (std::size_t k = 0; k < dom.iolets.size(); ++k)
            dom.iolets[k].pressure_mmhg = cfg.iolet_pressures_mmhg[k];
    }

    caplb::SimulationSetup setup;
    setup.domain = &dom;
    setup.rheology = cfg.make_rheology();
    setup.bridge = cfg.make_bridge(dom.dx_um);
    setup.convergence.v_ref_m_s = cfg.v_ref_m_s;
    setup.convergence.eps_tol = cfg.eps_tol;
    setup.convergence.check_interval = cfg.check_interval;
    setup.convergence.max_steps = cfg.max_steps;
    setup.threads = cfg.threads;

    const auto result = caplb::run_steady(setup);

    fs::create_directories(cfg.output_dir);
    const auto snap = caplb::make_snapshot(result.fields, dom, setup.bridge, setup.rheology);
    const std::string snap_path = (fs::path(cfg.output_dir) / cfg.snapshot_name).string();
    caplb::save_snapshot(snap_path, snap);
    if (cfg.write_vtk)
        caplb::export_vtk(snap, (fs::path(cfg.output_dir) / "fields").string());

    json j = report_to_json(result.report);
    j["snapshot"] = snap_path;
    j["fluid_sites"] = dom.fluid_count();
    j["dt_s"] = setup.bridge.dt();
    j["rho_kg_m3"] = cfg.rho_kg_m3;
    if (cfg.rho_is_default)
        j["notes"] = "mass density assumed 1000 kg/m3 (not reported in the source data)";
    std::ofstream rep_out(fs::path(cfg.output_dir) / "report.json");
    rep_out << j.dump(2) << "\n";
    std::cout << j.dump(2) << "\n";
    return result.report.status == caplb::RunStatus::Converged ? 0 : 1;
}

int cmd_sweep(const std::string& skeleton_path, double dx, const std::vector<double>& opps,
              double tau, double eta, const std::string& out_csv, int threads) {
    const auto skel = caplb::load_skeleton_json(skeleton_path);
    const auto dom = caplb::voxelize(skel, dx);

    caplb::SimulationSetup setup;
    setup.domain = &dom;
    setup.rheology = caplb::RheologyModel::newtonian(eta, tau);
    setup.bridge = setup.rheology.make_bridge(dx * 1e-6);
    setup.threads = threads;

    const auto sweep = caplb::opp_sweep(setup, opps);

    std::ofstream csv(out_csv);
    csv << "opp_mmhg,peak_velocity_m_s,steps,status\n";
    csv.precision(12);
    for (const auto& p : sweep.points)
        csv << p.opp_mmhg << "," << p.peak_velocity_m_s << "," << p.steps << ","
            << status_name(p.status) << "\n";

    json j;
    j["slope_m_s_per_mmhg"] = sweep.slope_m_s_per_mmhg;
    j["intercept_m_s"] = sweep.intercept_m_s;
    j["r_squared"] = sweep.r_squared;
    j["csv"] = out_csv;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_fit(const std::string& data_csv, const std::string& out_json) {
    const auto samples = caplb::load_viscosity_csv(data_csv);
    const auto fit = caplb::fit_cy(samples, caplb::cy_initial_guess(samples));
    json j;
    j["eta0_pa_s"] = fit.params.eta0;
    j["eta_inf_pa_s"] = fit.params.eta_inf;
    j["lambda_s"] = fit.params.lambda;
    j["a"] = fit.params.a;
    j["n"] = fit.params.n;
    j["rms_pa_s"] = fit.rms;
    j["residuals_pa_s"] = fit.residuals;
    j["evaluations"] = fit.evals;
    if (!out_json.empty()) {
        std::ofstream out(out_json);
        out << j.dump(2) << "\n";
    }
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_histogram(const std::string& skeleton_path, double bin, const std::string& out_csv) {
    const auto skel = caplb::load_skeleton_json(skeleton_path);
    const auto h = caplb::diameter_histogram(skel, bin);
    if (!out_csv.empty()) {
        std::ofstream csv(out_csv);
        csv << "bin_lo_um,bin_hi_um,length_um\n";
        csv.precision(12);
        for (std::size_t b = 0; b + 1 < h.bin_edges_um.size(); ++b)
            csv << h.bin_edges_um[b] << "," << h.bin_edges_um[b + 1] << ","
                << h.length_per_bin_um[b] << "\n";
    }
    json j;
    j["total_length_um"] = h.total_length_um;
    j["lognormal_mu"] = h.lognormal_mu;
    j["lognormal_sigma"] = h.lognormal_sigma;
    j["mode_um"] = h.mode_um;
    j["degenerate"] = h.degenerate;
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_export_vtk(const std::string& snapshot_path, const std::string& prefix) {
    const auto snap = caplb::load_snapshot(snapshot_path);
    caplb::export_vtk(snap, prefix);
    std::cout << "wrote " << prefix << "_fields.vtk and " << prefix << "_wss.vtk\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"capillary-network lattice-Boltzmann flow engine"};
    app.require_subcommand(1);

    // voxelize
    std::string skeleton_path, out_path, config_path;
    double dx = 0.5;
    bool min_d_override = false;
    auto* vox = app.add_subcommand("voxelize", "skeleton JSON -> classified CLBD domain");
    vox->add_option("--skeleton", skeleton_path)->required();
    vox->add_option("--dx", dx, "voxel size in um")->required();
    vox->add_option("--out", out_path)->required();
    vox->add_flag("--min-d-override", min_d_override,
                  "voxelize even when a segment is thinner than 3 dx");

    // run
    bool print_schema = false;
    auto* run = app.add_subcommand("run", "steady pressure-drop simulation from a config");
    run->add_option("--config", config_path);
    run->add_flag("--print-schema", print_schema, "print the config JSON schema and exit");

    // bench
    auto* bench = app.add_subcommand("bench", "inclined-cylinder verification suites");
    bench->require_subcommand(1);
    std::string bench_out = "bench.csv";
    std::string d_list = "3,5,7,10,15,20,30", tau_list = "0.8";
    bool gnuplot = false, bench_cy = false;
    int bench_threads = 0;
    auto* poise = bench->add_subcommand("poiseuille", "flow-rate error vs diameter");
    poise->add_option("--D", d_list, "lattice diameters, comma separated");
    poise->add_option("--tau", tau_list, "relaxation times, comma separated");
    poise->add_option("--out", bench_out);
    poise->add_flag("--gnuplot", gnuplot, "whitespace-separated output");
    poise->add_flag("--carreau-yasuda", bench_cy, "shear-thinning rheology");
    poise->add_option("--threads", bench_threads);
    std::string shear_out = "shear.csv", shear_d = "5,7,15";
    double shear_tau = 0.8;
    auto* shear = bench->add_subcommand("shear", "wall shear-stress error vs diameter");
    shear->add_option("--D", shear_d);
    shear->add_option("--tau", shear_tau);
    shear->add_option("--out", shear_out);
    shear->add_flag("--gnuplot", gnuplot);
    shear->add_option("--threads", bench_threads);
    double refine_d_um = 5.0, refine_dx0 = 1.0, refine_tau = 0.8;
    int refine_levels = 3;
    std::string refine_out = "refine.csv";
    auto* refine = bench->add_subcommand("refine", "dyadic grid-refinement study");
    refine->add_option("--diameter-um", refine_d_um);
    refine->add_option("--dx0", refine_dx0, "coarsest voxel size in um");
    refine->add_option("--levels", refine_levels);
    refine->add_option("--tau", refine_tau);
    refine->add_option("--out", refine_out);
    refine->add_option("--threads", bench_threads);

    // sweep-opp
    std::string sweep_skeleton, sweep_out = "sweep.csv", opp_list = "25,35,45,55,65";
    double sweep_dx = 1.0, sweep_tau = 0.8, sweep_eta = 3.265e-3;
    int sweep_threads = 0;
    auto* sweep = app.add_subcommand("sweep-opp", "peak velocity vs perfusion pressure");
    sweep->add_option("--skeleton", sweep_skeleton)->required();
    sweep->add_option("--dx", sweep_dx);
    sweep->add_option("--list", opp_list, "OPP values in mmHg, comma separated");
    sweep->add_option("--tau", sweep_tau);
    sweep->add_option("--eta", sweep_eta, "Newtonian viscosity in Pa s");
    sweep->add_option("--out", sweep_out);
    sweep->add_option("--threads", sweep_threads);

    // fit-rheology
    std::string fit_data, fit_out;
    auto* fit = app.add_subcommand("fit-rheology", "Carreau-Yasuda fit of a viscosity CSV");
    fit->add_option("--data", fit_data)->required();
    fit->add_option("--out", fit_out, "write the fitted parameters to this JSON file");

    // histogram
    std::string hist_skeleton, hist_out;
    double hist_bin = 0.5;
    auto* hist = app.add_subcommand("histogram", "length-weighted network diameter histogram");
    hist->add_option("--skeleton", hist_skeleton)->required();
    hist->add_option("--bin", hist_bin, "bin width in um");
    hist->add_option("--out", hist_out, "CSV output path");

    // gen
    auto* gen = app.add_subcommand("gen", "synthetic skeleton generators");
    gen->require_subcommand(1);
    std::string gen_out = "skeleton.json";
    double gen_d = 7.0, gen_dx = 1.0;
    auto* gen_cyl = gen->add_subcommand("cylinder", "inclined benchmark cylinder");
    gen_cyl->add_option("--D", gen_d, "diameter in lattice units at --dx");
    gen_cyl->add_option("--dx", gen_dx, "voxel size the diameter refers to (um)");
    gen_cyl->add_option("--out", gen_out)->required();
    unsigned plexus_seed = 20140512;
    auto* gen_plex = gen->add_subcommand("plexus", "synthetic capillary mini-plexus");
    gen_plex->add_option("--seed", plexus_seed);
    gen_plex->add_option("--out", gen_out)->required();

    // export-vtk
    std::string vtk_snapshot, vtk_prefix = "fields";
    auto* vtk = app.add_subcommand("export-vtk", "CLBS snapshot -> legacy VTK files");
    vtk->add_option("--snapshot", vtk_snapshot)->required();
    vtk->add_option("--prefix", vtk_prefix);

    CLI11_PARSE(app, argc, argv);

    try {
        if (vox->parsed()) return cmd_voxelize(skeleton_path, dx, out_path, min_d_override);
        if (run->parsed()) {
            if (print_schema) {
                std::cout << caplb::sim_config_schema() << "\n";
                return 0;
            }
            if (config_path.empty())
                return fail("usage", "run requires --config (or --print-schema)", 1);
            return cmd_run(config_path);
        }
        if (bench->parsed()) {
            caplb::BenchmarkOptions opt;
            opt.threads = bench_threads;
            if (poise->parsed()) {
                opt.carreau_yasuda = bench_cy;
                const auto rows =
                    caplb::run_benchmark_suite(parse_list(d_list), parse_list(tau_list), opt);
                caplb::write_benchmark_csv(bench_out, rows, gnuplot);
                for (const auto& r : rows)
                    std::cout << "D=" << r.diameter_lat << " tau=" << r.tau
                              << " eps_q=" << r.eps_q << " steps=" << r.steps << "\n";
                return 0;
            }
            if (shear->parsed()) {
                const auto rows =
                    caplb::run_benchmark_suite(parse_list(shear_d), {shear_tau}, opt);
                caplb::write_benchmark_csv(shear_out, rows, gnuplot);
                for (const auto& r : rows)
                    std::cout << "D=" << r.diameter_lat << " eps_T_wall=" << r.eps_t_wall
                              << "\n";
                return 0;
            }
            if (refine->parsed()) {
                const auto res = caplb::grid_refinement_study(refine_d_um, refine_dx0,
                                                              refine_levels, refine_tau, opt);
                std::ofstream csv(refine_out);
                csv << "dx_um,eps_u,steps\n";
                csv.precision(12);
                for (std::size_t k = 0; k < res.dx_um.size(); ++k)
                    csv << res.dx_um[k] << "," << res.eps[k] << "," << res.steps[k] << "\n";
                json j;
                j["slope"] = res.slope;
                j["csv"] = refine_out;
                std::cout << j.dump(2) << "\n";
                return 0;
            }
        }
        if (sweep->parsed())
            return cmd_sweep(sweep_skeleton, sweep_dx, parse_list(opp_list), sweep_tau,
                             sweep_eta, sweep_out, sweep_threads);
        if (fit->parsed()) return cmd_fit(fit_data, fit_out);
        if (hist->parsed()) return cmd_histogram(hist_skeleton, hist_bin, hist_out);
        if (gen->parsed()) {
            if (gen_cyl->parsed()) {
                caplb::save_skeleton_json(
                    gen_out, caplb::make_cylinder_skeleton(gen_d * gen_dx,
                                                           caplb::benchmark_axis()));
            } else {
                caplb::MiniPlexusOptions mp;
                mp.seed = plexus_seed;
                caplb::save_skeleton_json(gen_out, caplb::make_mini_plexus(mp));
            }
            std::cout << "skeleton written to " << gen_out << "\n";
            return 0;
        }
        if (vtk->parsed()) {
            try {
                return cmd_export_vtk(vtk_snapshot, vtk_prefix);
            } catch (const std::exception& e) {
                return fail("vtk_export", e.what(), 4);
            }
        }
    } catch (const caplb::SkeletonParseError& e) {
        return fail("skeleton_schema",
                    std::string(e.what()) + " (line " + std::to_string(e.line) + ", column " +
                        std::to_string(e.column) + ")",
                    2);
    } catch (const caplb::MinDiameterError& e) {
        return fail("min_diameter", e.what(), 3);
    } catch (const std::exception& e) {
        return fail("runtime", e.what(), 1);
    }
    return 0;
}
