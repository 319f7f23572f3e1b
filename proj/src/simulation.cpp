#include "caplb/simulation.hpp"

#include <chrono>
#include <cmath>

#include "caplb/parallel.hpp"

namespace caplb {

std::vector<IoletBC> pressure_bcs_from_domain(const VoxelDomain& domain,
                                              const UnitBridge& bridge,
                                              double* reference_mmhg) {
    if (domain.iolets.empty())
        throw std::invalid_argument("pressure_bcs_from_domain: domain has no iolets");
    double reference = std::numeric_limits<double>::max();
    bool have_outlet = false;
    for (const auto& io : domain.iolets) {
        if (io.kind == IoletKind::Outlet) {
            reference = std::min(reference, io.pressure_mmhg);
            have_outlet = true;
        }
    }
    if (!have_outlet) {
        for (const auto& io : domain.iolets) reference = std::min(reference, io.pressure_mmhg);
    }
    std::vector<IoletBC> bcs;
    for (const auto& io : domain.iolets) {
        IoletBC bc;
        bc.is_velocity = false;
        bc.rho_target = bridge.pressure_to_lattice_density(io.pressure_mmhg, reference);
        bcs.push_back(bc);
    }
    if (reference_mmhg) *reference_mmhg = reference;
    return bcs;
}

namespace {

/// Sites within one lattice layer of an iolet opening, excluded from the
/// peak-velocity report.
std::vector<char> iolet_margin_mask(const VoxelDomain& domain,
                                    const std::vector<std::int64_t>& nbr) {
    std::vector<char> mask(domain.fluid_count(), 0);
    for (const auto& il : domain.iolet_links) mask[il.site] = 1;
    std::vector<char> grown = mask;
    for (std::int64_t s = 0; s < domain.fluid_count(); ++s) {
        if (!mask[s]) continue;
        for (int i = 1; i < D3Q15::Q; ++i) {
            const std::int64_t n = nbr[s * D3Q15::Q + i];
            if (n >= 0) grown[n] = 1;
        }
    }
    return grown;
}

double peak_speed_lat(const MacroFields& fields, const std::vector<char>& exclude) {
    double peak = 0.0;
    for (std::int64_t s = 0; s < fields.v.cols(); ++s) {
        if (!exclude.empty() && exclude[s]) continue;
        peak = std::max(peak, fields.v.col(s).norm());
    }
    return peak;
}

}  // namespace

double peak_velocity_m_s(const MacroFields& fields, const VoxelDomain& domain,
                         const UnitBridge& bridge) {
    const auto nbr = domain.build_neighbor_table();
    const auto mask = iolet_margin_mask(domain, nbr);
    return bridge.velocity_to_physical(peak_speed_lat(fields, mask));
}

SteadyRunResult run_steady(const SimulationSetup& setup) {
    if (!setup.domain) throw std::invalid_argument("run_steady: no domain");
    const VoxelDomain& dom = *setup.domain;
    const int threads = resolve_threads(setup.threads);
    const auto t_start = std::chrono::steady_clock::now();

    const auto nbr = dom.build_neighbor_table();
    std::vector<IoletBC> bcs = setup.iolet_bcs;
    if (bcs.empty() && !dom.iolets.empty())
        bcs = pressure_bcs_from_domain(dom, setup.bridge);
    const BoundarySet bset = BoundarySet::build(dom, nbr, bcs);

    const TauLaw law = TauLaw::from_model(setup.rheology, setup.bridge);
    if (!(law(0.0) > 0.5))
        throw InstabilityError("relaxation time at rest <= 1/2", 0);

    LatticeState st(dom.fluid_count());
    st.initialize_rest(1.0);
    st.tau.setConstant(law(0.0));

    MacroFields macro;
    macro.resize(st.size());
    MacroFields saved;       // fields at the previous check (last stable)
    saved.resize(st.size());
    // velocity one step before a check, for the per-step change criterion
    Eigen::Matrix3Xd v_before = Eigen::Matrix3Xd::Zero(3, st.size());

    const double v_ref_lat = setup.bridge.velocity_to_lattice(setup.convergence.v_ref_m_s);
    const std::int64_t interval = std::max<std::int64_t>(1, setup.convergence.check_interval);

    SteadyRunResult result;
    RunReport& rep = result.report;
    rep.min_f = 0.0;
    bool negative_f_warned = false;

    const std::int64_t blocks = num_blocks(st.size());
    std::vector<double> block_max(blocks, 0.0);

    std::int64_t step = 0;
    while (step < setup.convergence.max_steps) {
        ++step;
        if (law.variable) {
            parallel_for_blocks(st.size(), threads,
                                [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
                                    for (std::int64_t s = lo; s < hi; ++s)
                                        st.tau(s) = law(st.gamma_dot(s));
                                });
        }
        collide(st, setup.body_accel_lat, law.variable, &macro, threads);
        stream(st, nbr, threads);
        bset.apply(st, macro.v, threads);

        const bool at_check =
            step % interval == 0 && step >= std::max<std::int64_t>(2, interval);

        if (at_check) {
            rep.iolet_volume_rate_m3_s.assign(dom.iolets.size(), 0.0);
            const auto outflow = bset.iolet_mass_outflow(st);
            const double vol_scale = std::pow(setup.bridge.dx(), 3) / setup.bridge.dt();
            for (std::size_t k = 0; k < outflow.size(); ++k)
                rep.iolet_volume_rate_m3_s[k] = outflow[k] * vol_scale;
        }

        if (at_check) {
            // per-step velocity change: macro.v is the pre-collision state
            // of this step, v_before the one saved a step earlier
            parallel_for_blocks(st.size(), threads,
                                [&](std::int64_t lo, std::int64_t hi, std::int64_t b) {
                                    double m = 0.0;
                                    for (std::int64_t s = lo; s < hi; ++s)
                                        m = std::max(m,
                                                     (macro.v.col(s) - v_before.col(s)).norm());
                                    block_max[b] = m;
                                });
            double residual = 0.0;
            for (std::int64_t b = 0; b < blocks; ++b)
                residual = std::max(residual, block_max[b]);
            residual /= v_ref_lat;
            rep.residual_history.push_back(residual);
            st.swap_buffers();

            const double fmin = st.current().minCoeff();
            rep.min_f = std::min(rep.min_f, fmin);
            if (fmin < 0.0 && !negative_f_warned) {
                rep.warnings.push_back("negative distribution value " + std::to_string(fmin) +
                                       " at step " + std::to_string(step));
                negative_f_warned = true;
            }
            bool stable = std::isfinite(fmin) && std::isfinite(residual);
            if (stable) {
                compute_shear(st.current(), st.tau, setup.body_accel_lat, macro, threads);
                stable = macro.rho.allFinite() && (macro.rho > 0.0).all();
            }
            if (!stable) {
                rep.status = RunStatus::Unstable;
                rep.steps = step;
                rep.warnings.push_back("instability detected at step " + std::to_string(step) +
                                       "; returning fields from the previous check");
                result.fields = saved;
                break;
            }
            saved = macro;

            if (residual < setup.convergence.eps_tol) {
                rep.status = RunStatus::Converged;
                rep.steps = step;
                result.fields = macro;
                break;
            }
        } else {
            st.swap_buffers();
        }
        if ((step + 1) % interval == 0) v_before = macro.v;
    }

    if (rep.steps == 0) {   // loop exhausted without converging or blowing up
        rep.status = RunStatus::MaxSteps;
        rep.steps = step;
        compute_shear(st.current(), st.tau, setup.body_accel_lat, macro, threads);
        result.fields = macro;
    }

    const auto mask = iolet_margin_mask(dom, nbr);
    rep.peak_velocity_m_s =
        setup.bridge.velocity_to_physical(peak_speed_lat(result.fields, mask));
    rep.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return result;
}

FlowRate flow_rate(const MacroFields& fields, const VoxelDomain& domain,
                   const UnitBridge& bridge, int axis, int plane_coord,
                   const std::function<bool(const Eigen::Vector3d&)>& filter) {
    if (axis < 0 || axis > 2) throw std::invalid_argument("flow_rate: axis must be 0, 1 or 2");
    if (plane_coord < domain.offset(axis) ||
        plane_coord >= domain.offset(axis) + domain.dims(axis))
        throw std::invalid_argument("flow_rate: plane outside the domain");

    FlowRate q;
    for (std::int64_t s = 0; s < domain.fluid_count(); ++s) {
        if (domain.site_lattice_coords(s)(axis) != plane_coord) continue;
        if (filter && !filter(domain.site_center_um(s))) continue;
        q.lattice += fields.v(axis, s);
        ++q.sites;
    }
    q.physical_m3_s = q.lattice * bridge.velocity_scale() * bridge.dx() * bridge.dx();
    return q;
}

std::vector<WssRecord> traction_field(const MacroFields& fields, const VoxelDomain& domain,
                                      const UnitBridge& bridge,
                                      const RheologyModel& rheology) {
    std::vector<WssRecord> out;
    out.reserve(domain.wall_links.size());
    const double inv_dt = 1.0 / bridge.dt();
    for (const auto& wl : domain.wall_links) {
        WssRecord r;
        r.position_um = domain.site_center_um(wl.site) +
                        wl.q * D3Q15::dir(wl.dir) * domain.dx_um;
        r.normal = -wl.normal;   // wall-surface normal, pointing into the fluid
        const double gamma_phys = fields.gamma_dot(wl.site) * inv_dt;
        const double eta = rheology.viscosity(gamma_phys);
        const Eigen::Matrix3d S_phys = sym3_to_matrix(fields.S.col(wl.site)) * inv_dt;
        r.traction_pa = 2.0 * eta * S_phys * r.normal;
        r.wss_pa = r.traction_pa.norm();
        out.push_back(r);
    }
    return out;
}

OppSweepResult opp_sweep(const SimulationSetup& base, const std::vector<double>& opp_mmhg) {
    if (opp_mmhg.size() < 3)
        throw std::invalid_argument("opp_sweep: need at least 3 OPP values");
    if (!base.domain) throw std::invalid_argument("opp_sweep: no domain");
    const VoxelDomain& dom = *base.domain;

    double reference = std::numeric_limits<double>::max();
    for (const auto& io : dom.iolets)
        if (io.kind == IoletKind::Outlet) reference = std::min(reference, io.pressure_mmhg);
    if (reference == std::numeric_limits<double>::max())
        throw std::invalid_argument("opp_sweep: domain has no outlet");

    OppSweepResult result;
    for (const double opp : opp_mmhg) {
        SimulationSetup setup = base;
        setup.iolet_bcs.clear();
        for (const auto& io : dom.iolets) {
            IoletBC bc;
            bc.is_velocity = false;
            const double p = io.kind == IoletKind::Inlet ? reference + opp : io.pressure_mmhg;
            bc.rho_target = setup.bridge.pressure_to_lattice_density(p, reference);
            setup.iolet_bcs.push_back(bc);
        }
        SteadyRunResult run = run_steady(setup);
        OppPoint pt;
        pt.opp_mmhg = opp;
        pt.peak_velocity_m_s = run.report.peak_velocity_m_s;
        pt.status = run.report.status;
        pt.steps = run.report.steps;
        result.points.push_back(pt);
    }

    // least-squares line through (opp, peak velocity)
    const std::size_t n = result.points.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : result.points) {
        sx += p.opp_mmhg;
        sy += p.peak_velocity_m_s;
        sxx += p.opp_mmhg * p.opp_mmhg;
        sxy += p.opp_mmhg * p.peak_velocity_m_s;
    }
    const double denom = double(n) * sxx - sx * sx;
    result.slope_m_s_per_mmhg = (double(n) * sxy - sx * sy) / denom;
    result.intercept_m_s = (sy - result.slope_m_s_per_mmhg * sx) / double(n);
    double ss_res = 0, ss_tot = 0;
    const double mean_y = sy / double(n);
    for (const auto& p : result.points) {
        const double fit = result.slope_m_s_per_mmhg * p.opp_mmhg + result.intercept_m_s;
        ss_res += (p.peak_velocity_m_s - fit) * (p.peak_velocity_m_s - fit);
        ss_tot += (p.peak_velocity_m_s - mean_y) * (p.peak_velocity_m_s - mean_y);
    }
    result.r_squared = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return result;
}

}  // namespace caplb
