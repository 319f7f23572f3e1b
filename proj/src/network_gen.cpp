#include "caplb/network_gen.hpp"

#include <cmath>
#include <random>

namespace caplb {

VesselSkeleton make_cylinder_skeleton(double diameter_um, const Eigen::Vector3d& axis,
                                      double inlet_pressure_mmhg,
                                      double outlet_pressure_mmhg,
                                      double length_over_diameter) {
    if (!(diameter_um > 0.0))
        throw std::invalid_argument("make_cylinder_skeleton: diameter must be positive");
    const Eigen::Vector3d a = axis.normalized();
    const double half = 0.5 * length_over_diameter * diameter_um;
    VesselSkeleton s;
    s.nodes.push_back({0, -half * a, 0.5 * diameter_um});
    s.nodes.push_back({1, half * a, 0.5 * diameter_um});
    s.edges.emplace_back(0, 1);
    s.iolets.push_back({1, IoletKind::Inlet, inlet_pressure_mmhg});
    s.iolets.push_back({0, IoletKind::Outlet, outlet_pressure_mmhg});
    return s;
}

VesselSkeleton make_mini_plexus(const MiniPlexusOptions& opt) {
    std::mt19937 rng(opt.seed);
    std::uniform_real_distribution<double> jitter(-0.2, 0.2);
    std::uniform_real_distribution<double> rjit(-0.5, 0.7);

    VesselSkeleton s;
    const double h = opt.spacing_um;
    auto grid_id = [&](int r, int c) { return r * opt.cols + c; };

    // capillary mesh nodes, jittered positions and radii
    for (int r = 0; r < opt.rows; ++r) {
        for (int c = 0; c < opt.cols; ++c) {
            SkeletonNode n;
            n.id = grid_id(r, c);
            n.pos_um = {c * h + jitter(rng) * h, r * h + jitter(rng) * h, 0.0};
            n.radius_um = opt.capillary_radius_um + rjit(rng);
            s.nodes.push_back(n);
        }
    }
    for (int r = 0; r < opt.rows; ++r)
        for (int c = 0; c + 1 < opt.cols; ++c)
            s.edges.emplace_back(grid_id(r, c), grid_id(r, c + 1));
    for (int r = 0; r + 1 < opt.rows; ++r)
        for (int c = 0; c < opt.cols; ++c) {
            // drop a few rungs to vary the loop structure
            if ((r * 7 + c * 5) % 11 == 3) continue;
            s.edges.emplace_back(grid_id(r, c), grid_id(r + 1, c));
        }

    // feeding artery on the -x side: terminal segment along +x
    const int mid = opt.rows / 2;
    const double ymid = mid * h;
    int next_id = opt.rows * opt.cols;
    const int a_hub = next_id++;
    const int a_term = next_id++;
    s.nodes.push_back({a_hub, {-1.5 * h, ymid, 0.0}, opt.artery_radius_um});
    s.nodes.push_back({a_term, {-3.5 * h, ymid, 0.0}, opt.artery_radius_um});
    s.edges.emplace_back(a_term, a_hub);
    for (int r : {mid - 2, mid, mid + 2}) {
        if (r < 0 || r >= opt.rows) continue;
        const int branch = next_id++;
        s.nodes.push_back({branch,
                           {-0.6 * h, r * h, 0.0},
                           0.5 * (opt.artery_radius_um + opt.capillary_radius_um)});
        s.edges.emplace_back(a_hub, branch);
        s.edges.emplace_back(branch, grid_id(r, 0));
    }

    // draining vein on the +x side: terminal segment along +x as well
    const double xr = (opt.cols - 1) * h;
    const int v_hub = next_id++;
    const int v_term = next_id++;
    s.nodes.push_back({v_hub, {xr + 1.5 * h, ymid, 0.0}, opt.vein_radius_um});
    s.nodes.push_back({v_term, {xr + 3.5 * h, ymid, 0.0}, opt.vein_radius_um});
    s.edges.emplace_back(v_hub, v_term);
    for (int r : {mid - 2, mid, mid + 2}) {
        if (r < 0 || r >= opt.rows) continue;
        const int branch = next_id++;
        s.nodes.push_back({branch,
                           {xr + 0.6 * h, r * h, 0.0},
                           0.5 * (opt.vein_radius_um + opt.capillary_radius_um)});
        s.edges.emplace_back(grid_id(r, opt.cols - 1), branch);
        s.edges.emplace_back(branch, v_hub);
    }

    s.iolets.push_back({a_term, IoletKind::Inlet, opt.inlet_pressure_mmhg});
    s.iolets.push_back({v_term, IoletKind::Outlet, opt.outlet_pressure_mmhg});
    s.validate();
    return s;
}

}  // namespace caplb
