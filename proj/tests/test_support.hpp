#ifndef CAPLB_TEST_SUPPORT_HPP
#define CAPLB_TEST_SUPPORT_HPP

#include "caplb/boundaries.hpp"
#include "caplb/voxelizer.hpp"

namespace caplb::testing {

/// Channel across z: periodic in x and y, plain bounce-back at the bottom,
/// and either a bounce-back wall or a velocity opening at the top.
inline VoxelDomain make_channel(int n, int height, bool top_is_velocity_iolet) {
    VoxelDomain d = make_box_domain_axes(n, n, height, {1, 1, 0});
    for (std::int64_t f = 0; f < d.fluid_count(); ++f) {
        for (int i = 1; i < D3Q15::Q; ++i) {
            if (d.neighbor(f, i) >= 0) continue;
            const bool top = D3Q15::c[i][2] > 0;
            if (top && top_is_velocity_iolet) {
                IoletLink il;
                il.site = f;
                il.dir = std::uint8_t(i);
                il.iolet = 0;
                il.intersection_um = d.site_center_um(f) + 0.5 * D3Q15::dir(i) * d.dx_um;
                d.iolet_links.push_back(il);
            } else {
                WallLink wl;
                wl.site = f;
                wl.dir = std::uint8_t(i);
                wl.q = 0.5;
                wl.normal = Eigen::Vector3d(0, 0, top ? 1.0 : -1.0);
                d.wall_links.push_back(wl);
            }
        }
    }
    if (top_is_velocity_iolet) {
        IoletPlane plane;
        plane.point_um = {0, 0, (height - 0.5) * d.dx_um};
        plane.normal = {0, 0, 1};
        plane.kind = IoletKind::Inlet;
        d.iolets.push_back(plane);
    }
    return d;
}

/// Axis-aligned tube along z with pressure openings at both ends.
inline VesselSkeleton make_tube_skeleton(double radius, double half_length,
                                         double inlet_mmhg = 0.0, double outlet_mmhg = 0.0) {
    VesselSkeleton s;
    s.nodes.push_back({0, {0.2, 0.4, -half_length}, radius});
    s.nodes.push_back({1, {0.2, 0.4, half_length}, radius});
    s.edges.emplace_back(0, 1);
    s.iolets.push_back({1, IoletKind::Inlet, inlet_mmhg});
    s.iolets.push_back({0, IoletKind::Outlet, outlet_mmhg});
    return s;
}

inline void step_once(LatticeState& st, const std::vector<std::int64_t>& nbr,
                      const BoundarySet& bset, const Eigen::Vector3d& g,
                      MacroFields& macro) {
    collide(st, g, false, &macro, 1);
    stream(st, nbr, 1);
    bset.apply(st, macro.v, 1);
    st.swap_buffers();
}

}  // namespace caplb::testing

#endif
