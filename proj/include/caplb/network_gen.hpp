#ifndef CAPLB_NETWORK_GEN_HPP
#define CAPLB_NETWORK_GEN_HPP

/// Synthetic skeleton generators: the inclined benchmark cylinder and a
/// deterministic capillary "mini-plexus" (one feeding artery, one draining
/// vein, a looped capillary mesh between them).

#include "caplb/skeleton.hpp"

namespace caplb {

/// Two-node cylinder of diameter D and length L = 4D centred at the
/// origin, axis `axis`; the inlet sits at the +axis end. Units um.
VesselSkeleton make_cylinder_skeleton(double diameter_um, const Eigen::Vector3d& axis,
                                      double inlet_pressure_mmhg = 0.0,
                                      double outlet_pressure_mmhg = 0.0,
                                      double length_over_diameter = 4.0);

struct MiniPlexusOptions {
    int rows = 8;
    int cols = 12;
    double spacing_um = 14.0;
    double capillary_radius_um = 2.5;   // +- jitter
    double artery_radius_um = 5.0;
    double vein_radius_um = 6.0;
    double inlet_pressure_mmhg = 68.2;
    double outlet_pressure_mmhg = 11.6;
    unsigned seed = 20140512;
};

/// ~200-segment planar network: capillary grid with loops, fed on the -x
/// side by an artery and drained on the +x side by a vein. Terminal
/// segments are axis-aligned so iolet planes are lattice planes.
VesselSkeleton make_mini_plexus(const MiniPlexusOptions& options = {});

}  // namespace caplb

#endif
