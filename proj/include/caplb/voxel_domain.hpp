#ifndef CAPLB_VOXEL_DOMAIN_HPP
#define CAPLB_VOXEL_DOMAIN_HPP

/// Classified regular-grid flow domain produced by the voxelizer. Site
/// centres sit on the integer lattice scaled by dx: centre = (offset + idx)*dx,
/// which makes voxelization exactly translation-consistent for shifts by
/// whole multiples of dx.

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "caplb/lattice.hpp"
#include "caplb/skeleton.hpp"

namespace caplb {

enum class SiteClass : std::uint8_t { Solid = 0, Fluid = 1, WallAdjacent = 2, Iolet = 3 };

struct WallLink {
    std::int64_t site = 0;                 // fluid site ordinal
    std::uint8_t dir = 0;                  // D3Q15 direction toward the wall
    double q = 0.0;                        // wall fraction along the link, (0,1]
    Eigen::Vector3d normal = Eigen::Vector3d::Zero();   // outward unit normal
};

struct IoletLink {
    std::int64_t site = 0;
    std::uint8_t dir = 0;                  // direction crossing the iolet plane
    std::uint16_t iolet = 0;
    Eigen::Vector3d intersection_um = Eigen::Vector3d::Zero();  // link x plane
};

struct IoletPlane {
    Eigen::Vector3d point_um = Eigen::Vector3d::Zero();
    Eigen::Vector3d normal = Eigen::Vector3d::Zero();   // outward
    IoletKind kind = IoletKind::Inlet;
    double pressure_mmhg = 0.0;
    double radius_um = 0.0;                // terminal segment radius
};

class VoxelDomain {
public:
    Eigen::Vector3i dims = Eigen::Vector3i::Zero();
    Eigen::Vector3i offset = Eigen::Vector3i::Zero();   // integer-lattice origin
    double dx_um = 0.0;
    Eigen::Vector3i periodic_axes = Eigen::Vector3i::Zero();   // test domains only

    std::vector<SiteClass> site_class;     // dense, x fastest
    std::vector<std::int64_t> fluid_of_cell;  // dense -> fluid ordinal or -1
    std::vector<std::int64_t> cell_of_fluid;  // fluid ordinal -> dense cell
    std::vector<WallLink> wall_links;
    std::vector<IoletLink> iolet_links;
    std::vector<IoletPlane> iolets;

    std::int64_t cell_count() const {
        return std::int64_t(dims.x()) * dims.y() * dims.z();
    }
    std::int64_t fluid_count() const { return std::int64_t(cell_of_fluid.size()); }

    std::int64_t cell_index(int ix, int iy, int iz) const {
        return (std::int64_t(iz) * dims.y() + iy) * dims.x() + ix;
    }
    Eigen::Vector3i cell_coords(std::int64_t cell) const {
        const int ix = int(cell % dims.x());
        const int iy = int((cell / dims.x()) % dims.y());
        const int iz = int(cell / (std::int64_t(dims.x()) * dims.y()));
        return {ix, iy, iz};
    }
    bool in_grid(const Eigen::Vector3i& c) const {
        return (c.array() >= 0).all() && (c.array() < dims.array()).all();
    }

    /// Site centre in micrometres.
    Eigen::Vector3d site_center_um(std::int64_t fluid) const {
        const Eigen::Vector3i c = cell_coords(cell_of_fluid[fluid]);
        return ((offset + c).cast<double>()) * dx_um;
    }
    /// Global integer coordinates of a fluid site (centre / dx).
    Eigen::Vector3i site_lattice_coords(std::int64_t fluid) const {
        return offset + cell_coords(cell_of_fluid[fluid]);
    }

    /// Fluid ordinal of the neighbour along D3Q15 direction i, or -1.
    /// Wraps when the domain is periodic.
    std::int64_t neighbor(std::int64_t fluid, int i) const;

    /// Dense neighbour table, nf x 15, -1 for missing links.
    std::vector<std::int64_t> build_neighbor_table() const;

    void rebuild_fluid_lists();            // from site_class
};

/// All-fluid box for kernel tests; periodic wrapping optional (all axes).
VoxelDomain make_box_domain(int nx, int ny, int nz, bool periodic, double dx_um = 1.0);

/// All-fluid box periodic only along the chosen axes.
VoxelDomain make_box_domain_axes(int nx, int ny, int nz, const Eigen::Vector3i& periodic_axes,
                                 double dx_um = 1.0);

/// Closed all-wall box: fluid interior, bounce-back walls at q = 1/2.
VoxelDomain make_closed_box_domain(int nx, int ny, int nz, double dx_um = 1.0);

}  // namespace caplb

#endif
