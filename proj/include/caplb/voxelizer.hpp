#ifndef CAPLB_VOXELIZER_HPP
#define CAPLB_VOXELIZER_HPP

/// Skeleton -> voxel domain conversion: implicit capsule-union surface,
/// site classification, sub-grid wall fractions for the interpolated
/// bounce-back, and network diameter statistics.

#include <stdexcept>
#include <string>
#include <vector>

#include "caplb/voxel_domain.hpp"

namespace caplb {

/// Signed distance (um) to the capsule-union luminal surface: negative
/// inside the lumen, exact for a single capsule, union via the minimum.
double implicit_distance(const VesselSkeleton& skeleton, const Eigen::Vector3d& point_um);

struct MinDiameterError : std::invalid_argument {
    MinDiameterError(const std::string& what, int edge_index, double diameter_um)
        : std::invalid_argument(what), edge_index(edge_index), diameter_um(diameter_um) {}
    int edge_index = -1;
    double diameter_um = 0.0;
};

struct VoxelizeOptions {
    bool min_diameter_override = false;   // skip the D >= 3 dx check
    int padding_sites = 2;
};

struct VoxelizeReport {
    std::int64_t culled_regions = 0;
    std::int64_t culled_sites = 0;
    std::int64_t bounce_back_fallback_links = 0;  // wall links without fluid upstream
    std::vector<std::string> warnings;
};

/// Classifies sites against the capsule union, cuts iolet openings
/// perpendicular to the terminal segments, culls fluid regions that reach
/// no iolet, and extracts wall-link fractions and surface normals.
VoxelDomain voxelize(const VesselSkeleton& skeleton, double dx_um,
                     const VoxelizeOptions& options = {}, VoxelizeReport* report = nullptr);

struct DiameterHistogram {
    std::vector<double> bin_edges_um;     // size bins+1
    std::vector<double> length_per_bin_um;
    double total_length_um = 0.0;
    double lognormal_mu = 0.0;            // of diameter in um
    double lognormal_sigma = 0.0;
    double mode_um = 0.0;                 // exp(mu - sigma^2)
    bool degenerate = false;              // single-diameter network
};

/// Length-weighted diameter histogram with a maximum-likelihood lognormal
/// fit; the distribution mode estimates the typical capillary diameter.
DiameterHistogram diameter_histogram(const VesselSkeleton& skeleton, double bin_width_um);

/// Fraction of total centreline length with lattice diameter >= d_lat.
double diameter_length_fraction_at_least(const VesselSkeleton& skeleton, double dx_um,
                                         double d_lat);

}  // namespace caplb

#endif
