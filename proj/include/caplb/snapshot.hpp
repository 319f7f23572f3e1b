#ifndef CAPLB_SNAPSHOT_HPP
#define CAPLB_SNAPSHOT_HPP

/// Converged field snapshot in physical units, one record per fluid site
/// plus one wall-shear record per wall link. Binary format "CLBS" v1.

#include <string>

#include "caplb/simulation.hpp"

namespace caplb {

struct FieldSnapshot {
    Eigen::Vector3i dims = Eigen::Vector3i::Zero();
    Eigen::Vector3i offset = Eigen::Vector3i::Zero();
    double dx_um = 0.0;

    // per fluid site
    Eigen::Matrix<std::int32_t, 3, Eigen::Dynamic> coords;   // global lattice
    Eigen::ArrayXd density_lat;        // lattice density (masking + diagnostics)
    Eigen::ArrayXd pressure_pa;        // offset from the reference pressure
    Eigen::Matrix3Xd velocity_m_s;
    Eigen::ArrayXd shear_rate_per_s;

    std::vector<WssRecord> wss;

    std::int64_t site_count() const { return coords.cols(); }
};

FieldSnapshot make_snapshot(const MacroFields& fields, const VoxelDomain& domain,
                            const UnitBridge& bridge, const RheologyModel& rheology);

void save_snapshot(const std::string& path, const FieldSnapshot& snap);
FieldSnapshot load_snapshot(const std::string& path);

}  // namespace caplb

#endif
