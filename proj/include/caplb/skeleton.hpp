#ifndef CAPLB_SKELETON_HPP
#define CAPLB_SKELETON_HPP

/// Vessel centreline skeleton: node positions with luminal radii, segment
/// connectivity, and inlet/outlet annotations. Coordinates in micrometres.

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace caplb {

enum class IoletKind { Inlet, Outlet };

struct SkeletonNode {
    int id = 0;
    Eigen::Vector3d pos_um = Eigen::Vector3d::Zero();
    double radius_um = 0.0;
};

struct SkeletonIolet {
    int node = 0;
    IoletKind kind = IoletKind::Inlet;
    double pressure_mmhg = 0.0;
};

struct VesselSkeleton {
    std::vector<SkeletonNode> nodes;
    std::vector<std::pair<int, int>> edges;   // node ids
    std::vector<SkeletonIolet> iolets;

    /// Checks connectivity, positive radii, nonzero edge lengths, and that
    /// every iolet node has degree 1. Throws std::invalid_argument.
    void validate() const;

    int node_index(int id) const;   // -1 if unknown
    std::size_t degree(int id) const;

    /// Segment endpoints and per-segment radius (mean of endpoint radii).
    struct Segment {
        Eigen::Vector3d a, b;   // um
        double radius;          // um
    };
    std::vector<Segment> segments() const;

    Eigen::Vector3d min_corner() const;   // bounding box of the capsule union
    Eigen::Vector3d max_corner() const;
};

/// Parse error with 1-based line/column of the offending JSON token.
struct SkeletonParseError : std::runtime_error {
    SkeletonParseError(const std::string& what, int line, int column)
        : std::runtime_error(what), line(line), column(column) {}
    int line = 0, column = 0;
};

VesselSkeleton load_skeleton_json(const std::string& path);
void save_skeleton_json(const std::string& path, const VesselSkeleton& skeleton);

}  // namespace caplb

#endif
