#include "caplb/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <unordered_map>

namespace caplb {

namespace {

struct Capsule {
    Eigen::Vector3d a, b;
    double r;
    Eigen::Vector3d ab;
    double len2;
};

double capsule_distance(const Capsule& c, const Eigen::Vector3d& p) {
    const double t = c.len2 > 0.0
                         ? std::clamp((p - c.a).dot(c.ab) / c.len2, 0.0, 1.0)
                         : 0.0;
    return (p - (c.a + t * c.ab)).norm() - c.r;
}

/// Capsule union with a uniform-grid candidate index for near-surface
/// queries (bisection, gradients). Query points farther than the inflation
/// margin from every capsule fall back to the brute-force minimum.
class CapsuleField {
public:
    CapsuleField(const VesselSkeleton& skeleton, double cell_um, double inflate_um)
        : cell_(cell_um), inflate_(inflate_um) {
        for (const auto& s : skeleton.segments()) {
            Capsule c{s.a, s.b, s.radius, s.b - s.a, (s.b - s.a).squaredNorm()};
            capsules_.push_back(c);
        }
        for (std::size_t k = 0; k < capsules_.size(); ++k) {
            const auto& c = capsules_[k];
            const Eigen::Vector3d lo =
                c.a.cwiseMin(c.b) - Eigen::Vector3d::Constant(c.r + inflate_);
            const Eigen::Vector3d hi =
                c.a.cwiseMax(c.b) + Eigen::Vector3d::Constant(c.r + inflate_);
            const Eigen::Vector3i klo = grid_cell(lo), khi = grid_cell(hi);
            for (int z = klo.z(); z <= khi.z(); ++z)
                for (int y = klo.y(); y <= khi.y(); ++y)
                    for (int x = klo.x(); x <= khi.x(); ++x)
                        index_[key(x, y, z)].push_back(k);
        }
    }

    double distance(const Eigen::Vector3d& p) const {
        const Eigen::Vector3i g = grid_cell(p);
        auto it = index_.find(key(g.x(), g.y(), g.z()));
        if (it == index_.end()) return distance_brute(p);
        double d = std::numeric_limits<double>::max();
        for (std::size_t k : it->second) d = std::min(d, capsule_distance(capsules_[k], p));
        return d;
    }

    double distance_brute(const Eigen::Vector3d& p) const {
        double d = std::numeric_limits<double>::max();
        for (const auto& c : capsules_) d = std::min(d, capsule_distance(c, p));
        return d;
    }

    Eigen::Vector3d gradient(const Eigen::Vector3d& p, double h) const {
        Eigen::Vector3d g;
        for (int k = 0; k < 3; ++k) {
            Eigen::Vector3d e = Eigen::Vector3d::Zero();
            e(k) = h;
            g(k) = (distance(p + e) - distance(p - e)) / (2.0 * h);
        }
        return g;
    }

    const std::vector<Capsule>& capsules() const { return capsules_; }

private:
    Eigen::Vector3i grid_cell(const Eigen::Vector3d& p) const {
        return Eigen::Vector3i(int(std::floor(p.x() / cell_)), int(std::floor(p.y() / cell_)),
                               int(std::floor(p.z() / cell_)));
    }
    static std::int64_t key(int x, int y, int z) {
        const std::int64_t m = 1 << 20;
        return (std::int64_t(x + (1 << 19)) * m + (y + (1 << 19))) * m + (z + (1 << 19));
    }

    double cell_;
    double inflate_;
    std::vector<Capsule> capsules_;
    std::unordered_map<std::int64_t, std::vector<std::size_t>> index_;
};

struct PlaneCut {
    Eigen::Vector3d point;
    Eigen::Vector3d normal;   // outward
    double disc_radius;       // opening radius + margin
    double depth;             // how far past the plane the cull reaches
};

bool beyond_plane(const PlaneCut& pc, const Eigen::Vector3d& p) {
    const double s = (p - pc.point).dot(pc.normal);
    if (s <= 0.0 || s > pc.depth) return false;
    const Eigen::Vector3d lateral = (p - pc.point) - s * pc.normal;
    return lateral.norm() <= pc.disc_radius;
}

/// First crossing of the surface along the link [p, p + dir], as a
/// fraction of the link length. Requires f(0) < 0 <= f(1).
double first_crossing(const CapsuleField& field, const Eigen::Vector3d& p,
                      const Eigen::Vector3d& dir, double tol_um) {
    constexpr int kScan = 8;
    double t0 = 0.0, f0 = field.distance(p);
    double t1 = 1.0, f1 = field.distance(p + dir);
    for (int k = 1; k <= kScan; ++k) {
        const double t = double(k) / kScan;
        const double f = field.distance(p + t * dir);
        if (f >= 0.0) {
            t1 = t;
            f1 = f;
            break;
        }
        t0 = t;
        f0 = f;
    }
    if (f0 >= 0.0 || f1 < 0.0) return -1.0;   // bracket failure
    for (int it = 0; it < 60; ++it) {
        const double tm = 0.5 * (t0 + t1);
        const double fm = field.distance(p + tm * dir);
        if (std::abs(fm) < tol_um) return tm;
        if (fm < 0.0)
            t0 = tm;
        else
            t1 = tm;
    }
    return 0.5 * (t0 + t1);
}

}  // namespace

double implicit_distance(const VesselSkeleton& skeleton, const Eigen::Vector3d& point_um) {
    double d = std::numeric_limits<double>::max();
    for (const auto& s : skeleton.segments()) {
        Capsule c{s.a, s.b, s.radius, s.b - s.a, (s.b - s.a).squaredNorm()};
        d = std::min(d, capsule_distance(c, point_um));
    }
    return d;
}

void VoxelDomain::rebuild_fluid_lists() {
    fluid_of_cell.assign(cell_count(), -1);
    cell_of_fluid.clear();
    for (std::int64_t cell = 0; cell < cell_count(); ++cell) {
        if (site_class[cell] != SiteClass::Solid) {
            fluid_of_cell[cell] = std::int64_t(cell_of_fluid.size());
            cell_of_fluid.push_back(cell);
        }
    }
}

std::int64_t VoxelDomain::neighbor(std::int64_t fluid, int i) const {
    Eigen::Vector3i c = cell_coords(cell_of_fluid[fluid]);
    c += Eigen::Vector3i(D3Q15::c[i][0], D3Q15::c[i][1], D3Q15::c[i][2]);
    for (int k = 0; k < 3; ++k) {
        if (periodic_axes(k))
            c(k) = (c(k) + dims(k)) % dims(k);
        else if (c(k) < 0 || c(k) >= dims(k))
            return -1;
    }
    return fluid_of_cell[cell_index(c.x(), c.y(), c.z())];
}

std::vector<std::int64_t> VoxelDomain::build_neighbor_table() const {
    std::vector<std::int64_t> table(fluid_count() * D3Q15::Q, -1);
    for (std::int64_t f = 0; f < fluid_count(); ++f)
        for (int i = 0; i < D3Q15::Q; ++i) table[f * D3Q15::Q + i] = neighbor(f, i);
    return table;
}

VoxelDomain make_box_domain(int nx, int ny, int nz, bool periodic, double dx_um) {
    return make_box_domain_axes(nx, ny, nz,
                                periodic ? Eigen::Vector3i(1, 1, 1) : Eigen::Vector3i(0, 0, 0),
                                dx_um);
}

VoxelDomain make_box_domain_axes(int nx, int ny, int nz, const Eigen::Vector3i& periodic_axes,
                                 double dx_um) {
    VoxelDomain d;
    d.dims = {nx, ny, nz};
    d.dx_um = dx_um;
    d.periodic_axes = periodic_axes;
    d.site_class.assign(d.cell_count(), SiteClass::Fluid);
    d.rebuild_fluid_lists();
    return d;
}

VoxelDomain make_closed_box_domain(int nx, int ny, int nz, double dx_um) {
    VoxelDomain d = make_box_domain(nx, ny, nz, false, dx_um);
    for (std::int64_t f = 0; f < d.fluid_count(); ++f) {
        for (int i = 1; i < D3Q15::Q; ++i) {
            if (d.neighbor(f, i) < 0) {
                WallLink wl;
                wl.site = f;
                wl.dir = std::uint8_t(i);
                wl.q = 0.5;
                wl.normal = -D3Q15::dir(i).normalized();
                d.wall_links.push_back(wl);
                d.site_class[d.cell_of_fluid[f]] = SiteClass::WallAdjacent;
            }
        }
    }
    return d;
}

VoxelDomain voxelize(const VesselSkeleton& skeleton, double dx_um,
                     const VoxelizeOptions& options, VoxelizeReport* report) {
    skeleton.validate();
    if (!(dx_um > 0.0)) throw std::invalid_argument("voxelize: dx must be positive");

    VoxelizeReport local_report;
    VoxelizeReport& rep = report ? *report : local_report;

    if (!options.min_diameter_override) {
        const auto segs = skeleton.segments();
        for (std::size_t e = 0; e < segs.size(); ++e) {
            const double d = 2.0 * segs[e].radius;
            if (d < 3.0 * dx_um) {
                throw MinDiameterError(
                    "voxelize: segment " + std::to_string(e) + " has diameter " +
                        std::to_string(d) + " um < 3 dx = " + std::to_string(3.0 * dx_um) +
                        " um (use the override to voxelize anyway)",
                    int(e), d);
            }
        }
    }

    double max_radius = 0.0;
    for (const auto& n : skeleton.nodes) max_radius = std::max(max_radius, n.radius_um);
    const double link_len = std::sqrt(3.0) * dx_um;
    CapsuleField field(skeleton, std::max(4.0 * dx_um, max_radius),
                       2.0 * link_len + dx_um);

    VoxelDomain dom;
    dom.dx_um = dx_um;
    {
        const Eigen::Vector3d lo = skeleton.min_corner();
        const Eigen::Vector3d hi = skeleton.max_corner();
        for (int k = 0; k < 3; ++k) {
            dom.offset(k) = int(std::floor(lo(k) / dx_um)) - options.padding_sites;
            const int top = int(std::ceil(hi(k) / dx_um)) + options.padding_sites;
            dom.dims(k) = top - dom.offset(k) + 1;
        }
    }
    dom.site_class.assign(dom.cell_count(), SiteClass::Solid);

    // Stamp fluid sites per capsule to avoid the full sites x segments scan.
    for (const auto& c : field.capsules()) {
        const Eigen::Vector3d lo = c.a.cwiseMin(c.b) - Eigen::Vector3d::Constant(c.r);
        const Eigen::Vector3d hi = c.a.cwiseMax(c.b) + Eigen::Vector3d::Constant(c.r);
        Eigen::Vector3i ilo, ihi;
        for (int k = 0; k < 3; ++k) {
            ilo(k) = std::max(int(std::floor(lo(k) / dx_um)) - dom.offset(k), 0);
            ihi(k) = std::min(int(std::ceil(hi(k) / dx_um)) - dom.offset(k), dom.dims(k) - 1);
        }
        for (int z = ilo.z(); z <= ihi.z(); ++z)
            for (int y = ilo.y(); y <= ihi.y(); ++y)
                for (int x = ilo.x(); x <= ihi.x(); ++x) {
                    const std::int64_t cell = dom.cell_index(x, y, z);
                    if (dom.site_class[cell] == SiteClass::Fluid) continue;
                    const Eigen::Vector3d p =
                        (dom.offset + Eigen::Vector3i(x, y, z)).cast<double>() * dx_um;
                    if (capsule_distance(c, p) < 0.0) dom.site_class[cell] = SiteClass::Fluid;
                }
    }

    // Iolet planes cut perpendicular to the terminal segment at the
    // terminal node; fluid beyond the opening is removed.
    std::vector<PlaneCut> cuts;
    for (const auto& io : skeleton.iolets) {
        int nbr_id = -1;
        for (const auto& [a, b] : skeleton.edges) {
            if (a == io.node) nbr_id = b;
            if (b == io.node) nbr_id = a;
        }
        const auto& tnode = skeleton.nodes[skeleton.node_index(io.node)];
        const auto& mnode = skeleton.nodes[skeleton.node_index(nbr_id)];
        IoletPlane plane;
        plane.point_um = tnode.pos_um;
        plane.normal = (tnode.pos_um - mnode.pos_um).normalized();
        plane.kind = io.kind;
        plane.pressure_mmhg = io.pressure_mmhg;
        plane.radius_um = 0.5 * (tnode.radius_um + mnode.radius_um);
        dom.iolets.push_back(plane);
        cuts.push_back({plane.point_um, plane.normal, plane.radius_um + 2.0 * dx_um,
                        plane.radius_um + 2.0 * dx_um});
    }
    if (!cuts.empty()) {
        for (std::int64_t cell = 0; cell < dom.cell_count(); ++cell) {
            if (dom.site_class[cell] != SiteClass::Fluid) continue;
            const Eigen::Vector3d p =
                (dom.offset + dom.cell_coords(cell)).cast<double>() * dx_um;
            for (const auto& pc : cuts) {
                if (beyond_plane(pc, p)) {
                    dom.site_class[cell] = SiteClass::Solid;
                    break;
                }
            }
        }
    }

    dom.rebuild_fluid_lists();
    if (dom.fluid_count() == 0) throw std::runtime_error("voxelize: all-solid domain");

    // Cull fluid regions not connected to any iolet (face connectivity).
    if (!cuts.empty()) {
        std::vector<std::int32_t> comp(dom.fluid_count(), -1);
        std::int32_t ncomp = 0;
        for (std::int64_t seed = 0; seed < dom.fluid_count(); ++seed) {
            if (comp[seed] >= 0) continue;
            std::queue<std::int64_t> q;
            q.push(seed);
            comp[seed] = ncomp;
            while (!q.empty()) {
                const std::int64_t f = q.front();
                q.pop();
                for (int i = 1; i <= 6; ++i) {
                    const std::int64_t nb = dom.neighbor(f, i);
                    if (nb >= 0 && comp[nb] < 0) {
                        comp[nb] = ncomp;
                        q.push(nb);
                    }
                }
            }
            ++ncomp;
        }
        std::vector<char> has_iolet(ncomp, 0);
        for (std::int64_t f = 0; f < dom.fluid_count(); ++f) {
            const Eigen::Vector3d p = dom.site_center_um(f);
            for (int i = 1; i < D3Q15::Q && !has_iolet[comp[f]]; ++i) {
                if (dom.neighbor(f, i) >= 0) continue;
                const Eigen::Vector3d pn = p + D3Q15::dir(i) * dx_um;
                if (field.distance(pn) < 0.0) {
                    for (const auto& pc : cuts) {
                        if (beyond_plane(pc, pn)) {
                            has_iolet[comp[f]] = 1;
                            break;
                        }
                    }
                }
            }
        }
        std::int64_t culled = 0;
        for (std::int64_t f = 0; f < dom.fluid_count(); ++f) {
            if (!has_iolet[comp[f]]) {
                dom.site_class[dom.cell_of_fluid[f]] = SiteClass::Solid;
                ++culled;
            }
        }
        if (culled > 0) {
            rep.culled_sites = culled;
            for (std::int32_t c = 0; c < ncomp; ++c)
                if (!has_iolet[c]) ++rep.culled_regions;
            rep.warnings.push_back("culled " + std::to_string(rep.culled_regions) +
                                   " fluid region(s) (" + std::to_string(culled) +
                                   " sites) not connected to any iolet");
            dom.rebuild_fluid_lists();
            if (dom.fluid_count() == 0)
                throw std::runtime_error("voxelize: no fluid connected to iolets");
        }
    }

    // Link classification + wall fractions.
    const double tol = 1e-6 * dx_um;
    const double grad_h = 1e-4 * dx_um;
    for (std::int64_t f = 0; f < dom.fluid_count(); ++f) {
        const Eigen::Vector3d p = dom.site_center_um(f);
        bool any_wall = false, any_iolet = false;
        for (int i = 1; i < D3Q15::Q; ++i) {
            if (dom.neighbor(f, i) >= 0) continue;
            const Eigen::Vector3d dir = D3Q15::dir(i) * dx_um;
            const Eigen::Vector3d pn = p + dir;
            const double dn = field.distance(pn);

            int iolet_id = -1;
            if (dn < 0.0) {
                for (std::size_t k = 0; k < cuts.size(); ++k) {
                    const auto& pc = cuts[k];
                    const double denom = dir.dot(pc.normal);
                    if (std::abs(denom) < 1e-300) continue;
                    const double t = (pc.point - p).dot(pc.normal) / denom;
                    if (t < 0.0 || t > 1.0) continue;
                    const Eigen::Vector3d x = p + t * dir;
                    if ((x - pc.point).norm() <= pc.disc_radius &&
                        (pn - pc.point).dot(pc.normal) > 0.0) {
                        iolet_id = int(k);
                        IoletLink il;
                        il.site = f;
                        il.dir = std::uint8_t(i);
                        il.iolet = std::uint16_t(k);
                        il.intersection_um = x;
                        dom.iolet_links.push_back(il);
                        any_iolet = true;
                        break;
                    }
                }
            }
            if (iolet_id >= 0) continue;

            WallLink wl;
            wl.site = f;
            wl.dir = std::uint8_t(i);
            if (dn < 0.0) {
                // neighbour inside the lumen but culled: seal with plain
                // bounce-back against a fictitious halfway wall
                wl.q = 0.5;
                wl.normal = -dir.normalized();
                ++rep.bounce_back_fallback_links;
            } else {
                const double t = first_crossing(field, p, dir, tol);
                if (t < 0.0) {
                    const Eigen::Vector3i g = dom.site_lattice_coords(f);
                    throw std::runtime_error(
                        "voxelize: wall bisection bracket failure at site (" +
                        std::to_string(g.x()) + "," + std::to_string(g.y()) + "," +
                        std::to_string(g.z()) + ") direction " + std::to_string(i));
                }
                wl.q = t;
                wl.normal = field.gradient(p + t * dir, grad_h).normalized();
            }
            dom.wall_links.push_back(wl);
            any_wall = true;
        }
        if (any_iolet)
            dom.site_class[dom.cell_of_fluid[f]] = SiteClass::Iolet;
        else if (any_wall)
            dom.site_class[dom.cell_of_fluid[f]] = SiteClass::WallAdjacent;
    }

    return dom;
}

DiameterHistogram diameter_histogram(const VesselSkeleton& skeleton, double bin_width_um) {
    if (!(bin_width_um > 0.0))
        throw std::invalid_argument("diameter_histogram: bin width must be positive");
    const auto segs = skeleton.segments();
    if (segs.empty()) throw std::invalid_argument("diameter_histogram: empty skeleton");

    DiameterHistogram h;
    double dmin = std::numeric_limits<double>::max(), dmax = 0.0;
    double wsum = 0.0, mu = 0.0;
    for (const auto& s : segs) {
        const double d = 2.0 * s.radius;
        const double len = (s.b - s.a).norm();
        dmin = std::min(dmin, d);
        dmax = std::max(dmax, d);
        wsum += len;
        mu += len * std::log(d);
    }
    mu /= wsum;
    double var = 0.0;
    for (const auto& s : segs) {
        const double r = std::log(2.0 * s.radius) - mu;
        var += (s.b - s.a).norm() * r * r;
    }
    var /= wsum;

    h.total_length_um = wsum;
    h.lognormal_mu = mu;
    h.lognormal_sigma = std::sqrt(var);
    h.degenerate = h.lognormal_sigma < 1e-12;
    h.mode_um = h.degenerate ? dmax : std::exp(mu - var);

    const int first = int(std::floor(dmin / bin_width_um));
    const int last = int(std::floor(dmax / bin_width_um));
    const int bins = last - first + 1;
    h.bin_edges_um.resize(bins + 1);
    for (int b = 0; b <= bins; ++b) h.bin_edges_um[b] = (first + b) * bin_width_um;
    h.length_per_bin_um.assign(bins, 0.0);
    for (const auto& s : segs) {
        int b = int(std::floor(2.0 * s.radius / bin_width_um)) - first;
        b = std::clamp(b, 0, bins - 1);
        h.length_per_bin_um[b] += (s.b - s.a).norm();
    }
    return h;
}

double diameter_length_fraction_at_least(const VesselSkeleton& skeleton, double dx_um,
                                         double d_lat) {
    const auto segs = skeleton.segments();
    double total = 0.0, above = 0.0;
    for (const auto& s : segs) {
        const double len = (s.b - s.a).norm();
        total += len;
        if (2.0 * s.radius / dx_um >= d_lat) above += len;
    }
    return total > 0.0 ? above / total : 0.0;
}

}  // namespace caplb
