#include "caplb/boundaries.hpp"

#include "caplb/parallel.hpp"

namespace caplb {

BoundarySet BoundarySet::build(const VoxelDomain& domain,
                               const std::vector<std::int64_t>& neighbor_table,
                               const std::vector<IoletBC>& iolet_bcs) {
    if (iolet_bcs.size() != domain.iolets.size())
        throw std::invalid_argument("BoundarySet: one boundary condition per iolet required");

    BoundarySet bs;
    bs.bcs_ = iolet_bcs;

    bs.walls_.reserve(domain.wall_links.size());
    for (const auto& wl : domain.wall_links) {
        WallEntry e;
        e.site = wl.site;
        e.out_dir = wl.dir;
        e.in_dir = std::uint8_t(D3Q15::opposite[wl.dir]);
        e.q = wl.q;
        e.upstream = neighbor_table[wl.site * D3Q15::Q + e.in_dir];
        if (e.q < 0.5 && e.upstream < 0) ++bs.fallback_links_;
        bs.walls_.push_back(e);
    }

    bs.iolets_.reserve(domain.iolet_links.size());
    for (const auto& il : domain.iolet_links) {
        IoletEntry e;
        e.site = il.site;
        e.out_dir = il.dir;
        e.in_dir = std::uint8_t(D3Q15::opposite[il.dir]);
        e.iolet = il.iolet;
        e.correction = 0.0;
        const IoletBC& bc = iolet_bcs[il.iolet];
        if (bc.is_velocity) {
            const Eigen::Vector3d vw = bc.velocity_lat(il.intersection_um);
            if (!(vw.norm() < 0.1))
                throw std::invalid_argument(
                    "velocity iolet: |v_w| >= 0.1 lattice units (compressibility guard)");
            const double cv = D3Q15::c[il.dir][0] * vw.x() + D3Q15::c[il.dir][1] * vw.y() +
                              D3Q15::c[il.dir][2] * vw.z();
            e.correction = 2.0 * D3Q15::w[il.dir] * cv / D3Q15::cs2;   // rho0 = 1
        } else if (!(bc.rho_target > 0.0)) {
            throw std::invalid_argument("pressure iolet: target density must be positive");
        }
        bs.iolets_.push_back(e);
    }

    // flux calibration: the net admitted mass per link is exactly the
    // correction, so scaling the corrections sets the admitted rate
    for (std::size_t io = 0; io < iolet_bcs.size(); ++io) {
        const IoletBC& bc = iolet_bcs[io];
        if (!bc.is_velocity || !std::isfinite(bc.target_influx_lat)) continue;
        double influx = 0.0;
        for (const auto& e : bs.iolets_)
            if (e.iolet == io) influx -= e.correction;
        if (influx == 0.0)
            throw std::invalid_argument("velocity iolet: zero discrete influx, cannot calibrate");
        const double scale = bc.target_influx_lat / influx;
        for (auto& e : bs.iolets_)
            if (e.iolet == io) e.correction *= scale;
    }
    return bs;
}

void BoundarySet::apply(LatticeState& state, const Eigen::Matrix3Xd& velocity,
                        int threads) const {
    const auto& fc = state.current();   // post-collision
    auto& fn = state.next();

    parallel_for_blocks(
        std::int64_t(walls_.size()), threads,
        [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
            for (std::int64_t k = lo; k < hi; ++k) {
                const WallEntry& e = walls_[k];
                if (e.q < 0.5) {
                    if (e.upstream >= 0) {
                        fn(e.in_dir, e.site) = 2.0 * e.q * fc(e.out_dir, e.site) +
                                               (1.0 - 2.0 * e.q) * fc(e.out_dir, e.upstream);
                    } else {
                        fn(e.in_dir, e.site) = fc(e.out_dir, e.site);   // bounce-back fallback
                    }
                } else {
                    const double inv2q = 1.0 / (2.0 * e.q);
                    fn(e.in_dir, e.site) = inv2q * fc(e.out_dir, e.site) +
                                           (2.0 * e.q - 1.0) * inv2q * fc(e.in_dir, e.site);
                }
            }
        });

    parallel_for_blocks(
        std::int64_t(iolets_.size()), threads,
        [&](std::int64_t lo, std::int64_t hi, std::int64_t) {
            for (std::int64_t k = lo; k < hi; ++k) {
                const IoletEntry& e = iolets_[k];
                const IoletBC& bc = bcs_[e.iolet];
                if (bc.is_velocity) {
                    fn(e.in_dir, e.site) = fc(e.out_dir, e.site) - e.correction;
                } else {
                    const double vx = velocity(0, e.site), vy = velocity(1, e.site),
                                 vz = velocity(2, e.site);
                    const double cv = D3Q15::c[e.out_dir][0] * vx +
                                      D3Q15::c[e.out_dir][1] * vy +
                                      D3Q15::c[e.out_dir][2] * vz;
                    const double vv = vx * vx + vy * vy + vz * vz;
                    fn(e.in_dir, e.site) =
                        -fc(e.out_dir, e.site) +
                        2.0 * D3Q15::w[e.out_dir] * bc.rho_target *
                            (1.0 + 4.5 * cv * cv - 1.5 * vv);
                }
            }
        });
}

std::vector<double> BoundarySet::iolet_mass_outflow(const LatticeState& state) const {
    // current() holds the post-collision outgoing populations, next() the
    // freshly filled incoming ones.
    std::vector<double> out(bcs_.size(), 0.0);
    const auto& fc = state.current();
    const auto& fn = state.next();
    for (const auto& e : iolets_) {
        out[e.iolet] += fc(e.out_dir, e.site) - fn(e.in_dir, e.site);
    }
    return out;
}

}  // namespace caplb
