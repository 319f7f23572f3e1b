#ifndef CAPLB_DOMAIN_IO_HPP
#define CAPLB_DOMAIN_IO_HPP

/// Voxel-domain persistence. Little-endian binary, magic "CLBD":
///
///   char[4]  magic "CLBD"
///   u32      version (1)
///   i32[3]   dims
///   i32[3]   offset (integer-lattice origin)
///   f64      dx (um)
///   u8       periodic-axis bitmask (x=1, y=2, z=4)
///   u8[n]    site classes, x fastest
///   u64      wall link count
///            { i64 site, u8 dir, f64 q, f64 normal[3] } per link
///   u64      iolet link count
///            { i64 site, u8 dir, u16 iolet, f64 intersection_um[3] } per link
///   u32      iolet count
///            { f64 point_um[3], f64 normal[3], u8 kind, f64 pressure_mmhg,
///              f64 radius_um } per iolet

#include <string>

#include "caplb/voxel_domain.hpp"

namespace caplb {

void save_domain(const std::string& path, const VoxelDomain& domain);
VoxelDomain load_domain(const std::string& path);

}  // namespace caplb

#endif
