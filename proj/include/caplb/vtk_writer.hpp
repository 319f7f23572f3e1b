#ifndef CAPLB_VTK_WRITER_HPP
#define CAPLB_VTK_WRITER_HPP

/// Legacy-VTK ASCII export for visualisation (lossy by design, 9
/// significant digits): a structured-points file with velocity, density,
/// and shear rate (solid sites masked by zero density), and a polydata
/// file of wall points carrying traction vectors and WSS magnitude.

#include <string>

#include "caplb/snapshot.hpp"

namespace caplb {

/// Writes <prefix>_fields.vtk and <prefix>_wss.vtk. Field names are fixed:
/// velocity_m_per_s, density, shear_rate_per_s, traction_pa, wss_pa.
/// Throws std::runtime_error on I/O failure or an empty fluid set.
void export_vtk(const FieldSnapshot& snapshot, const std::string& prefix);

}  // namespace caplb

#endif
