#include "caplb/vtk_writer.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace caplb {

namespace {

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

void export_vtk(const FieldSnapshot& s, const std::string& prefix) {
    if (s.site_count() == 0)
        throw std::runtime_error("export_vtk: snapshot has no fluid sites");

    const std::int64_t total = std::int64_t(s.dims.x()) * s.dims.y() * s.dims.z();
    std::vector<std::int64_t> fluid(total, -1);
    for (std::int64_t f = 0; f < s.site_count(); ++f) {
        const Eigen::Vector3i c = s.coords.col(f).cast<int>() - s.offset;
        fluid[(std::int64_t(c.z()) * s.dims.y() + c.y()) * s.dims.x() + c.x()] = f;
    }

    {
        std::ofstream out(prefix + "_fields.vtk");
        if (!out) throw std::runtime_error("export_vtk: cannot write " + prefix + "_fields.vtk");
        out << "# vtk DataFile Version 3.0\n";
        out << "caplb fields (um grid; solid sites carry zero density)\n";
        out << "ASCII\nDATASET STRUCTURED_POINTS\n";
        out << "DIMENSIONS " << s.dims.x() << " " << s.dims.y() << " " << s.dims.z() << "\n";
        out << "ORIGIN " << fmt9(s.offset.x() * s.dx_um) << " " << fmt9(s.offset.y() * s.dx_um)
            << " " << fmt9(s.offset.z() * s.dx_um) << "\n";
        out << "SPACING " << fmt9(s.dx_um) << " " << fmt9(s.dx_um) << " " << fmt9(s.dx_um)
            << "\n";
        out << "POINT_DATA " << total << "\n";

        out << "SCALARS density double 1\nLOOKUP_TABLE default\n";
        for (std::int64_t i = 0; i < total; ++i)
            out << (fluid[i] >= 0 ? fmt9(s.density_lat(fluid[i])) : "0") << "\n";

        out << "VECTORS velocity_m_per_s double\n";
        for (std::int64_t i = 0; i < total; ++i) {
            if (fluid[i] >= 0) {
                const auto v = s.velocity_m_s.col(fluid[i]);
                out << fmt9(v.x()) << " " << fmt9(v.y()) << " " << fmt9(v.z()) << "\n";
            } else {
                out << "0 0 0\n";
            }
        }

        out << "SCALARS shear_rate_per_s double 1\nLOOKUP_TABLE default\n";
        for (std::int64_t i = 0; i < total; ++i)
            out << (fluid[i] >= 0 ? fmt9(s.shear_rate_per_s(fluid[i])) : "0") << "\n";
        if (!out) throw std::runtime_error("export_vtk: write failure on fields file");
    }

    {
        std::ofstream out(prefix + "_wss.vtk");
        if (!out) throw std::runtime_error("export_vtk: cannot write " + prefix + "_wss.vtk");
        out << "# vtk DataFile Version 3.0\n";
        out << "caplb wall shear stress points (um)\n";
        out << "ASCII\nDATASET POLYDATA\n";
        out << "POINTS " << s.wss.size() << " double\n";
        for (const auto& w : s.wss)
            out << fmt9(w.position_um.x()) << " " << fmt9(w.position_um.y()) << " "
                << fmt9(w.position_um.z()) << "\n";
        out << "VERTICES " << s.wss.size() << " " << 2 * s.wss.size() << "\n";
        for (std::size_t k = 0; k < s.wss.size(); ++k) out << "1 " << k << "\n";
        out << "POINT_DATA " << s.wss.size() << "\n";
        out << "VECTORS traction_pa double\n";
        for (const auto& w : s.wss)
            out << fmt9(w.traction_pa.x()) << " " << fmt9(w.traction_pa.y()) << " "
                << fmt9(w.traction_pa.z()) << "\n";
        out << "SCALARS wss_pa double 1\nLOOKUP_TABLE default\n";
        for (const auto& w : s.wss) out << fmt9(w.wss_pa) << "\n";
        if (!out) throw std::runtime_error("export_vtk: write failure on wss file");
    }
}

}  // namespace caplb
