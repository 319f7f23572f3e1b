#include "caplb/snapshot.hpp"

#include <cstring>
#include <fstream>

namespace caplb {

namespace {

template <typename T>
void put(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T get(std::istream& in) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw std::runtime_error("snapshot file truncated");
    return v;
}

}  // namespace

FieldSnapshot make_snapshot(const MacroFields& fields, const VoxelDomain& domain,
                            const UnitBridge& bridge, const RheologyModel& rheology) {
    FieldSnapshot s;
    s.dims = domain.dims;
    s.offset = domain.offset;
    s.dx_um = domain.dx_um;
    const std::int64_t n = domain.fluid_count();
    s.coords.resize(3, n);
    s.density_lat.resize(n);
    s.pressure_pa.resize(n);
    s.velocity_m_s.resize(3, n);
    s.shear_rate_per_s.resize(n);
    for (std::int64_t f = 0; f < n; ++f) {
        s.coords.col(f) = domain.site_lattice_coords(f).cast<std::int32_t>();
        s.density_lat(f) = fields.rho(f);
        s.pressure_pa(f) = bridge.lattice_density_to_pressure_pa(fields.rho(f));
        s.velocity_m_s.col(f) = fields.v.col(f) * bridge.velocity_scale();
        s.shear_rate_per_s(f) = bridge.shear_rate_to_physical(fields.gamma_dot(f));
    }
    s.wss = traction_field(fields, domain, bridge, rheology);
    return s;
}

void save_snapshot(const std::string& path, const FieldSnapshot& s) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot file: " + path);
    out.write("CLBS", 4);
    put<std::uint32_t>(out, 1);
    for (int k = 0; k < 3; ++k) put<std::int32_t>(out, s.dims(k));
    for (int k = 0; k < 3; ++k) put<std::int32_t>(out, s.offset(k));
    put<double>(out, s.dx_um);
    put<std::uint64_t>(out, std::uint64_t(s.site_count()));
    for (std::int64_t f = 0; f < s.site_count(); ++f) {
        for (int k = 0; k < 3; ++k) put<std::int32_t>(out, s.coords(k, f));
        put<double>(out, s.density_lat(f));
        put<double>(out, s.pressure_pa(f));
        for (int k = 0; k < 3; ++k) put<double>(out, s.velocity_m_s(k, f));
        put<double>(out, s.shear_rate_per_s(f));
    }
    put<std::uint64_t>(out, s.wss.size());
    for (const auto& w : s.wss) {
        for (int k = 0; k < 3; ++k) put<double>(out, w.position_um(k));
        for (int k = 0; k < 3; ++k) put<double>(out, w.normal(k));
        for (int k = 0; k < 3; ++k) put<double>(out, w.traction_pa(k));
        put<double>(out, w.wss_pa);
    }
    if (!out) throw std::runtime_error("write failure on snapshot file: " + path);
}

FieldSnapshot load_snapshot(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open snapshot file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CLBS", 4) != 0)
        throw std::runtime_error("not a CLBS snapshot file: " + path);
    const auto version = get<std::uint32_t>(in);
    if (version != 1)
        throw std::runtime_error("unsupported CLBS version " + std::to_string(version));

    FieldSnapshot s;
    for (int k = 0; k < 3; ++k) s.dims(k) = get<std::int32_t>(in);
    for (int k = 0; k < 3; ++k) s.offset(k) = get<std::int32_t>(in);
    s.dx_um = get<double>(in);
    const auto n = std::int64_t(get<std::uint64_t>(in));
    s.coords.resize(3, n);
    s.density_lat.resize(n);
    s.pressure_pa.resize(n);
    s.velocity_m_s.resize(3, n);
    s.shear_rate_per_s.resize(n);
    for (std::int64_t f = 0; f < n; ++f) {
        for (int k = 0; k < 3; ++k) s.coords(k, f) = get<std::int32_t>(in);
        s.density_lat(f) = get<double>(in);
        s.pressure_pa(f) = get<double>(in);
        for (int k = 0; k < 3; ++k) s.velocity_m_s(k, f) = get<double>(in);
        s.shear_rate_per_s(f) = get<double>(in);
    }
    const auto nw = get<std::uint64_t>(in);
    s.wss.resize(nw);
    for (auto& w : s.wss) {
        for (int k = 0; k < 3; ++k) w.position_um(k) = get<double>(in);
        for (int k = 0; k < 3; ++k) w.normal(k) = get<double>(in);
        for (int k = 0; k < 3; ++k) w.traction_pa(k) = get<double>(in);
        w.wss_pa = get<double>(in);
    }
    return s;
}

}  // namespace caplb
