#include "caplb/domain_io.hpp"

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
    if (!in) throw std::runtime_error("domain file truncated");
    return v;
}

void put_vec3(std::ostream& out, const Eigen::Vector3d& v) {
    put(out, v.x());
    put(out, v.y());
    put(out, v.z());
}

Eigen::Vector3d get_vec3(std::istream& in) {
    const double x = get<double>(in), y = get<double>(in), z = get<double>(in);
    return {x, y, z};
}

}  // namespace

void save_domain(const std::string& path, const VoxelDomain& d) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write domain file: " + path);
    out.write("CLBD", 4);
    put<std::uint32_t>(out, 1);
    for (int k = 0; k < 3; ++k) put<std::int32_t>(out, d.dims(k));
    for (int k = 0; k < 3; ++k) put<std::int32_t>(out, d.offset(k));
    put<double>(out, d.dx_um);
    std::uint8_t mask = 0;
    for (int k = 0; k < 3; ++k)
        if (d.periodic_axes(k)) mask |= std::uint8_t(1 << k);
    put<std::uint8_t>(out, mask);
    out.write(reinterpret_cast<const char*>(d.site_class.data()),
              std::streamsize(d.site_class.size()));

    put<std::uint64_t>(out, d.wall_links.size());
    for (const auto& wl : d.wall_links) {
        put<std::int64_t>(out, wl.site);
        put<std::uint8_t>(out, wl.dir);
        put<double>(out, wl.q);
        put_vec3(out, wl.normal);
    }
    put<std::uint64_t>(out, d.iolet_links.size());
    for (const auto& il : d.iolet_links) {
        put<std::int64_t>(out, il.site);
        put<std::uint8_t>(out, il.dir);
        put<std::uint16_t>(out, il.iolet);
        put_vec3(out, il.intersection_um);
    }
    put<std::uint32_t>(out, std::uint32_t(d.iolets.size()));
    for (const auto& io : d.iolets) {
        put_vec3(out, io.point_um);
        put_vec3(out, io.normal);
        put<std::uint8_t>(out, io.kind == IoletKind::Inlet ? 0 : 1);
        put<double>(out, io.pressure_mmhg);
        put<double>(out, io.radius_um);
    }
    if (!out) throw std::runtime_error("write failure on domain file: " + path);
}

VoxelDomain load_domain(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open domain file: " + path);
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, "CLBD", 4) != 0)
        throw std::runtime_error("not a CLBD domain file: " + path);
    const auto version = get<std::uint32_t>(in);
    if (version != 1)
        throw std::runtime_error("unsupported CLBD version " + std::to_string(version));

    VoxelDomain d;
    for (int k = 0; k < 3; ++k) d.dims(k) = get<std::int32_t>(in);
    for (int k = 0; k < 3; ++k) d.offset(k) = get<std::int32_t>(in);
    d.dx_um = get<double>(in);
    const std::uint8_t mask = get<std::uint8_t>(in);
    for (int k = 0; k < 3; ++k) d.periodic_axes(k) = (mask >> k) & 1;
    d.site_class.resize(d.cell_count());
    in.read(reinterpret_cast<char*>(d.site_class.data()),
            std::streamsize(d.site_class.size()));
    if (!in) throw std::runtime_error("domain file truncated: " + path);

    const auto nwall = get<std::uint64_t>(in);
    d.wall_links.resize(nwall);
    for (auto& wl : d.wall_links) {
        wl.site = get<std::int64_t>(in);
        wl.dir = get<std::uint8_t>(in);
        wl.q = get<double>(in);
        wl.normal = get_vec3(in);
    }
    const auto niolet_links = get<std::uint64_t>(in);
    d.iolet_links.resize(niolet_links);
    for (auto& il : d.iolet_links) {
        il.site = get<std::int64_t>(in);
        il.dir = get<std::uint8_t>(in);
        il.iolet = get<std::uint16_t>(in);
        il.intersection_um = get_vec3(in);
    }
    const auto niolets = get<std::uint32_t>(in);
    d.iolets.resize(niolets);
    for (auto& io : d.iolets) {
        io.point_um = get_vec3(in);
        io.normal = get_vec3(in);
        io.kind = get<std::uint8_t>(in) == 0 ? IoletKind::Inlet : IoletKind::Outlet;
        io.pressure_mmhg = get<double>(in);
        io.radius_um = get<double>(in);
    }
    d.rebuild_fluid_lists();
    return d;
}

}  // namespace caplb
