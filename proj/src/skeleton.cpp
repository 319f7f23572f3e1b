#include "caplb/skeleton.hpp"

#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>

#include "json.hpp"

namespace caplb {

void VesselSkeleton::validate() const {
    if (nodes.empty()) throw std::invalid_argument("skeleton: no nodes");
    if (edges.empty()) throw std::invalid_argument("skeleton: no edges");

    std::map<int, std::size_t> index;
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (!(nodes[i].radius_um > 0.0))
            throw std::invalid_argument("skeleton: node " + std::to_string(nodes[i].id) +
                                        " has non-positive radius");
        if (!index.emplace(nodes[i].id, i).second)
            throw std::invalid_argument("skeleton: duplicate node id " +
                                        std::to_string(nodes[i].id));
    }

    std::map<int, std::vector<int>> adj;
    for (const auto& [a, b] : edges) {
        auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end() || ib == index.end())
            throw std::invalid_argument("skeleton: edge references unknown node");
        const double len = (nodes[ia->second].pos_um - nodes[ib->second].pos_um).norm();
        if (!(len > 0.0))
            throw std::invalid_argument("skeleton: zero-length edge " + std::to_string(a) +
                                        "-" + std::to_string(b));
        adj[a].push_back(b);
        adj[b].push_back(a);
    }

    // connectivity over edges
    std::set<int> seen;
    std::queue<int> frontier;
    frontier.push(edges.front().first);
    seen.insert(edges.front().first);
    while (!frontier.empty()) {
        int u = frontier.front();
        frontier.pop();
        for (int v : adj[u])
            if (seen.insert(v).second) frontier.push(v);
    }
    if (seen.size() != nodes.size())
        throw std::invalid_argument("skeleton: graph is not connected");

    for (const auto& io : iolets) {
        auto it = adj.find(io.node);
        if (it == adj.end() || it->second.size() != 1)
            throw std::invalid_argument("skeleton: iolet node " + std::to_string(io.node) +
                                        " must have degree 1");
    }
}

int VesselSkeleton::node_index(int id) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].id == id) return static_cast<int>(i);
    return -1;
}

std::size_t VesselSkeleton::degree(int id) const {
    std::size_t d = 0;
    for (const auto& [a, b] : edges)
        if (a == id || b == id) ++d;
    return d;
}

std::vector<VesselSkeleton::Segment> VesselSkeleton::segments() const {
    std::vector<Segment> segs;
    segs.reserve(edges.size());
    for (const auto& [a, b] : edges) {
        const auto& na = nodes[node_index(a)];
        const auto& nb = nodes[node_index(b)];
        segs.push_back({na.pos_um, nb.pos_um, 0.5 * (na.radius_um + nb.radius_um)});
    }
    return segs;
}

Eigen::Vector3d VesselSkeleton::min_corner() const {
    Eigen::Vector3d lo = Eigen::Vector3d::Constant(std::numeric_limits<double>::max());
    for (const auto& n : nodes)
        lo = lo.cwiseMin(n.pos_um - Eigen::Vector3d::Constant(n.radius_um));
    return lo;
}

Eigen::Vector3d VesselSkeleton::max_corner() const {
    Eigen::Vector3d hi = Eigen::Vector3d::Constant(std::numeric_limits<double>::lowest());
    for (const auto& n : nodes)
        hi = hi.cwiseMax(n.pos_um + Eigen::Vector3d::Constant(n.radius_um));
    return hi;
}

VesselSkeleton load_skeleton_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open skeleton file: " + path);

    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        // byte offset -> line/column for the error message
        std::ifstream again(path);
        std::string text((std::istreambuf_iterator<char>(again)),
                         std::istreambuf_iterator<char>());
        int line = 1, col = 1;
        for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
            if (text[k] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw SkeletonParseError(std::string("skeleton JSON parse error: ") + e.what(), line,
                                 col);
    }

    VesselSkeleton s;
    try {
        for (const auto& jn : j.at("nodes")) {
            SkeletonNode n;
            n.id = jn.at("id").get<int>();
            const auto& p = jn.at("pos_um");
            n.pos_um = Eigen::Vector3d(p.at(0).get<double>(), p.at(1).get<double>(),
                                       p.at(2).get<double>());
            n.radius_um = jn.at("radius_um").get<double>();
            s.nodes.push_back(n);
        }
        for (const auto& je : j.at("edges"))
            s.edges.emplace_back(je.at(0).get<int>(), je.at(1).get<int>());
        if (j.contains("iolets")) {
            for (const auto& ji : j.at("iolets")) {
                SkeletonIolet io;
                io.node = ji.at("node").get<int>();
                const std::string kind = ji.at("kind").get<std::string>();
                if (kind == "inlet")
                    io.kind = IoletKind::Inlet;
                else if (kind == "outlet")
                    io.kind = IoletKind::Outlet;
                else
                    throw std::runtime_error("iolet kind must be 'inlet' or 'outlet'");
                io.pressure_mmhg = ji.at("pressure_mmhg").get<double>();
                s.iolets.push_back(io);
            }
        }
    } catch (const nlohmann::json::exception& e) {
        throw SkeletonParseError(std::string("skeleton JSON schema error: ") + e.what(), 0, 0);
    }
    s.validate();
    return s;
}

void save_skeleton_json(const std::string& path, const VesselSkeleton& skeleton) {
    nlohmann::json j;
    j["nodes"] = nlohmann::json::array();
    for (const auto& n : skeleton.nodes) {
        j["nodes"].push_back({{"id", n.id},
                              {"pos_um", {n.pos_um.x(), n.pos_um.y(), n.pos_um.z()}},
                              {"radius_um", n.radius_um}});
    }
    j["edges"] = nlohmann::json::array();
    for (const auto& [a, b] : skeleton.edges) j["edges"].push_back({a, b});
    j["iolets"] = nlohmann::json::array();
    for (const auto& io : skeleton.iolets) {
        j["iolets"].push_back(
            {{"node", io.node},
             {"kind", io.kind == IoletKind::Inlet ? "inlet" : "outlet"},
             {"pressure_mmhg", io.pressure_mmhg}});
    }
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write skeleton file: " + path);
    out << j.dump(2) << "\n";
}

}  // namespace caplb
