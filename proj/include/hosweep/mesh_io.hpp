// JSON mesh file reader/writer. The reader rebuilds face adjacency and
// validates all mesh invariants, reporting the first violation found.
#pragma once

#include "hosweep/mesh.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace hosweep {

inline nlohmann::json mesh_to_json(const HighOrderMesh& mesh) {
    nlohmann::json j;
    j["order"] = mesh.order();
    j["dim"] = 2;
    auto& pts = j["control_points"] = nlohmann::json::array();
    for (const Vec2& p : mesh.control_points()) pts.push_back({p[0], p[1]});
    auto& els = j["elements"] = nlohmann::json::array();
    for (const ElementRecord& el : mesh.elements())
        els.push_back({{"nodes", el.nodes}, {"region", el.region}});
    auto& bnd = j["boundary"] = nlohmann::json::array();
    for (const BoundaryFace& b : mesh.boundary_faces())
        bnd.push_back({{"elem", b.elem}, {"face", b.local_face}, {"attr", b.attr}});
    return j;
}

inline HighOrderMesh mesh_from_json(const nlohmann::json& j,
                                    MeshValidation validation = MeshValidation::full) {
    if (!j.is_object()) throw MeshError("mesh file: expected a JSON object");
    for (const auto& key : {"order", "dim", "control_points", "elements", "boundary"})
        if (!j.contains(key)) throw MeshError(std::string("mesh file: missing key '") + key + "'");
    if (j.at("dim").get<int>() != 2) throw MeshError("mesh file: only dim = 2 is supported");
    const int order = j.at("order").get<int>();
    if (order < 1) throw MeshError("mesh file: order must be >= 1");

    std::vector<Vec2> points;
    for (const auto& p : j.at("control_points")) {
        if (!p.is_array() || p.size() != 2)
            throw MeshError("mesh file: control point " + std::to_string(points.size()) +
                            " is not an [x, y] pair");
        points.emplace_back(p[0].get<double>(), p[1].get<double>());
    }
    std::vector<ElementRecord> elements;
    for (const auto& e : j.at("elements")) {
        ElementRecord rec;
        rec.nodes = e.at("nodes").get<std::vector<int>>();
        rec.region = e.value("region", 1);
        elements.push_back(std::move(rec));
    }
    std::vector<BoundaryFace> boundary;
    for (const auto& b : j.at("boundary"))
        boundary.push_back({b.at("elem").get<int>(), b.at("face").get<int>(),
                            b.value("attr", 1)});

    return HighOrderMesh::build(order, std::move(points), std::move(elements),
                                std::move(boundary), validation);
}

inline void write_mesh(const HighOrderMesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw MeshError("mesh file: cannot open '" + path + "' for writing");
    out << mesh_to_json(mesh).dump(1) << "\n";
}

inline HighOrderMesh read_mesh(const std::string& path,
                               MeshValidation validation = MeshValidation::full) {
    std::ifstream in(path);
    if (!in) throw MeshError("mesh file: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw MeshError("mesh file '" + path + "': " + e.what());
    }
    return mesh_from_json(j, validation);
}

}  // namespace hosweep
