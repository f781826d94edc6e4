#pragma once

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wg/errors.hpp"
#include "wg/mesh.hpp"

namespace wg {

// Mesh document (JSON):
//
//   {
//     "format": "wg-mesh", "version": 1,
//     "vertices": [[index, x, y], ...],
//     "cells":    [[v0, v1, ...], ...],                  counter-clockwise loops
//     "curves":   [{"id", "kind": "circle", "center": [x, y], "radius", "domain_inside"}
//                  | {"id", "kind": "line", "point": [x, y], "normal": [nx, ny]}, ...],
//     "boundary": [{"edge": [a, b], "curve_id", "curve": {...same fields as in curves}}, ...]
//   }
//
// Reals are printed with 17 significant digits, which reads back bit-identically.
// "boundary" lists every boundary edge; curve_id is -1 for untagged edges.

namespace detail {

inline std::string fmt17(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline void write_curve_fields(std::ostream& os, const Curve& c)
{
    if (c.kind == Curve::Kind::circle) {
        os << "\"kind\": \"circle\", \"center\": [" << fmt17(c.center.x()) << ", " << fmt17(c.center.y())
           << "], \"radius\": " << fmt17(c.radius) << ", \"domain_inside\": " << (c.domain_inside ? "true" : "false");
    } else {
        os << "\"kind\": \"line\", \"point\": [" << fmt17(c.center.x()) << ", " << fmt17(c.center.y())
           << "], \"normal\": [" << fmt17(c.normal.x()) << ", " << fmt17(c.normal.y()) << "]";
    }
}

inline Point read_point(const nlohmann::json& j, const char* what)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw MalformedMesh(std::string("mesh file: ") + what + " must be [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline Curve read_curve(const nlohmann::json& j)
{
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "circle")
        return Curve::circle(read_point(j.at("center"), "center"), j.at("radius").get<double>(),
                             j.at("domain_inside").get<bool>());
    if (kind == "line") {
        Curve c = Curve::line(read_point(j.at("point"), "point"), read_point(j.at("normal"), "normal"));
        // Keep the stored normal verbatim so write -> read is exact.
        c.normal = read_point(j.at("normal"), "normal");
        return c;
    }
    throw MalformedMesh("mesh file: unknown curve kind '" + kind + "'");
}

} // namespace detail

inline void write_mesh(std::ostream& os, const PolygonalMesh& mesh)
{
    using detail::fmt17;
    os << "{\n  \"format\": \"wg-mesh\",\n  \"version\": 1,\n  \"vertices\": [";
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const Point& x = mesh.vertices()[v];
        os << (v ? ",\n    " : "\n    ") << '[' << v << ", " << fmt17(x.x()) << ", " << fmt17(x.y()) << ']';
    }
    os << "\n  ],\n  \"cells\": [";
    for (int c = 0; c < mesh.num_cells(); ++c) {
        os << (c ? ",\n    [" : "\n    [");
        const auto& loop = mesh.cells()[c];
        for (std::size_t k = 0; k < loop.size(); ++k)
            os << (k ? ", " : "") << loop[k];
        os << ']';
    }
    os << "\n  ],\n  \"curves\": [";
    for (int c = 0; c < static_cast<int>(mesh.curves().size()); ++c) {
        os << (c ? ",\n    {" : "\n    {") << "\"id\": " << c << ", ";
        detail::write_curve_fields(os, mesh.curves()[c]);
        os << '}';
    }
    os << "\n  ],\n  \"boundary\": [";
    bool first = true;
    for (int e : mesh.boundary_edges()) {
        const MeshEdge& me = mesh.edges()[e];
        os << (first ? "\n    {" : ",\n    {") << "\"edge\": [" << me.vertices[0] << ", " << me.vertices[1]
           << "], \"curve_id\": " << me.curve;
        if (me.curve >= 0) {
            os << ", \"curve\": {";
            detail::write_curve_fields(os, mesh.curves()[me.curve]);
            os << '}';
        }
        os << '}';
        first = false;
    }
    os << "\n  ]\n}\n";
}

inline void write_mesh(const std::string& path, const PolygonalMesh& mesh)
{
    std::ofstream out(path);
    if (!out)
        throw InvalidArgument("write_mesh: cannot open " + path);
    write_mesh(out, mesh);
    if (!out)
        throw Error("write_mesh: write failed for " + path);
}

/// Parses a mesh document; throws MalformedMesh on bad syntax or structure.
inline PolygonalMesh read_mesh(std::istream& is)
{
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(is);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedMesh(std::string("mesh file: ") + e.what());
    }
    try {
        std::vector<Point> vertices;
        for (const auto& row : doc.at("vertices")) {
            if (!row.is_array() || row.size() != 3)
                throw MalformedMesh("mesh file: vertex rows must be [index, x, y]");
            if (row[0].get<long long>() != static_cast<long long>(vertices.size()))
                throw MalformedMesh("mesh file: vertex indices must be 0, 1, 2, ... in order");
            vertices.emplace_back(row[1].get<double>(), row[2].get<double>());
        }
        std::vector<std::vector<int>> cells;
        for (const auto& row : doc.at("cells"))
            cells.push_back(row.get<std::vector<int>>());
        std::vector<Curve> curves;
        if (doc.contains("curves"))
            for (const auto& c : doc["curves"]) {
                if (c.at("id").get<long long>() != static_cast<long long>(curves.size()))
                    throw MalformedMesh("mesh file: curve ids must be 0, 1, 2, ... in order");
                curves.push_back(detail::read_curve(c));
            }
        std::vector<BoundaryTag> tags;
        if (doc.contains("boundary"))
            for (const auto& b : doc["boundary"]) {
                const auto ends = b.at("edge").get<std::vector<int>>();
                if (ends.size() != 2)
                    throw MalformedMesh("mesh file: boundary edge must list two vertices");
                tags.push_back({ends[0], ends[1], b.at("curve_id").get<int>()});
            }
        // Untagged files fall back to geometric tagging; tags must be non-empty to take effect.
        const bool any_tag = std::any_of(tags.begin(), tags.end(), [](const BoundaryTag& t) { return t.curve >= 0; });
        if (!any_tag)
            tags.clear();
        return PolygonalMesh(std::move(vertices), std::move(cells), std::move(curves), tags);
    } catch (const nlohmann::json::exception& e) {
        throw MalformedMesh(std::string("mesh file: ") + e.what());
    }
}

inline PolygonalMesh read_mesh(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw InvalidArgument("read_mesh: cannot open " + path);
    return read_mesh(in);
}

} // namespace wg
