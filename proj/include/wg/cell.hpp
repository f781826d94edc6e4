#pragma once

#include <optional>
#include <vector>

#include "wg/basis.hpp"
#include "wg/geometry.hpp"
#include "wg/mesh.hpp"
#include "wg/quadrature.hpp"

namespace wg {

/// One edge of a cell, parametrized along the edge's own vertex order so the
/// same t is seen from both adjacent cells.
struct LocalEdge {
    Point a = Point::Zero();
    Point b = Point::Zero();
    /// Prescribed normal n_e.
    Point normal = Point::UnitX();
    /// n_e . n_K.
    int sign = 1;
    double length = 0.0;
    bool boundary = false;
    /// Global edge index, -1 for standalone cells.
    int global = -1;
    std::optional<CurvedSegment> segment;

    /// Outward unit normal of the owning cell.
    [[nodiscard]] Point outward() const { return sign * normal; }
};

/// Geometry of one polygonal cell together with its edges.
struct LocalCell {
    std::vector<Point> vertices;
    std::vector<LocalEdge> edges;
    Point centroid = Point::Zero();
    double area = 0.0;
    double diameter = 0.0;

    static LocalCell from_mesh(const PolygonalMesh& mesh, int cell)
    {
        LocalCell k;
        k.vertices = mesh.cell_points(cell);
        k.centroid = mesh.cell_centroid(cell);
        k.area = mesh.cell_area(cell);
        k.diameter = mesh.cell_diameter(cell);
        for (const CellEdgeRef& ref : mesh.cell_edges(cell)) {
            const MeshEdge& me = mesh.edges()[ref.edge];
            LocalEdge e;
            e.a = mesh.vertices()[me.vertices[0]];
            e.b = mesh.vertices()[me.vertices[1]];
            e.normal = me.normal;
            e.sign = ref.sign;
            e.length = me.length;
            e.boundary = me.is_boundary();
            e.global = ref.edge;
            e.segment = mesh.segment(ref.edge);
            k.edges.push_back(std::move(e));
        }
        return k;
    }

    /// Standalone counter-clockwise polygon: every edge is a flat boundary edge
    /// oriented along the loop, with n_e the outward normal.
    static LocalCell from_polygon(std::vector<Point> loop)
    {
        LocalCell k;
        k.area = signed_area(loop);
        if (!(k.area > 0.0))
            throw MalformedCell("LocalCell: polygon must be counter-clockwise with positive area");
        k.centroid = polygon_centroid(loop);
        k.diameter = polygon_diameter(loop);
        const std::size_t n = loop.size();
        for (std::size_t i = 0; i < n; ++i) {
            LocalEdge e;
            e.a = loop[i];
            e.b = loop[(i + 1) % n];
            const Point t = e.b - e.a;
            e.length = t.norm();
            if (!(e.length > 0.0))
                throw MalformedEdge("LocalCell: zero-length edge");
            e.normal = Point(t.y(), -t.x()) / e.length;
            e.boundary = true;
            k.edges.push_back(std::move(e));
        }
        k.vertices = std::move(loop);
        return k;
    }

    [[nodiscard]] CellBasis basis(int degree) const { return CellBasis(centroid, diameter, degree); }

    [[nodiscard]] QuadratureRule rule(int order) const { return polygon_rule(vertices, centroid, order); }
};

} // namespace wg
