#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wg/errors.hpp"
#include "wg/geometry.hpp"

namespace wg {

struct MeshEdge {
    /// Endpoints, ordered as traversed by the counter-clockwise loop of `left`.
    std::array<int, 2> vertices{};
    /// Lower-indexed adjacent cell.
    int left = -1;
    /// Other adjacent cell, or -1 on the boundary.
    int right = -1;
    /// Prescribed unit normal n_e: outward from `left`.
    Point normal = Point::UnitX();
    /// Boundary edges only: index into PolygonalMesh::curves(), -1 when untagged.
    int curve = -1;
    double length = 0.0;

    [[nodiscard]] bool is_boundary() const { return right < 0; }
};

/// An edge as seen from one cell. `sign` is n_e . n_K (+1 or -1).
struct CellEdgeRef {
    int edge = -1;
    int sign = 1;
};

/// Explicit curve tag for the boundary edge joining two vertices.
struct BoundaryTag {
    int v0 = -1;
    int v1 = -1;
    int curve = -1;
};

/// Body-fitted polygonal partition with edge adjacency and boundary curve data.
/// Immutable after construction.
class PolygonalMesh {
public:
    PolygonalMesh() = default;

    /// Builds edges and adjacency from counter-clockwise cell loops.
    ///
    /// Boundary edges are tagged with the closest curve in `curves` when both
    /// endpoints lie within 1e-8 of it, unless explicit `tags` are supplied.
    /// Throws MalformedMesh on any structural inconsistency.
    PolygonalMesh(std::vector<Point> vertices, std::vector<std::vector<int>> cells,
                  std::vector<Curve> curves = {}, const std::vector<BoundaryTag>& tags = {})
        : vertices_(std::move(vertices)), cells_(std::move(cells)), curves_(std::move(curves))
    {
        build_topology();
        tag_boundary(tags);
        compute_cell_geometry();
    }

    [[nodiscard]] const std::vector<Point>& vertices() const { return vertices_; }
    [[nodiscard]] const std::vector<std::vector<int>>& cells() const { return cells_; }
    [[nodiscard]] const std::vector<MeshEdge>& edges() const { return edges_; }
    [[nodiscard]] const std::vector<Curve>& curves() const { return curves_; }
    [[nodiscard]] const std::vector<int>& boundary_edges() const { return boundary_edges_; }
    [[nodiscard]] const std::vector<CellEdgeRef>& cell_edges(int cell) const { return cell_edges_.at(cell); }

    [[nodiscard]] int num_vertices() const { return static_cast<int>(vertices_.size()); }
    [[nodiscard]] int num_cells() const { return static_cast<int>(cells_.size()); }
    [[nodiscard]] int num_edges() const { return static_cast<int>(edges_.size()); }

    [[nodiscard]] std::vector<Point> cell_points(int cell) const
    {
        std::vector<Point> pts;
        pts.reserve(cells_.at(cell).size());
        for (int v : cells_[cell])
            pts.push_back(vertices_[v]);
        return pts;
    }

    [[nodiscard]] double cell_area(int cell) const { return area_.at(cell); }
    [[nodiscard]] const Point& cell_centroid(int cell) const { return centroid_.at(cell); }
    [[nodiscard]] double cell_diameter(int cell) const { return diameter_.at(cell); }

    /// Maximum cell diameter.
    [[nodiscard]] double h() const { return h_; }
    /// Maximum boundary edge length.
    [[nodiscard]] double s() const { return s_; }
    /// |Omega_h|.
    [[nodiscard]] double area() const
    {
        double a = 0.0;
        for (double x : area_)
            a += x;
        return a;
    }

    /// Chord-to-curve map of a boundary edge, parametrized along the edge's own
    /// vertex order. Empty for interior or untagged edges.
    [[nodiscard]] std::optional<CurvedSegment> segment(int edge) const
    {
        const MeshEdge& e = edges_.at(edge);
        if (!e.is_boundary() || e.curve < 0)
            return std::nullopt;
        return CurvedSegment(curves_[e.curve], vertices_[e.vertices[0]], vertices_[e.vertices[1]], e.normal);
    }

    /// Copy with the prescribed normal of `edge` reversed (interior edges only).
    [[nodiscard]] PolygonalMesh with_flipped_normal(int edge) const
    {
        PolygonalMesh m = *this;
        MeshEdge& e = m.edges_.at(edge);
        if (e.is_boundary())
            throw InvalidArgument("with_flipped_normal: boundary normals must stay outward");
        e.normal = -e.normal;
        for (int c : {e.left, e.right})
            for (CellEdgeRef& r : m.cell_edges_[c])
                if (r.edge == edge)
                    r.sign = -r.sign;
        return m;
    }

private:
    static std::uint64_t key(int a, int b)
    {
        const auto lo = static_cast<std::uint64_t>(std::min(a, b));
        const auto hi = static_cast<std::uint64_t>(std::max(a, b));
        return (hi << 32) | lo;
    }

    void build_topology()
    {
        const int nv = num_vertices();
        std::vector<char> used(vertices_.size(), 0);
        std::unordered_map<std::uint64_t, int> index;
        cell_edges_.assign(cells_.size(), {});

        for (int c = 0; c < num_cells(); ++c) {
            const auto& loop = cells_[c];
            const int n = static_cast<int>(loop.size());
            if (n < 3)
                throw MalformedMesh("cell " + std::to_string(c) + " has fewer than 3 vertices");
            for (int v : loop) {
                if (v < 0 || v >= nv)
                    throw MalformedMesh("cell " + std::to_string(c) + " references vertex " + std::to_string(v));
                used[v] = 1;
            }
            const std::vector<Point> pts = cell_points(c);
            if (!(signed_area(pts) > 0.0))
                throw MalformedMesh("cell " + std::to_string(c) + " has nonpositive area");

            for (int k = 0; k < n; ++k) {
                const int a = loop[k];
                const int b = loop[(k + 1) % n];
                if (a == b)
                    throw MalformedMesh("cell " + std::to_string(c) + " repeats a vertex");
                auto [it, inserted] = index.try_emplace(key(a, b), static_cast<int>(edges_.size()));
                if (inserted) {
                    MeshEdge e;
                    e.vertices = {a, b};
                    e.left = c;
                    const Point t = vertices_[b] - vertices_[a];
                    e.length = t.norm();
                    if (!(e.length > 0.0))
                        throw MalformedMesh("zero-length edge in cell " + std::to_string(c));
                    e.normal = Point(t.y(), -t.x()) / e.length;
                    edges_.push_back(e);
                    cell_edges_[c].push_back({it->second, 1});
                } else {
                    MeshEdge& e = edges_[it->second];
                    if (e.right >= 0 || e.left == c)
                        throw MalformedMesh("edge shared by more than two cells or repeated in cell " +
                                            std::to_string(c));
                    if (e.vertices[0] != b || e.vertices[1] != a)
                        throw MalformedMesh("inconsistent orientation between cells " + std::to_string(e.left) +
                                            " and " + std::to_string(c));
                    e.right = c;
                    cell_edges_[c].push_back({it->second, -1});
                }
            }
        }
        for (int v = 0; v < nv; ++v)
            if (!used[v])
                throw MalformedMesh("dangling vertex " + std::to_string(v));

        for (int e = 0; e < num_edges(); ++e)
            if (edges_[e].is_boundary())
                boundary_edges_.push_back(e);
    }

    void tag_boundary(const std::vector<BoundaryTag>& tags)
    {
        if (!tags.empty()) {
            std::unordered_map<std::uint64_t, int> by_key;
            for (const BoundaryTag& t : tags) {
                if (t.curve < -1 || t.curve >= static_cast<int>(curves_.size()))
                    throw MalformedMesh("boundary tag references unknown curve " + std::to_string(t.curve));
                by_key[key(t.v0, t.v1)] = t.curve;
            }
            for (int e : boundary_edges_) {
                auto it = by_key.find(key(edges_[e].vertices[0], edges_[e].vertices[1]));
                if (it != by_key.end())
                    edges_[e].curve = it->second;
            }
            return;
        }
        for (int e : boundary_edges_) {
            const Point& a = vertices_[edges_[e].vertices[0]];
            const Point& b = vertices_[edges_[e].vertices[1]];
            double best = 1e-8;
            for (int c = 0; c < static_cast<int>(curves_.size()); ++c) {
                const double d = std::max(curves_[c].distance(a), curves_[c].distance(b));
                if (d <= best) {
                    best = d;
                    edges_[e].curve = c;
                }
            }
        }
    }

    void compute_cell_geometry()
    {
        area_.resize(cells_.size());
        centroid_.resize(cells_.size());
        diameter_.resize(cells_.size());
        h_ = 0.0;
        for (int c = 0; c < num_cells(); ++c) {
            const std::vector<Point> pts = cell_points(c);
            area_[c] = signed_area(pts);
            centroid_[c] = polygon_centroid(pts);
            diameter_[c] = polygon_diameter(pts);
            h_ = std::max(h_, diameter_[c]);
        }
        s_ = 0.0;
        for (int e : boundary_edges_)
            s_ = std::max(s_, edges_[e].length);
    }

    std::vector<Point> vertices_;
    std::vector<std::vector<int>> cells_;
    std::vector<Curve> curves_;
    std::vector<MeshEdge> edges_;
    std::vector<std::vector<CellEdgeRef>> cell_edges_;
    std::vector<int> boundary_edges_;
    std::vector<double> area_;
    std::vector<Point> centroid_;
    std::vector<double> diameter_;
    double h_ = 0.0;
    double s_ = 0.0;
};

} // namespace wg
