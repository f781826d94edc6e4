#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "wg/errors.hpp"
#include "wg/mesh.hpp"

namespace wg {

/// Bounds the measured regularity ratios are checked against.
struct MeshQualityThresholds {
    double min_star_ratio = 0.05;         ///< A1: rho_K / h_K
    double min_long_edge_ratio = 0.1;     ///< A2: max edge / h_K
    double max_quasi_uniformity = 10.0;   ///< A3: h / min h_K
    double max_gap_over_s2 = 10.0;        ///< A4: max gamma / s^2
    double max_normal_dev_over_s = 10.0;  ///< A4: max |n~ - n| / s
    double max_boundary_uniformity = 10.0; ///< A5: s / min boundary h_e
    double curve_tolerance = 1e-12;       ///< body fit: endpoint distance to the curve
    /// A6 shape of the rescaled apex triangle. Off by default: with h/s short
    /// edges sharing one apex these grow like h/s and (h/s)^3 by construction.
    double max_a6_diameter = std::numeric_limits<double>::infinity();
    double max_a6_radius_ratio = std::numeric_limits<double>::infinity();
    int samples_per_edge = 16;
};

struct QualityViolation {
    std::string assumption;
    int index = -1; ///< offending cell or edge
    double value = 0.0;
};

struct MeshQualityReport {
    double min_star_ratio = std::numeric_limits<double>::infinity();
    double min_long_edge_ratio = std::numeric_limits<double>::infinity();
    double quasi_uniformity = 0.0;
    double boundary_uniformity = 0.0;
    double max_gap_over_s2 = 0.0;
    double max_normal_dev_over_s = 0.0;
    /// max over boundary edges of sup |n~ - n| / h_e.
    double max_normal_dev_over_he = 0.0;
    double max_gap = 0.0;
    /// A6: apex triangle P(e) over each boundary edge, apex at the cell centroid.
    double min_a6_height_over_rho = std::numeric_limits<double>::infinity(); ///< h_{K,e} / rho_K, needs >= 1
    double max_a6_height_over_hk = 0.0;                                      ///< h_{K,e} / h_K, needs <= 1
    double max_a6_diameter = 0.0;     ///< diam of F(P(e))
    double max_a6_radius_ratio = 0.0; ///< circumradius / inradius of F(P(e))
    std::vector<QualityViolation> violations;

    [[nodiscard]] bool passed() const { return violations.empty(); }
    [[nodiscard]] bool passed(const std::string& assumption) const
    {
        return std::none_of(violations.begin(), violations.end(),
                            [&](const QualityViolation& v) { return v.assumption == assumption; });
    }
};

/// Re-checks the structural invariants of a mesh; throws MalformedMesh.
inline void check_structure(const PolygonalMesh& mesh)
{
    std::vector<int> refs(mesh.num_edges(), 0);
    for (int c = 0; c < mesh.num_cells(); ++c) {
        if (!(mesh.cell_area(c) > 0.0))
            throw MalformedMesh("cell " + std::to_string(c) + " has nonpositive area");
        const auto& loop = mesh.cells()[c];
        const auto& edges = mesh.cell_edges(c);
        if (edges.size() != loop.size())
            throw MalformedMesh("cell " + std::to_string(c) + " has an open loop");
        for (std::size_t k = 0; k < loop.size(); ++k) {
            const MeshEdge& e = mesh.edges().at(edges[k].edge);
            const int a = loop[k];
            const int b = loop[(k + 1) % loop.size()];
            const bool same = e.vertices[0] == a && e.vertices[1] == b;
            const bool flipped = e.vertices[0] == b && e.vertices[1] == a;
            if (!same && !flipped)
                throw MalformedMesh("cell " + std::to_string(c) + " edge list does not follow its loop");
            ++refs[edges[k].edge];
        }
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const MeshEdge& me = mesh.edges()[e];
        const int expected = me.is_boundary() ? 1 : 2;
        if (refs[e] != expected)
            throw MalformedMesh("edge " + std::to_string(e) + " is dangling or over-referenced");
        const Point t = mesh.vertices()[me.vertices[1]] - mesh.vertices()[me.vertices[0]];
        if (std::abs(me.normal.norm() - 1.0) > 1e-12 || std::abs(me.normal.dot(t)) > 1e-12 * t.norm())
            throw MalformedMesh("edge " + std::to_string(e) + " normal is not a unit normal");
    }
}

namespace detail {

/// Circumradius over inradius of a triangle.
inline double radius_ratio(const Point& a, const Point& b, const Point& c)
{
    const double x = (b - c).norm();
    const double y = (c - a).norm();
    const double z = (a - b).norm();
    const double area = 0.5 * std::abs(cross(b - a, c - a));
    if (!(area > 0.0))
        return std::numeric_limits<double>::infinity();
    const double circum = x * y * z / (4.0 * area);
    const double in = area / (0.5 * (x + y + z));
    return circum / in;
}

/// A6 on boundary edge e of cell K: P(e) = triangle(e, centroid), rescaled by
/// diag(1/h_e, 1/h_{K,e}) in the frame of e.
inline void check_a6(const PolygonalMesh& mesh, int e, double rho, const MeshQualityThresholds& th,
                     MeshQualityReport& rep)
{
    const MeshEdge& me = mesh.edges()[e];
    const Point& a = mesh.vertices()[me.vertices[0]];
    const Point& b = mesh.vertices()[me.vertices[1]];
    const Point apex = mesh.cell_centroid(me.left);
    const double hk = mesh.cell_diameter(me.left);
    const Point t = (b - a) / me.length;
    const double height = std::abs(cross(t, apex - a));
    const double offset = (apex - a).dot(t) / me.length;

    const double lo = rho > 0.0 ? height / rho : 0.0;
    rep.min_a6_height_over_rho = std::min(rep.min_a6_height_over_rho, lo);
    rep.max_a6_height_over_hk = std::max(rep.max_a6_height_over_hk, height / hk);
    const Point o0(0.0, 0.0);
    const Point o1(1.0, 0.0);
    const Point o2(offset, 1.0);
    const double diam = std::max({(o1 - o0).norm(), (o2 - o0).norm(), (o2 - o1).norm()});
    const double ratio = radius_ratio(o0, o1, o2);
    rep.max_a6_diameter = std::max(rep.max_a6_diameter, diam);
    rep.max_a6_radius_ratio = std::max(rep.max_a6_radius_ratio, ratio);
    if (lo < 1.0 - 1e-12 || height > hk * (1.0 + 1e-12) || diam > th.max_a6_diameter ||
        ratio > th.max_a6_radius_ratio)
        rep.violations.push_back({"A6", e, std::max(diam, ratio)});
}

} // namespace detail

/// Measures the regularity assumptions A1-A6 of the partition.
///
/// A1 uses the largest ball centered at the cell centroid; a cell that is not
/// star-shaped about its centroid gets ratio 0. The same centroid is the apex
/// of the A6 triangles.
inline MeshQualityReport validate_mesh(const PolygonalMesh& mesh, const MeshQualityThresholds& th = {})
{
    check_structure(mesh);
    MeshQualityReport rep;
    const double h = mesh.h();
    double min_hk = std::numeric_limits<double>::infinity();
    std::vector<double> rho_k(mesh.num_cells(), 0.0);

    for (int c = 0; c < mesh.num_cells(); ++c) {
        const std::vector<Point> pts = mesh.cell_points(c);
        const Point& x = mesh.cell_centroid(c);
        const double hk = mesh.cell_diameter(c);
        min_hk = std::min(min_hk, hk);
        double rho = std::numeric_limits<double>::infinity();
        double longest = 0.0;
        bool star = true;
        for (std::size_t k = 0; k < pts.size(); ++k) {
            const Point& a = pts[k];
            const Point& b = pts[(k + 1) % pts.size()];
            rho = std::min(rho, point_segment_distance(x, a, b));
            longest = std::max(longest, (b - a).norm());
            if (!(cross(a - x, b - x) > 0.0))
                star = false;
        }
        rho_k[c] = star ? rho : 0.0;
        const double star_ratio = star ? rho / hk : 0.0;
        rep.min_star_ratio = std::min(rep.min_star_ratio, star_ratio);
        if (star_ratio < th.min_star_ratio)
            rep.violations.push_back({"A1", c, star_ratio});
        const double edge_ratio = longest / hk;
        rep.min_long_edge_ratio = std::min(rep.min_long_edge_ratio, edge_ratio);
        if (edge_ratio < th.min_long_edge_ratio)
            rep.violations.push_back({"A2", c, edge_ratio});
    }
    rep.quasi_uniformity = h / min_hk;
    if (rep.quasi_uniformity > th.max_quasi_uniformity)
        rep.violations.push_back({"A3", -1, rep.quasi_uniformity});

    const double s = mesh.s();
    double min_he = std::numeric_limits<double>::infinity();
    for (int e : mesh.boundary_edges()) {
        const MeshEdge& me = mesh.edges()[e];
        min_he = std::min(min_he, me.length);
        detail::check_a6(mesh, e, rho_k[me.left], th, rep);
        if (me.curve < 0)
            continue;
        const Curve& cv = mesh.curves()[me.curve];
        for (int v : me.vertices) {
            const double d = cv.distance(mesh.vertices()[v]);
            if (d > th.curve_tolerance)
                rep.violations.push_back({"body-fitted", e, d});
        }
        const CurvedSegment seg = *mesh.segment(e);
        double gap = 0.0;
        double dev = 0.0;
        for (int k = 0; k <= th.samples_per_edge; ++k) {
            const CurvePoint cp = seg.at(seg.length() * k / th.samples_per_edge);
            gap = std::max(gap, std::abs(cp.gap));
            dev = std::max(dev, (cp.normal - me.normal).norm());
        }
        rep.max_gap = std::max(rep.max_gap, gap);
        rep.max_gap_over_s2 = std::max(rep.max_gap_over_s2, gap / (s * s));
        rep.max_normal_dev_over_s = std::max(rep.max_normal_dev_over_s, dev / s);
        rep.max_normal_dev_over_he = std::max(rep.max_normal_dev_over_he, dev / me.length);
        if (gap / (s * s) > th.max_gap_over_s2 || dev / s > th.max_normal_dev_over_s)
            rep.violations.push_back({"A4", e, std::max(gap / (s * s), dev / s)});
    }
    if (!mesh.boundary_edges().empty()) {
        rep.boundary_uniformity = s / min_he;
        if (rep.boundary_uniformity > th.max_boundary_uniformity)
            rep.violations.push_back({"A5", -1, rep.boundary_uniformity});
    }
    return rep;
}

} // namespace wg
