#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "wg/errors.hpp"
#include "wg/mesh.hpp"

namespace wg {

enum class SplitRule { original, modified };

/// Number of short edges each curved side is divided into.
///
/// original: ceil(h^(1/2 - j)), giving s = O(h^(j + 1/2)).
/// modified: ceil(h^((3 - 2j)/4)), giving s = O(h^((2j + 1)/4)).
inline int boundary_split_count(double h, int j, SplitRule rule)
{
    if (!(h > 0.0))
        throw InvalidArgument("boundary_split_count: h must be positive");
    if (j < 1)
        throw InvalidArgument("boundary_split_count: degree must be >= 1");
    const double exponent = rule == SplitRule::original ? 0.5 - j : (3.0 - 2.0 * j) / 4.0;
    // Shave rounding noise so exact integer powers do not bump the ceiling.
    const double value = std::pow(h, exponent);
    const double rounded = std::round(value);
    const double c = std::abs(value - rounded) < 1e-9 * std::max(1.0, value) ? rounded : std::ceil(value);
    return std::max(1, static_cast<int>(c));
}

/// Uniform triangulation of the unit square with 2 n^2 right triangles.
inline PolygonalMesh generate_square_tri(int n)
{
    if (n < 1)
        throw InvalidArgument("generate_square_tri: n must be >= 1");
    std::vector<Point> verts;
    verts.reserve(static_cast<std::size_t>((n + 1) * (n + 1)));
    for (int j = 0; j <= n; ++j)
        for (int i = 0; i <= n; ++i)
            verts.emplace_back(static_cast<double>(i) / n, static_cast<double>(j) / n);
    auto id = [n](int i, int j) { return j * (n + 1) + i; };

    std::vector<std::vector<int>> cells;
    cells.reserve(static_cast<std::size_t>(2 * n * n));
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
            cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
        }

    std::vector<Curve> sides = {
        Curve::line(Point(0.5, 0.0), Point(0.0, -1.0)),
        Curve::line(Point(1.0, 0.5), Point(1.0, 0.0)),
        Curve::line(Point(0.5, 1.0), Point(0.0, 1.0)),
        Curve::line(Point(0.0, 0.5), Point(-1.0, 0.0)),
    };
    return PolygonalMesh(std::move(verts), std::move(cells), std::move(sides));
}

namespace detail {

/// Builds concentric node rings and stitches neighbouring rings with triangles.
/// The first and last rings carry boundary chords; each chord is replaced by
/// `split` sub-chords whose endpoints lie on the circle.
class RingStitcher {
public:
    struct Ring {
        double radius = 0.0;
        int count = 0;
        double offset = 0.0; ///< angle of node 0, in units of one angular step
        bool boundary = false;
        int first = 0;       ///< index of node 0 in the vertex list
    };

    explicit RingStitcher(int split) : split_(split) {}

    std::vector<Point> vertices;
    std::vector<std::vector<int>> cells;

    Ring add_ring(double radius, int count, double offset, bool boundary)
    {
        Ring r{radius, count, offset, boundary, static_cast<int>(vertices.size())};
        for (int i = 0; i < count; ++i)
            vertices.push_back(polar(radius, angle(r, i)));
        if (boundary && split_ > 1) {
            sub_first_.push_back(static_cast<int>(vertices.size()));
            for (int i = 0; i < count; ++i)
                for (int k = 1; k < split_; ++k)
                    vertices.push_back(polar(radius, angle(r, i) + (2.0 * std::numbers::pi / count) * k / split_));
        } else {
            sub_first_.push_back(-1);
        }
        rings_.push_back(r);
        return r;
    }

    /// Triangle fan from a center vertex to ring `r`.
    void fan(int center, int ring)
    {
        const Ring& r = rings_[ring];
        for (int i = 0; i < r.count; ++i)
            emit({center, node(r, i), node(r, (i + 1) % r.count)}, ring);
    }

    /// Zipper triangulation between ring `inner` and ring `outer`.
    void stitch(int inner, int outer)
    {
        const Ring& a = rings_[inner];
        const Ring& b = rings_[outer];
        int ia = 0;
        int jb = 0;
        const double two_pi = 2.0 * std::numbers::pi;
        auto unwrapped = [&](const Ring& r, int k) { return two_pi * (k + r.offset) / r.count; };
        while (ia < a.count || jb < b.count) {
            const bool advance_inner =
                jb == b.count || (ia < a.count && unwrapped(a, ia + 1) < unwrapped(b, jb + 1));
            const int ai = node(a, ia % a.count);
            const int bj = node(b, jb % b.count);
            if (advance_inner) {
                const int an = node(a, (ia + 1) % a.count);
                emit({ai, bj, an}, inner, outer);
                ++ia;
            } else {
                const int bn = node(b, (jb + 1) % b.count);
                emit({ai, bj, bn}, inner, outer);
                ++jb;
            }
        }
    }

private:
    static Point polar(double r, double theta) { return {r * std::cos(theta), r * std::sin(theta)}; }

    static double angle(const Ring& r, int i) { return 2.0 * std::numbers::pi * (i + r.offset) / r.count; }

    static int node(const Ring& r, int i) { return r.first + i; }

    /// Position of node `v` within boundary ring `ring`, or -1.
    int ring_position(int v, int ring) const
    {
        const Ring& r = rings_[ring];
        if (!r.boundary || v < r.first || v >= r.first + r.count)
            return -1;
        return v - r.first;
    }

    void emit(std::vector<int> tri, int ring_a, int ring_b = -1)
    {
        std::vector<Point> pts{vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]};
        if (signed_area(pts) < 0.0)
            std::swap(tri[1], tri[2]);
        if (split_ <= 1) {
            cells.push_back(std::move(tri));
            return;
        }
        std::vector<int> loop;
        for (int k = 0; k < 3; ++k) {
            const int p = tri[k];
            const int q = tri[(k + 1) % 3];
            loop.push_back(p);
            for (int ring : {ring_a, ring_b}) {
                if (ring < 0)
                    continue;
                const int ip = ring_position(p, ring);
                const int iq = ring_position(q, ring);
                if (ip < 0 || iq < 0)
                    continue;
                const int n = rings_[ring].count;
                const int base = sub_first_[ring];
                if (iq == (ip + 1) % n) {
                    for (int s = 1; s < split_; ++s)
                        loop.push_back(base + ip * (split_ - 1) + (s - 1));
                } else if (ip == (iq + 1) % n) {
                    for (int s = split_ - 1; s >= 1; --s)
                        loop.push_back(base + iq * (split_ - 1) + (s - 1));
                }
            }
        }
        cells.push_back(std::move(loop));
    }

    int split_ = 1;
    std::vector<Ring> rings_;
    std::vector<int> sub_first_;
};

} // namespace detail

/// Body-fitted mesh of the unit disk.
///
/// Concentric node rings at radii k/m with about n k/m nodes each, stitched by
/// triangles; ring m is the boundary with n chords, each split into `split`
/// sub-chords on the unit circle. Boundary cells become polygons when split > 1.
inline PolygonalMesh generate_disk_mesh(int n, int split = 1)
{
    if (n < 3)
        throw InvalidArgument("generate_disk_mesh: n must be >= 3");
    if (split < 1)
        throw InvalidArgument("generate_disk_mesh: split must be >= 1");
    const int layers = std::max(1, (n + 7) / 8);

    detail::RingStitcher st(split);
    st.vertices.emplace_back(0.0, 0.0);
    for (int k = 1; k <= layers; ++k) {
        const int count = k == layers ? n : std::max(3, static_cast<int>(std::lround(double(n) * k / layers)));
        st.add_ring(static_cast<double>(k) / layers, count, 0.5 * (k % 2), k == layers);
    }
    st.fan(0, 0);
    for (int k = 1; k < layers; ++k)
        st.stitch(k - 1, k);

    std::vector<Curve> curves{Curve::circle(Point::Zero(), 1.0, true)};
    return PolygonalMesh(std::move(st.vertices), std::move(st.cells), std::move(curves));
}

/// Body-fitted mesh of the annulus 1/2 < r < 1 with n chords on both circles.
inline PolygonalMesh generate_ring_mesh(int n, int split = 1)
{
    if (n < 8)
        throw InvalidArgument("generate_ring_mesh: n must be >= 8");
    if (split < 1)
        throw InvalidArgument("generate_ring_mesh: split must be >= 1");
    const int layers = std::max(1, n / 16);

    detail::RingStitcher st(split);
    for (int k = 0; k <= layers; ++k) {
        const double r = 0.5 + 0.5 * static_cast<double>(k) / layers;
        st.add_ring(r, n, 0.5 * (k % 2), k == 0 || k == layers);
    }
    for (int k = 1; k <= layers; ++k)
        st.stitch(k - 1, k);

    std::vector<Curve> curves{Curve::circle(Point::Zero(), 1.0, true), Curve::circle(Point::Zero(), 0.5, false)};
    return PolygonalMesh(std::move(st.vertices), std::move(st.cells), std::move(curves));
}

} // namespace wg
