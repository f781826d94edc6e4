#pragma once

#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

#include "wg/errors.hpp"
#include "wg/geometry.hpp"

namespace wg {

/// Gauss-Legendre nodes and weights on [0, 1].
struct GaussRule01 {
    std::vector<double> nodes;
    std::vector<double> weights;
};

namespace detail {

inline GaussRule01 build_gauss_legendre(int n)
{
    GaussRule01 r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0;
            double p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1)
                p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16)
                break;
        }
        // Final derivative at the converged node.
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[n - 1 - i] = 0.5 * (x + 1.0);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

} // namespace detail

/// n-point Gauss-Legendre rule on [0, 1], exact to degree 2n - 1. Cached for n <= 64.
inline const GaussRule01& gauss_legendre(int n)
{
    constexpr int max_points = 64;
    static const std::vector<GaussRule01> table = [] {
        std::vector<GaussRule01> t(max_points + 1);
        for (int k = 1; k <= max_points; ++k)
            t[k] = detail::build_gauss_legendre(k);
        return t;
    }();
    if (n < 1 || n > max_points)
        throw InvalidArgument("gauss_legendre: unsupported point count");
    return table[n];
}

/// Points and weights in physical coordinates.
struct QuadratureRule {
    std::vector<Point> points;
    std::vector<double> weights;
    int degree = 0;

    [[nodiscard]] std::size_t size() const { return points.size(); }
    [[nodiscard]] double measure() const
    {
        double m = 0.0;
        for (double w : weights)
            m += w;
        return m;
    }
};

/// Edge rule; `params` holds the arc-length fraction t in [0, 1] of each point.
struct EdgeQuadrature {
    std::vector<Point> points;
    std::vector<double> params;
    std::vector<double> weights;
    int degree = 0;
    double length = 0.0;
};

/// Collapsed (Duffy) Gauss product rule on a triangle, exact to `order`.
/// Appends to `rule`.
inline void append_triangle_rule(const Point& a, const Point& b, const Point& c, int order, QuadratureRule& rule)
{
    const int n = (order + 3) / 2;
    const GaussRule01& g = gauss_legendre(n);
    const double twice_area = cross(b - a, c - a);
    for (int i = 0; i < n; ++i) {
        const double u = g.nodes[i];
        for (int j = 0; j < n; ++j) {
            const double v = g.nodes[j];
            rule.points.push_back(a + u * (b - a) + u * v * (c - b));
            rule.weights.push_back(g.weights[i] * g.weights[j] * u * twice_area);
        }
    }
}

/// Rule on a star-shaped polygon: fan triangulation from `fan_point` plus a
/// triangle rule of the requested exactness on each fan triangle.
///
/// Throws MalformedCell when the fan is not a simple covering (a fan triangle
/// with nonpositive area or a winding number other than one).
inline QuadratureRule polygon_rule(std::span<const Point> loop, const Point& fan_point, int order)
{
    if (order < 0)
        throw InvalidArgument("polygon_rule: order must be >= 0");
    const std::size_t n = loop.size();
    if (n < 3)
        throw MalformedCell("polygon_rule: fewer than three vertices");
    QuadratureRule rule;
    rule.degree = order;
    double winding = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = loop[i];
        const Point& q = loop[(i + 1) % n];
        const Point dp = p - fan_point;
        const Point dq = q - fan_point;
        if (!(cross(dp, dq) > 0.0))
            throw MalformedCell("polygon_rule: polygon is not star-shaped about the fan point");
        winding += std::atan2(cross(dp, dq), dp.dot(dq));
        append_triangle_rule(fan_point, p, q, order, rule);
    }
    if (std::abs(winding - 2.0 * std::numbers::pi) > 1e-8)
        throw MalformedCell("polygon_rule: polygon is not simple");
    return rule;
}

/// Rule on a polygon using its centroid as the fan point.
inline QuadratureRule polygon_rule(std::span<const Point> loop, int order)
{
    return polygon_rule(loop, polygon_centroid(loop), order);
}

/// Gauss-Legendre rule on the segment a -> b with ceil((order + 1) / 2) points.
inline EdgeQuadrature edge_rule(const Point& a, const Point& b, int order)
{
    if (order < 0)
        throw InvalidArgument("edge_rule: order must be >= 0");
    const double len = (b - a).norm();
    if (!(len > 0.0))
        throw MalformedEdge("edge_rule: zero-length edge");
    const int n = (order + 2) / 2;
    const GaussRule01& g = gauss_legendre(n);
    EdgeQuadrature q;
    q.degree = order;
    q.length = len;
    for (int i = 0; i < n; ++i) {
        q.params.push_back(g.nodes[i]);
        q.points.push_back(a + g.nodes[i] * (b - a));
        q.weights.push_back(g.weights[i] * len);
    }
    return q;
}

using ScalarField = std::function<double(const Point&)>;

/// Integral of f over a polygon (fan about the centroid).
inline double integrate_cell(std::span<const Point> loop, const ScalarField& f, int order)
{
    const QuadratureRule rule = polygon_rule(loop, order);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.size(); ++k)
        sum += rule.weights[k] * f(rule.points[k]);
    return sum;
}

/// Integral of f over the segment a -> b.
inline double integrate_edge(const Point& a, const Point& b, const ScalarField& f, int order)
{
    const EdgeQuadrature rule = edge_rule(a, b, order);
    double sum = 0.0;
    for (std::size_t k = 0; k < rule.points.size(); ++k)
        sum += rule.weights[k] * f(rule.points[k]);
    return sum;
}

} // namespace wg
