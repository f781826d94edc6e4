#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "wg/errors.hpp"

namespace wg {

using Point = Eigen::Vector2d;

inline double cross(const Point& a, const Point& b) { return a.x() * b.y() - a.y() * b.x(); }

/// Shoelace signed area; positive for counter-clockwise loops.
inline double signed_area(std::span<const Point> loop)
{
    double twice = 0.0;
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i)
        twice += cross(loop[i], loop[(i + 1) % n]);
    return 0.5 * twice;
}

/// Area centroid of a simple polygon. Requires nonzero area.
inline Point polygon_centroid(std::span<const Point> loop)
{
    const double area = signed_area(loop);
    if (area == 0.0)
        throw MalformedCell("polygon_centroid: zero-area polygon");
    Point c = Point::Zero();
    const std::size_t n = loop.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Point& p = loop[i];
        const Point& q = loop[(i + 1) % n];
        c += (p + q) * cross(p, q);
    }
    return c / (6.0 * area);
}

/// Largest vertex-to-vertex distance.
inline double polygon_diameter(std::span<const Point> loop)
{
    double d = 0.0;
    for (std::size_t i = 0; i < loop.size(); ++i)
        for (std::size_t j = i + 1; j < loop.size(); ++j)
            d = std::max(d, (loop[i] - loop[j]).norm());
    return d;
}

/// Distance from a point to the closed segment [a, b].
inline double point_segment_distance(const Point& p, const Point& a, const Point& b)
{
    const Point ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

/// Analytic boundary curve: a straight line or a circle.
struct Curve {
    enum class Kind { line, circle };

    Kind kind = Kind::line;
    /// Circle center, or any point of the line.
    Point center = Point::Zero();
    double radius = 0.0;
    /// Line only: outward unit normal of the domain.
    Point normal = Point::UnitX();
    /// Circle only: true when the domain lies inside the circle.
    bool domain_inside = true;

    static Curve circle(const Point& c, double r, bool inside)
    {
        if (!(r > 0.0))
            throw InvalidArgument("Curve::circle: radius must be positive");
        Curve cv;
        cv.kind = Kind::circle;
        cv.center = c;
        cv.radius = r;
        cv.domain_inside = inside;
        return cv;
    }

    static Curve line(const Point& p, const Point& outward)
    {
        Curve cv;
        cv.kind = Kind::line;
        cv.center = p;
        cv.normal = outward.normalized();
        return cv;
    }

    /// Unsigned distance from x to the curve.
    [[nodiscard]] double distance(const Point& x) const
    {
        if (kind == Kind::circle)
            return std::abs((x - center).norm() - radius);
        return std::abs((x - center).dot(normal));
    }

    /// Outward unit normal of the domain at a point of the curve.
    [[nodiscard]] Point outward_normal(const Point& on_curve) const
    {
        if (kind == Kind::line)
            return normal;
        const Point radial = (on_curve - center).normalized();
        return domain_inside ? radial : Point(-radial);
    }
};

/// Result of evaluating the chord-to-curve map at one abscissa.
struct CurvePoint {
    Point foot;   ///< image on the analytic curve
    double gap;   ///< distance from the chord, measured along the local ordinate
    Point normal; ///< outward unit normal of the analytic curve at `foot`
};

/// Map from a straight boundary chord onto the analytic curve it approximates.
///
/// The local frame puts the chord on the abscissa starting at its first
/// endpoint. The ordinate points from the chord toward the arc, so the gap is
/// nonnegative on circles regardless of which side the domain lies on.
class CurvedSegment {
public:
    CurvedSegment(const Curve& curve, const Point& a, const Point& b, const Point& chord_normal)
        : curve_(curve), origin_(a), chord_normal_(chord_normal.normalized())
    {
        const Point ab = b - a;
        length_ = ab.norm();
        if (!(length_ > 0.0))
            throw MalformedEdge("CurvedSegment: zero-length chord");
        tangent_ = ab / length_;
        ordinate_ = chord_normal_;
        if (curve_.kind == Curve::Kind::circle) {
            const Point mid = 0.5 * (a + b);
            if ((mid - curve_.center).dot(chord_normal_) < 0.0)
                ordinate_ = -chord_normal_;
        }
    }

    [[nodiscard]] const Curve& curve() const { return curve_; }
    [[nodiscard]] double length() const { return length_; }
    [[nodiscard]] const Point& origin() const { return origin_; }
    [[nodiscard]] const Point& tangent() const { return tangent_; }
    /// Local ordinate direction (toward the arc).
    [[nodiscard]] const Point& ordinate() const { return ordinate_; }
    [[nodiscard]] const Point& chord_normal() const { return chord_normal_; }

    /// Evaluates foot point, gap and curved normal at local abscissa xhat in [0, h_e].
    [[nodiscard]] CurvePoint at(double xhat) const
    {
        const double slack = 1e-12 * length_;
        if (!(xhat >= -slack && xhat <= length_ + slack))
            throw OutOfRange("CurvedSegment::at: abscissa outside the chord");
        xhat = std::clamp(xhat, 0.0, length_);
        const Point p = origin_ + xhat * tangent_;
        if (curve_.kind == Curve::Kind::line)
            return {p, 0.0, chord_normal_};

        const Point rel = p - curve_.center;
        const double d = rel.dot(ordinate_);
        const double rhs = curve_.radius * curve_.radius - rel.squaredNorm();
        // Rationalized root of lambda^2 + 2 d lambda - rhs = 0 (stable near the endpoints).
        const double disc = std::sqrt(std::max(0.0, d * d + rhs));
        const double gap = rhs / (d + disc);
        const Point foot = p + gap * ordinate_;
        return {foot, gap, curve_.outward_normal(foot)};
    }

private:
    Curve curve_;
    Point origin_;
    Point chord_normal_;
    Point tangent_ = Point::UnitX();
    Point ordinate_ = Point::UnitY();
    double length_ = 0.0;
};

/// Free-function form of CurvedSegment::at.
inline CurvePoint curved_geometry(const CurvedSegment& seg, double xhat) { return seg.at(xhat); }

} // namespace wg
